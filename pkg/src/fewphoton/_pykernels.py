"""Pure-Python kernels, used when the compiled extension is unavailable."""

from __future__ import annotations

from math import comb, factorial, sqrt

import numpy as np


def two_mode_amplitudes(n: int, m: int, u00: complex, u01: complex,
                        u10: complex, u11: complex) -> np.ndarray:
    """Output amplitudes of ``|n, m>`` after a two-mode unitary.

    Creation operators map as ``a0 -> u00 b0 + u10 b1`` and
    ``a1 -> u01 b0 + u11 b1``. Entry ``k`` of the result is the amplitude on
    ``|k, n + m - k>``.
    """
    total = n + m
    out = np.zeros(total + 1, dtype=np.complex128)
    for p in range(n + 1):
        left = comb(n, p) * u00**p * u10 ** (n - p)
        for q in range(m + 1):
            out[p + q] += left * comb(m, q) * u01**q * u11 ** (m - q)
    scale = 1.0 / sqrt(factorial(n) * factorial(m))
    for k in range(total + 1):
        out[k] *= sqrt(factorial(k) * factorial(total - k)) * scale
    return out


def permanent(matrix) -> complex:
    """Permanent by Glynn's formula, Gray-code ordered."""
    a = np.asarray(matrix, dtype=np.complex128)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0.0j
    row_comb = a.sum(axis=0)
    total = complex(np.prod(row_comb))
    sign = 1.0
    prev = 0
    n_iter = 1 << (n - 1)
    for code in range(1, n_iter):
        gray = code ^ (code >> 1)
        flip = gray ^ prev
        i = flip.bit_length()
        if gray & flip:
            row_comb = row_comb - 2.0 * a[i]
        else:
            row_comb = row_comb + 2.0 * a[i]
        sign = -sign
        total += sign * complex(np.prod(row_comb))
        prev = gray
    return total / n_iter

"""Transition amplitudes from matrix permanents.

This path shares nothing with the ladder-operator expansion in
:mod:`fewphoton.fock` beyond the state container, and is used to
cross-check it.
"""

from __future__ import annotations

from itertools import product
from math import factorial, prod, sqrt

import numpy as np

from .fock import FockState
from .kernels import permanent


def _mode_list(occ) -> list[int]:
    return [mode for mode, n in enumerate(occ) for _ in range(n)]


def transition_amplitude(u_full: np.ndarray, occ_in, occ_out) -> complex:
    """``<out| U |in>`` where single photons map as ``a_p -> sum_q U[q, p] a_q``."""
    if sum(occ_in) != sum(occ_out):
        return 0j
    rows, cols = _mode_list(occ_out), _mode_list(occ_in)
    sub = u_full[np.ix_(rows, cols)]
    norm = sqrt(prod(factorial(n) for n in occ_in) * prod(factorial(n) for n in occ_out))
    return complex(permanent(sub)) / norm


def full_unitary(u_spatial: np.ndarray, n_internal: int) -> np.ndarray:
    """Extend a spatial transfer matrix to the flattened (spatial, internal) grid."""
    return np.kron(np.asarray(u_spatial, dtype=np.complex128), np.eye(n_internal))


def evolve(state: FockState, u_spatial: np.ndarray) -> FockState:
    """Apply a spatial unitary to ``state`` by summing permanents."""
    u_full = full_unitary(u_spatial, state.n_internal)
    n = state.photon_number
    outputs = [occ for occ in product(range(n + 1), repeat=state.n_modes) if sum(occ) == n]
    terms = {}
    for out in outputs:
        amp = sum(a * transition_amplitude(u_full, occ, out) for occ, a in state)
        terms[out] = amp
    return state._replace(terms)

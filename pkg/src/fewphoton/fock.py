"""Sparse Fock states over a grid of spatial and internal modes.

A state is a map from occupation tuples to complex amplitudes. The tuple is
flattened lexicographically by ``(spatial, internal)``, so the occupation of
``ModeIndex(s, t)`` sits at position ``s * n_internal + t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from .errors import CapacityError, InvalidArgument
from .kernels import two_mode_amplitudes

DEFAULT_PHOTON_CAP = 6
PRUNE_EPS = 1e-14
UNITARY_TOL = 1e-12

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class ModeIndex:
    spatial: int
    internal: int = 0


@dataclass(frozen=True)
class FockState:
    """Immutable superposition of occupation vectors with a fixed photon number."""

    terms: Mapping[Occupation, complex]
    n_spatial: int
    n_internal: int = 1
    photon_cap: int = DEFAULT_PHOTON_CAP
    _photons: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_spatial < 1 or self.n_internal < 1:
            raise InvalidArgument("mode grid dimensions must be >= 1")
        width = self.n_spatial * self.n_internal
        cleaned = {}
        totals = set()
        for occ in sorted(self.terms):
            amp = complex(self.terms[occ])
            if abs(amp) < PRUNE_EPS:
                continue
            if len(occ) != width or any(n < 0 for n in occ):
                raise InvalidArgument(f"bad occupation vector {occ} for a {width}-mode grid")
            totals.add(sum(occ))
            cleaned[tuple(occ)] = amp
        if len(totals) > 1:
            raise InvalidArgument(f"terms mix photon numbers {sorted(totals)}")
        n = totals.pop() if totals else 0
        if n > self.photon_cap:
            raise CapacityError(f"{n} photons exceeds the cap of {self.photon_cap}")
        object.__setattr__(self, "terms", MappingProxyType(cleaned))
        object.__setattr__(self, "_photons", n)

    @property
    def n_modes(self) -> int:
        return self.n_spatial * self.n_internal

    @property
    def photon_number(self) -> int:
        return self._photons

    def flat_index(self, mode: ModeIndex) -> int:
        if not (0 <= mode.spatial < self.n_spatial and 0 <= mode.internal < self.n_internal):
            raise InvalidArgument(
                f"{mode} outside the {self.n_spatial}x{self.n_internal} mode grid"
            )
        return mode.spatial * self.n_internal + mode.internal

    def spatial_counts(self, occ: Occupation) -> tuple[int, ...]:
        """Photon count per spatial mode, summed over internal modes."""
        t = self.n_internal
        return tuple(sum(occ[s * t:(s + 1) * t]) for s in range(self.n_spatial))

    def amplitude(self, occ: Occupation) -> complex:
        return self.terms.get(tuple(occ), 0j)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.terms.values())))

    def normalize(self) -> FockState:
        nrm = self.norm()
        if nrm == 0.0:
            raise InvalidArgument("cannot normalize the zero vector")
        return self._replace({k: v / nrm for k, v in self.terms.items()})

    def __iter__(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def _replace(self, terms) -> FockState:
        return FockState(terms, self.n_spatial, self.n_internal, self.photon_cap)


def vacuum(n_spatial: int, n_internal: int = 1, photon_cap: int = DEFAULT_PHOTON_CAP) -> FockState:
    if n_spatial < 1 or n_internal < 1:
        raise InvalidArgument("mode grid dimensions must be >= 1")
    return FockState({(0,) * (n_spatial * n_internal): 1.0}, n_spatial, n_internal, photon_cap)


def basis_state(counts, n_spatial: int, n_internal: int = 1,
                photon_cap: int = DEFAULT_PHOTON_CAP) -> FockState:
    """Single normalized ket with the given flat occupation vector."""
    return FockState({tuple(int(c) for c in counts): 1.0}, n_spatial, n_internal, photon_cap)


def apply_creation(state: FockState, mode: ModeIndex) -> FockState:
    """Act with a creation operator: ``|..n..> -> sqrt(n+1) |..n+1..>``. Not renormalized."""
    idx = state.flat_index(mode)
    if state.photon_number + 1 > state.photon_cap:
        raise CapacityError(
            f"adding a photon gives {state.photon_number + 1} > cap {state.photon_cap}"
        )
    out: dict[Occupation, complex] = {}
    for occ, amp in state:
        n = occ[idx]
        new = occ[:idx] + (n + 1,) + occ[idx + 1:]
        out[new] = out.get(new, 0j) + amp * np.sqrt(n + 1)
    return state._replace(out)


def apply_linear_creation(state: FockState, spatial: int, coefficients) -> FockState:
    """Act with ``sum_m c_m a^dagger(spatial, m)`` over internal modes."""
    result: dict[Occupation, complex] = {}
    for m, c in enumerate(coefficients):
        if abs(c) < PRUNE_EPS:
            continue
        for occ, amp in apply_creation(state, ModeIndex(spatial, m)):
            result[occ] = result.get(occ, 0j) + c * amp
    if not result:
        raise InvalidArgument("creation operator with all-zero coefficients")
    return state._replace(result)


def _check_grids(s1: FockState, s2: FockState) -> None:
    if (s1.n_spatial, s1.n_internal) != (s2.n_spatial, s2.n_internal):
        raise InvalidArgument(
            f"grid mismatch: {s1.n_spatial}x{s1.n_internal} vs {s2.n_spatial}x{s2.n_internal}"
        )


def inner_product(s1: FockState, s2: FockState) -> complex:
    """``<s1|s2>``, conjugate-linear in ``s1``."""
    _check_grids(s1, s2)
    total = 0j
    for occ, amp in s1:
        other = s2.terms.get(occ)
        if other is not None:
            total += amp.conjugate() * other
    return complex(total)


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0.0, atol=tol):
        raise InvalidArgument("matrix is not unitary within tolerance")
    return u


def apply_two_mode_unitary(state: FockState, u, i: int, j: int) -> FockState:
    """Mix spatial modes ``i`` and ``j`` with the 2x2 unitary ``u``.

    Creation operators transform as ``a_i -> u[0,0] a_i + u[1,0] a_j`` and
    ``a_j -> u[0,1] a_i + u[1,1] a_j``, identically for every internal mode.
    """
    u = check_unitary(u)
    if u.shape != (2, 2):
        raise InvalidArgument("two-mode unitary must be 2x2")
    if i == j:
        raise InvalidArgument("two-mode unitary needs distinct modes")
    for s in (i, j):
        if not 0 <= s < state.n_spatial:
            raise InvalidArgument(f"spatial mode {s} outside width {state.n_spatial}")
    u00, u01, u10, u11 = (complex(x) for x in u.ravel())
    t = state.n_internal
    cache: dict[tuple[int, int], np.ndarray] = {}
    out: dict[Occupation, complex] = {}
    for occ, amp in state:
        base = list(occ)
        per_mode = []
        for m in range(t):
            ni, nj = occ[i * t + m], occ[j * t + m]
            key = (ni, nj)
            if key not in cache:
                cache[key] = two_mode_amplitudes(ni, nj, u00, u01, u10, u11)
            coeffs = cache[key]
            per_mode.append([(k, ni + nj - k, c) for k, c in enumerate(coeffs) if abs(c) >= PRUNE_EPS])
        for combo in product(*per_mode):
            c = amp
            for m, (ki, kj, cm) in enumerate(combo):
                base[i * t + m] = ki
                base[j * t + m] = kj
                c *= cm
            key_occ = tuple(base)
            out[key_occ] = out.get(key_occ, 0j) + c
    return state._replace(out)


def relabel_internal(state: FockState, perm) -> FockState:
    """Move internal mode ``m`` to ``perm[m]`` in every spatial mode."""
    t = state.n_internal
    if sorted(perm) != list(range(t)):
        raise InvalidArgument("perm must be a permutation of the internal indices")
    out = {}
    for occ, amp in state:
        new = [0] * len(occ)
        for s in range(state.n_spatial):
            for m in range(t):
                new[s * t + perm[m]] = occ[s * t + m]
        out[tuple(new)] = amp
    return state._replace(out)


def to_dense(state: FockState, basis: list[Occupation]) -> np.ndarray:
    return np.array([state.amplitude(b) for b in basis], dtype=np.complex128)

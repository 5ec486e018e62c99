"""Photon wavepackets, their overlaps, and partially distinguishable inputs.

Each photon carries a Gaussian spectral amplitude

    phi(w) = (2 pi s^2)^(-1/4) exp(-(w - w0)^2 / (4 s^2) + i w tau)

so ``|phi|^2`` has standard deviation ``s`` (``bandwidth_sigma``) and the
photon arrives at time ``tau``. Internal modes of the Fock grid are an
orthonormal basis spanning the wavepackets in play.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InvalidArgument, NumericalDegeneracy
from .fock import DEFAULT_PHOTON_CAP, FockState, apply_linear_creation, vacuum

SPEED_OF_LIGHT = 299_792_458.0  # m/s
DEGENERACY_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class Wavepacket:
    center_wavelength: float  # nm
    bandwidth_sigma: float  # rad/s, std. dev. of the spectral intensity
    delay: float = 0.0  # s

    def __post_init__(self):
        if not self.center_wavelength > 0:
            raise InvalidArgument("center_wavelength must be positive")
        if not self.bandwidth_sigma > 0:
            raise InvalidArgument("bandwidth_sigma must be positive")

    @property
    def center_angular_frequency(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / (self.center_wavelength * 1e-9)

    def delayed(self, delay: float) -> Wavepacket:
        return Wavepacket(self.center_wavelength, self.bandwidth_sigma, delay)


@dataclass(frozen=True)
class PhotonInput:
    spatial_mode: int
    wavepacket: Wavepacket
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise InvalidArgument("multiplicity must be >= 1")


def overlap(w1: Wavepacket, w2: Wavepacket) -> complex:
    """Spectral inner product ``<w1|w2>``.

    Closed form of the two-Gaussian integral written around the combined
    center frequency, which avoids cancelling ~1e15 rad/s exponents.
    """
    s1, s2 = w1.bandwidth_sigma, w2.bandwidth_sigma
    dtau = w2.delay - w1.delay
    if math.isinf(dtau):
        return 0j
    v = s1 * s1 + s2 * s2
    o1, o2 = w1.center_angular_frequency, w2.center_angular_frequency
    mag = math.sqrt(2.0 * s1 * s2 / v)
    mag *= math.exp(-((o1 - o2) ** 2) / (4.0 * v) - (s1 * s2 * dtau) ** 2 / v)
    if mag == 0.0:
        return 0j
    w_c = (o1 * s2 * s2 + o2 * s1 * s1) / v
    return complex(mag * np.exp(1j * w_c * dtau))


def bandwidth_from_filter(center_wavelength_nm: float, fwhm_nm: float) -> float:
    """Angular-frequency sigma of a Gaussian filter with the given wavelength FWHM."""
    if center_wavelength_nm <= 0 or fwhm_nm <= 0:
        raise InvalidArgument("wavelength and FWHM must be positive")
    lam = center_wavelength_nm * 1e-9
    d_omega = 2.0 * math.pi * SPEED_OF_LIGHT * (fwhm_nm * 1e-9) / lam**2
    return d_omega / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def gram_matrix(wavepackets, extra=None) -> np.ndarray:
    """``G[k, l] = <w_l|w_k>``, optionally times an extra-DOF overlap matrix.

    ``extra`` multiplies elementwise and stands for degrees of freedom the
    wavepacket model does not carry (polarization, spatial mode). It must
    itself be a valid Gram matrix.
    """
    n = len(wavepackets)
    g = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            g[k, l] = 1.0 if k == l else overlap(wavepackets[l], wavepackets[k])
    if extra is not None:
        extra = np.asarray(extra, dtype=np.complex128)
        if extra.shape != (n, n):
            raise InvalidArgument(f"extra overlap matrix must be {n}x{n}")
        g = g * extra
    return g


def decompose_gram(gram) -> np.ndarray:
    """Gram-Schmidt in row order: returns ``C`` with ``C @ C^H == gram``.

    ``C`` is square and lower triangular. A row that lies in the span of the
    earlier rows gets no new basis vector, so its column stays zero.
    """
    g = np.asarray(gram, dtype=np.complex128)
    n = g.shape[0]
    if n == 0 or g.shape != (n, n):
        raise InvalidArgument("Gram matrix must be square and nonempty")
    c = np.zeros((n, n), dtype=np.complex128)
    owners: list[int] = []  # row that created each basis column
    for k in range(n):
        for m, j in enumerate(owners):
            acc = g[k, j] - np.dot(c[k, :m], c[j, :m].conj())
            c[k, m] = acc / c[j, m].real
        resid = g[k, k].real - float(np.sum(np.abs(c[k, : len(owners)]) ** 2))
        if resid < -PSD_TOL:
            raise NumericalDegeneracy(
                f"Gram matrix not positive semidefinite at row {k} (residual {resid:.3e})"
            )
        if resid > 2.0 * DEGENERACY_TOL:
            c[k, len(owners)] = math.sqrt(resid)
            owners.append(k)
    # Place each new basis column at its owner's index so internal labels follow list order.
    out = np.zeros_like(c)
    for m, j in enumerate(owners):
        out[:, j] = c[:, m]
    return out


def orthonormal_decomposition(wavepackets) -> np.ndarray:
    """Expansion coefficients of each wavepacket over an orthonormal internal basis."""
    wavepackets = list(wavepackets)
    if not wavepackets:
        raise InvalidArgument("need at least one wavepacket")
    return decompose_gram(gram_matrix(wavepackets))


def build_input_state(inputs, n_spatial: int, extra_overlap=None,
                      photon_cap: int = DEFAULT_PHOTON_CAP) -> FockState:
    """Normalized multi-photon input state.

    Every photon (inputs expanded by multiplicity, in list order) gets its own
    row of the Gram-Schmidt coefficient matrix and hence its own creation
    operator over the internal modes of its spatial mode. ``extra_overlap``
    is a per-photon matrix passed to :func:`gram_matrix`.
    """
    photons: list[tuple[int, Wavepacket]] = []
    for inp in inputs:
        if not 0 <= inp.spatial_mode < n_spatial:
            raise InvalidArgument(f"spatial mode {inp.spatial_mode} outside width {n_spatial}")
        photons.extend([(inp.spatial_mode, inp.wavepacket)] * inp.multiplicity)
    if not photons:
        raise InvalidArgument("no photons to inject")
    if len(photons) > photon_cap:
        raise CapacityError(f"{len(photons)} photons exceeds the cap of {photon_cap}")
    coeffs = decompose_gram(gram_matrix([w for _, w in photons], extra_overlap))
    state = vacuum(n_spatial, len(photons), photon_cap)
    for k, (mode, _) in enumerate(photons):
        state = apply_linear_creation(state, mode, coeffs[k])
    return state.normalize()

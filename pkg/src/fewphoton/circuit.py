"""Couplers, phase shifters and Mach-Zehnder interferometers."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import acos, pi, sqrt
from typing import Union

import numpy as np

from .errors import InvalidArgument
from .fock import FockState, apply_two_mode_unitary, basis_state


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgument(f"reflectivity eta={eta} outside [0, 1]")
    return eta


def coupler_unitary(eta: float) -> np.ndarray:
    """Directional coupler with reflectivity ``eta``.

    ``[[sqrt(eta), sqrt(1-eta)], [sqrt(1-eta), -sqrt(eta)]]``. ``eta`` is the
    probability that a photon stays in its input-side waveguide.
    """
    eta = _check_eta(eta)
    r, t = sqrt(eta), sqrt(1.0 - eta)
    return np.array([[r, t], [t, -r]], dtype=np.complex128)


@dataclass(frozen=True)
class Coupler:
    modes: tuple[int, int]
    eta: float

    def __post_init__(self):
        _check_eta(self.eta)
        i, j = self.modes
        if i == j:
            raise InvalidArgument("coupler needs two distinct modes")
        object.__setattr__(self, "modes", (int(i), int(j)))

    def max_mode(self) -> int:
        return max(self.modes)


@dataclass(frozen=True)
class PhaseShift:
    mode: int
    phi: float

    def max_mode(self) -> int:
        return self.mode


CircuitElement = Union[Coupler, PhaseShift]


@dataclass(frozen=True)
class Circuit:
    n_spatial: int
    elements: tuple[CircuitElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        elements = tuple(self.elements)
        for el in elements:
            if min(getattr(el, "modes", (el.max_mode(),))) < 0 or el.max_mode() >= self.n_spatial:
                raise InvalidArgument(f"{el} does not fit a {self.n_spatial}-mode circuit")
        object.__setattr__(self, "elements", elements)

    def unitary(self) -> np.ndarray:
        """Single-photon transfer matrix, output = U @ input."""
        u = np.eye(self.n_spatial, dtype=np.complex128)
        for el in self.elements:
            step = np.eye(self.n_spatial, dtype=np.complex128)
            if isinstance(el, Coupler):
                i, j = el.modes
                c = coupler_unitary(el.eta)
                step[np.ix_([i, j], [i, j])] = c
            else:
                step[el.mode, el.mode] = np.exp(1j * el.phi)
            u = step @ u
        return u


def _apply_phase(state: FockState, mode: int, phi: float) -> FockState:
    t = state.n_internal
    out = {}
    for occ, amp in state:
        n = sum(occ[mode * t:(mode + 1) * t])
        out[occ] = amp * np.exp(1j * n * phi) if n else amp
    return state._replace(out)


def apply_circuit(state: FockState, circuit: Circuit) -> FockState:
    if state.n_spatial != circuit.n_spatial:
        raise InvalidArgument(
            f"state has {state.n_spatial} spatial modes, circuit has {circuit.n_spatial}"
        )
    for el in circuit.elements:
        if isinstance(el, Coupler):
            state = apply_two_mode_unitary(state, coupler_unitary(el.eta), *el.modes)
        else:
            state = _apply_phase(state, el.mode, el.phi)
    return state


def mz_circuit(eta1: float, eta2: float, phi: float) -> Circuit:
    """Two couplers with a phase ``phi`` on arm 1 between them."""
    return Circuit(2, (Coupler((0, 1), eta1), PhaseShift(1, phi), Coupler((0, 1), eta2)))


def mz_effective_reflectivity(eta1: float, eta2: float, phi: float) -> float:
    """Bar-port probability of a single photon through :func:`mz_circuit`."""
    eta1, eta2 = _check_eta(eta1), _check_eta(eta2)
    amp = sqrt(eta1 * eta2) + np.exp(1j * phi) * sqrt((1.0 - eta1) * (1.0 - eta2))
    return float(abs(amp) ** 2)


def mz_simulated_reflectivity(eta1: float, eta2: float, phi: float) -> float:
    """Same quantity as :func:`mz_effective_reflectivity`, by Fock simulation."""
    out = apply_circuit(basis_state((1, 0), 2), mz_circuit(eta1, eta2, phi))
    return float(abs(out.amplitude((1, 0))) ** 2)


def mz_phase_for_reflectivity(eta_mz: float) -> float:
    """Arm phase in [0, pi] giving ``eta_mz`` for ideal 50:50 couplers.

    Inverts ``cos^2(phi / 2) = eta_mz``.
    """
    eta_mz = _check_eta(eta_mz)
    return 2.0 * acos(sqrt(eta_mz))


def phase_to_path_length(phi: float, wavelength_nm: float) -> float:
    """Optical path difference in nm corresponding to phase ``phi``."""
    if wavelength_nm <= 0:
        raise InvalidArgument("wavelength must be positive")
    return phi * wavelength_nm / (2.0 * pi)

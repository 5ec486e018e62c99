"""Simulated delay scans, visibility sweeps and Mach-Zehnder runs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import analysis
from .circuit import coupler_unitary, mz_simulated_reflectivity
from .detection import pattern_probability
from .distinguishability import (
    SPEED_OF_LIGHT,
    PhotonInput,
    Wavepacket,
    bandwidth_from_filter,
    build_input_state,
)
from .errors import InvalidArgument
from .fock import apply_two_mode_unitary

THREE_PHOTON_RATE_MULTIPLIER = 0.25


@dataclass(frozen=True)
class ScanConfig:
    """Parameters of a delay scan.

    ``mode_overlap`` is the overlap of the photons in degrees of freedom other
    than time (polarization, spatial mode); it caps the dip depth.
    ``intra_pair_overlap`` is the temporal overlap between the two photons
    sharing input A in the three-photon scan. ``drift_per_s`` tilts the
    expected counts linearly in delay.
    """

    delays: tuple[float, ...]
    eta: float = 0.5
    center_wavelength_nm: float = 804.0
    filter_fwhm_nm: float = 2.0
    rate_pairs_per_s: float = 4000.0
    integration_time_s: float = 1.0
    rate_multiplier: float = 1.0
    rng_seed: int = 0
    intra_pair_overlap: float = 1.0
    mode_overlap: float = 1.0
    drift_per_s: float = 0.0

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays)
        if not delays:
            raise InvalidArgument("delays must be nonempty")
        object.__setattr__(self, "delays", delays)
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidArgument(f"eta={self.eta} outside [0, 1]")
        if self.rate_pairs_per_s < 0 or self.integration_time_s < 0 or self.rate_multiplier < 0:
            raise InvalidArgument("rates, multiplier and integration time must be >= 0")
        for name in ("intra_pair_overlap", "mode_overlap"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidArgument(f"{name} must lie in [0, 1]")

    @property
    def bandwidth_sigma(self) -> float:
        return bandwidth_from_filter(self.center_wavelength_nm, self.filter_fwhm_nm)

    def wavepacket(self, delay: float = 0.0) -> Wavepacket:
        return Wavepacket(self.center_wavelength_nm, self.bandwidth_sigma, delay)


@dataclass
class ScanResult:
    delays: np.ndarray
    expected_probability: np.ndarray
    expected_counts: np.ndarray
    sampled_counts: np.ndarray
    asymptote_probability: float
    config: ScanConfig
    extra: dict = field(default_factory=dict)

    @property
    def visibility(self) -> float:
        """Dip visibility of the expected curve against the analytic asymptote."""
        return analysis.visibility_from_curve(self.expected_probability, self.asymptote_probability)

    def config_dict(self) -> dict:
        d = asdict(self.config)
        d["delays"] = list(d["delays"])
        return d


def actuator_to_delay(travel_m, passes: int = 2):
    """Delay in seconds for a stage travel in metres; ``passes=2`` for a retroreflector."""
    return passes * np.asarray(travel_m, dtype=float) / SPEED_OF_LIGHT


def sample_counts(expected_counts, rng_seed: int) -> np.ndarray:
    """Independent Poisson draws, consumed in array order."""
    expected = np.asarray(expected_counts, dtype=float)
    if np.any(expected < 0):
        raise InvalidArgument("expected counts must be nonnegative")
    rng = np.random.default_rng(rng_seed)
    return rng.poisson(expected).astype(np.int64)


def two_photon_probability(cfg: ScanConfig, delay: float) -> float:
    inputs = [PhotonInput(0, cfg.wavepacket(0.0)), PhotonInput(1, cfg.wavepacket(delay))]
    m = cfg.mode_overlap
    state = build_input_state(inputs, 2, extra_overlap=[[1.0, m], [m, 1.0]])
    out = apply_two_mode_unitary(state, coupler_unitary(cfg.eta), 0, 1)
    return pattern_probability(out, (1, 1))


def pair_delay_for_overlap(intra_pair_overlap: float, sigma: float) -> float:
    """Arrival-time split giving two Gaussian photons the requested overlap magnitude."""
    if not 0.0 < intra_pair_overlap <= 1.0:
        raise InvalidArgument("intra-pair overlap must lie in (0, 1]")
    return math.sqrt(-2.0 * math.log(intra_pair_overlap)) / sigma


def three_photon_probability(cfg: ScanConfig, delay: float) -> float:
    split = pair_delay_for_overlap(cfg.intra_pair_overlap, cfg.bandwidth_sigma)
    if split == 0.0:
        pair = [PhotonInput(0, cfg.wavepacket(0.0), multiplicity=2)]
    else:
        pair = [PhotonInput(0, cfg.wavepacket(-split / 2)), PhotonInput(0, cfg.wavepacket(split / 2))]
    inputs = pair + [PhotonInput(1, cfg.wavepacket(delay))]
    m = cfg.mode_overlap
    extra = [[1.0, 1.0, m], [1.0, 1.0, m], [m, m, 1.0]]
    state = build_input_state(inputs, 2, extra_overlap=extra)
    out = apply_two_mode_unitary(state, coupler_unitary(cfg.eta), 0, 1)
    return pattern_probability(out, (2, 1))


def _finish(cfg: ScanConfig, probs, asymptote: float, multiplier: float, extra=None) -> ScanResult:
    delays = np.array(cfg.delays)
    probs = np.asarray(probs, dtype=float)
    scale = cfg.rate_pairs_per_s * cfg.integration_time_s * multiplier
    expected = probs * scale * (1.0 + cfg.drift_per_s * delays)
    expected = np.maximum(expected, 0.0)
    sampled = sample_counts(expected, cfg.rng_seed)
    return ScanResult(delays, probs, expected, sampled, asymptote, cfg, extra or {})


def hom_scan(cfg: ScanConfig) -> ScanResult:
    """Two-photon coincidence probability, pattern (1, 1), versus delay of the photon in B."""
    probs = [two_photon_probability(cfg, d) for d in cfg.delays]
    asym = two_photon_probability(cfg, math.inf)
    return _finish(cfg, probs, asym, cfg.rate_multiplier)


def hom_closed_form(eta: float, sigma: float, delay, mode_overlap: float = 1.0):
    """``eta^2 + (1-eta)^2 - 2 eta (1-eta) m^2 exp(-sigma^2 tau^2)``."""
    delay = np.asarray(delay, dtype=float)
    return (eta**2 + (1 - eta) ** 2
            - 2 * eta * (1 - eta) * mode_overlap**2 * np.exp(-(sigma * delay) ** 2))


def three_photon_scan(cfg: ScanConfig) -> ScanResult:
    """Pattern (2, 1) probability for |2,1> input versus delay of the photon in B."""
    probs = [three_photon_probability(cfg, d) for d in cfg.delays]
    asym = three_photon_probability(cfg, math.inf)
    return _finish(cfg, probs, asym, cfg.rate_multiplier)


def three_photon_classical(eta: float) -> float:
    """Pattern (2, 1) probability for fully distinguishable |2,1> input."""
    return eta**3 + 2.0 * eta * (1.0 - eta) ** 2


def three_photon_visibility(cfg: ScanConfig) -> float:
    """Dip visibility at zero delay, ``1 - P(0) / P(inf)``."""
    return 1.0 - three_photon_probability(cfg, 0.0) / three_photon_probability(cfg, math.inf)


def three_photon_relative_visibility(cfg: ScanConfig) -> float:
    """Visibility relative to the same coupler with a perfectly degenerate pair."""
    ideal = three_photon_visibility(replace(cfg, intra_pair_overlap=1.0, mode_overlap=1.0))
    if ideal <= 0.0:
        raise InvalidArgument("ideal three-photon visibility vanishes for this eta")
    return three_photon_visibility(cfg) / ideal


def intra_pair_overlap_for(cfg: ScanConfig, target_relative_visibility: float) -> float:
    """Intra-pair overlap that yields the requested relative three-photon visibility."""
    if not 0.0 < target_relative_visibility <= 1.0:
        raise InvalidArgument("target relative visibility must lie in (0, 1]")
    if target_relative_visibility == 1.0:
        return 1.0

    def gap(p):
        return three_photon_relative_visibility(replace(cfg, intra_pair_overlap=p)) - target_relative_visibility

    lo = 1e-6
    if gap(lo) > 0:
        raise InvalidArgument("target relative visibility is below the reachable range")
    return float(brentq(gap, lo, 1.0, xtol=1e-14, rtol=1e-12))


def dense_delays(cfg_or_sigma, n_points: int = 201, widths: float = 5.0) -> tuple[float, ...]:
    """Symmetric delay grid through zero spanning ``widths`` dip widths each side."""
    sigma = cfg_or_sigma.bandwidth_sigma if isinstance(cfg_or_sigma, ScanConfig) else float(cfg_or_sigma)
    if n_points % 2 == 0:
        n_points += 1
    half = widths / sigma
    return tuple(np.linspace(-half, half, n_points))


def visibility_sweep(etas, template: ScanConfig, n_points: int = 201) -> list[tuple[float, float]]:
    """Expected-curve visibility of an ideal dense scan for each reflectivity."""
    delays = dense_delays(template, n_points)
    out = []
    for eta in etas:
        cfg = replace(template, eta=float(eta), delays=delays)
        out.append((float(eta), hom_scan(cfg).visibility))
    return out


@dataclass
class SweepPoint:
    eta: float
    visibility: float
    visibility_err: float
    v_ideal: float
    v_rel: float
    fit: analysis.DipFitResult | None = None


def fitted_visibility_sweep(etas, template: ScanConfig) -> tuple[list[SweepPoint], analysis.ModeMismatchFit]:
    """Poisson-sampled scan plus dip fit per coupler, then the mode-mismatch fit.

    Scan ``k`` uses seed ``template.rng_seed + k``.
    """
    points = []
    for k, eta in enumerate(etas):
        cfg = replace(template, eta=float(eta), rng_seed=template.rng_seed + k)
        res = hom_scan(cfg)
        fit = analysis.fit_dip(res.delays, res.sampled_counts)
        vid = analysis.v_ideal(eta)
        v_rel = fit.visibility / vid if vid > 0 else float("nan")
        points.append(SweepPoint(float(eta), fit.visibility, fit.errors["visibility"], vid, v_rel, fit))
    mm = analysis.fit_mode_mismatch(
        [p.eta for p in points], [p.visibility for p in points],
        [max(p.visibility_err, 1e-12) for p in points],
    )
    return points, mm


def mz_experiment(eta1: float, eta2: float, phi: float) -> float:
    """Single-photon bar-port probability through the simulated interferometer."""
    return mz_simulated_reflectivity(eta1, eta2, phi)

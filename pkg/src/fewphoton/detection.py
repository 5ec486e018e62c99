"""Number-resolving detection that sees spatial modes but not internal modes."""

from __future__ import annotations

from itertools import product

from .errors import InvalidArgument
from .fock import FockState


def _patterns(n_photons: int, n_spatial: int):
    for counts in product(range(n_photons + 1), repeat=n_spatial):
        if sum(counts) == n_photons:
            yield counts


def pattern_probability(state: FockState, pattern) -> float:
    """Probability of observing ``pattern`` (photons per spatial mode)."""
    pattern = tuple(int(c) for c in pattern)
    if len(pattern) != state.n_spatial:
        raise InvalidArgument(f"pattern has {len(pattern)} entries for {state.n_spatial} modes")
    if any(c < 0 for c in pattern) or sum(pattern) != state.photon_number:
        raise InvalidArgument(
            f"pattern {pattern} does not hold {state.photon_number} photons"
        )
    total = 0.0
    for occ, amp in state:
        if state.spatial_counts(occ) == pattern:
            total += abs(amp) ** 2
    return min(max(total, 0.0), 1.0)


def all_pattern_probabilities(state: FockState) -> dict[tuple[int, ...], float]:
    """Every spatial pattern with the state's photon number, including zeros."""
    probs = {p: 0.0 for p in _patterns(state.photon_number, state.n_spatial)}
    for occ, amp in state:
        probs[state.spatial_counts(occ)] += abs(amp) ** 2
    return probs

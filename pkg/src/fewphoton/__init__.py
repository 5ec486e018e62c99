"""Exact few-photon linear-optics simulation and HOM-dip analysis."""

from .analysis import fit_dip, fit_mode_mismatch, relative_visibility, v_ideal
from .circuit import (
    Circuit,
    Coupler,
    PhaseShift,
    apply_circuit,
    coupler_unitary,
    mz_circuit,
    mz_effective_reflectivity,
)
from .detection import all_pattern_probabilities, pattern_probability
from .distinguishability import (
    PhotonInput,
    Wavepacket,
    bandwidth_from_filter,
    build_input_state,
    orthonormal_decomposition,
    overlap,
)
from .errors import CapacityError, FitFailure, InvalidArgument, NumericalDegeneracy
from .experiments import ScanConfig, ScanResult, hom_scan, three_photon_scan
from .fock import (
    FockState,
    ModeIndex,
    apply_creation,
    apply_two_mode_unitary,
    basis_state,
    inner_product,
    vacuum,
)
from .kernels import BACKEND

__version__ = "0.1.0"

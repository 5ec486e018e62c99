import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import unitary_group

from fewphoton.circuit import coupler_unitary
from fewphoton.errors import CapacityError, InvalidArgument
from fewphoton.fock import (
    FockState,
    ModeIndex,
    apply_creation,
    apply_two_mode_unitary,
    basis_state,
    inner_product,
    relabel_internal,
    vacuum,
)
from oracles import dense_evolution, fixed_number_basis

SQ2 = np.sqrt(2.0)


def balanced_pair_output():
    return FockState({(2, 0): 1 / SQ2, (0, 2): -1 / SQ2}, 2)


class TestVacuum:
    def test_single_term(self):
        v = vacuum(2, 1)
        assert dict(v.terms) == {(0, 0): 1.0}

    def test_grid_4x2(self):
        v = vacuum(4, 2)
        assert len(v) == 1
        assert v.amplitude((0,) * 8) == 1.0

    def test_norm(self):
        assert vacuum(2, 1).norm() == 1.0

    @pytest.mark.parametrize("dims", [(0, 1), (1, 0)])
    def test_zero_dimension(self, dims):
        with pytest.raises(InvalidArgument):
            vacuum(*dims)


class TestCreation:
    def test_twice_same_mode(self):
        s = apply_creation(apply_creation(vacuum(1), ModeIndex(0)), ModeIndex(0))
        assert s.amplitude((2,)) == pytest.approx(SQ2)

    def test_two_modes(self):
        s = apply_creation(apply_creation(vacuum(2), ModeIndex(0)), ModeIndex(1))
        assert dict(s.terms) == {(1, 1): 1.0}

    def test_three_times(self):
        s = vacuum(1)
        for _ in range(3):
            s = apply_creation(s, ModeIndex(0))
        # sqrt(1) * sqrt(2) * sqrt(3)
        assert s.amplitude((3,)) == pytest.approx(np.sqrt(1 * 2 * 3), rel=1e-15)

    def test_not_renormalized(self):
        s = apply_creation(basis_state((1,), 1), ModeIndex(0))
        assert s.norm() == pytest.approx(SQ2)

    def test_cap(self):
        s = vacuum(1, photon_cap=2)
        s = apply_creation(apply_creation(s, ModeIndex(0)), ModeIndex(0))
        with pytest.raises(CapacityError):
            apply_creation(s, ModeIndex(0))

    def test_mode_out_of_range(self):
        with pytest.raises(InvalidArgument):
            apply_creation(vacuum(2, 1), ModeIndex(0, 1))


class TestInnerProduct:
    def test_normalized(self):
        assert inner_product(balanced_pair_output(), balanced_pair_output()) == pytest.approx(1.0)

    def test_orthogonal_kets(self):
        assert inner_product(basis_state((2, 0), 2), basis_state((0, 2), 2)) == 0

    def test_conjugate_linear_in_first(self):
        a = FockState({(1, 0): 1j}, 2)
        b = FockState({(1, 0): 1.0}, 2)
        assert inner_product(a, b) == pytest.approx(-1j)
        assert inner_product(b, a) == pytest.approx(1j)

    def test_grid_mismatch(self):
        with pytest.raises(InvalidArgument):
            inner_product(vacuum(2, 1), vacuum(2, 2))


class TestTwoModeUnitary:
    def test_balanced_pair(self):
        out = apply_two_mode_unitary(basis_state((1, 1), 2), coupler_unitary(0.5), 0, 1)
        assert out.amplitude((2, 0)) == pytest.approx(1 / SQ2, abs=1e-15)
        assert out.amplitude((0, 2)) == pytest.approx(-1 / SQ2, abs=1e-15)
        assert out.amplitude((1, 1)) == 0

    def test_identity(self):
        s = FockState({(2, 1): 0.6, (1, 2): 0.8j}, 2)
        out = apply_two_mode_unitary(s, np.eye(2), 0, 1)
        assert dict(out.terms) == pytest.approx(dict(s.terms))

    def test_two_one_at_two_thirds(self):
        out = apply_two_mode_unitary(basis_state((2, 1), 2), coupler_unitary(2 / 3), 0, 1)
        expected = {(3, 0): 2 / 3, (2, 1): 0.0, (1, 2): -np.sqrt(3) / 3, (0, 3): -SQ2 / 3}
        for occ, amp in expected.items():
            assert out.amplitude(occ) == pytest.approx(amp, abs=1e-14)

    def test_rejects_non_unitary(self):
        with pytest.raises(InvalidArgument):
            apply_two_mode_unitary(basis_state((1, 0), 2), [[1, 1], [0, 1]], 0, 1)

    def test_rejects_same_mode(self):
        with pytest.raises(InvalidArgument):
            apply_two_mode_unitary(basis_state((1, 0), 2), np.eye(2), 1, 1)

    def test_internal_labels_untouched(self):
        # photon in internal mode 1 of A, photon in internal mode 0 of B
        s = basis_state((0, 1, 1, 0), 2, 2)
        out = apply_two_mode_unitary(s, coupler_unitary(0.5), 0, 1)
        for occ, _ in out:
            assert occ[0] + occ[2] == 1 and occ[1] + occ[3] == 1


def random_state(rng, n_photons, n_spatial, n_internal):
    basis = fixed_number_basis(n_photons, n_spatial * n_internal)
    vec = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    vec /= np.linalg.norm(vec)
    return FockState(dict(zip(basis, vec)), n_spatial, n_internal)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), t=st.integers(1, 2),
       ij=st.sampled_from([(0, 1), (1, 0), (0, 2), (2, 1)]))
def test_norm_and_inverse(seed, n, t, ij):
    rng = np.random.default_rng(seed)
    s = random_state(rng, n, 3, t)
    u = unitary_group.rvs(2, random_state=seed % 2**31)
    out = apply_two_mode_unitary(s, u, *ij)
    assert out.norm() == pytest.approx(1.0, abs=1e-10)
    back = apply_two_mode_unitary(out, u.conj().T, *ij)
    for occ in set(s.terms) | set(back.terms):
        assert abs(back.amplitude(occ) - s.amplitude(occ)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_internal_relabel_commutes(seed, n):
    rng = np.random.default_rng(seed)
    s = random_state(rng, n, 2, 3)
    u = unitary_group.rvs(2, random_state=seed % 2**31)
    perm = list(rng.permutation(3))
    a = relabel_internal(apply_two_mode_unitary(s, u, 0, 1), perm)
    b = apply_two_mode_unitary(relabel_internal(s, perm), u, 0, 1)
    for occ in set(a.terms) | set(b.terms):
        assert abs(a.amplitude(occ) - b.amplitude(occ)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), t=st.integers(1, 2))
def test_matches_dense_exponentiation(seed, n, t):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = (h + h.conj().T) / 2
    basis, big = dense_evolution(h, n, 2, t)
    s = random_state(rng, n, 2, t)
    vec = np.array([s.amplitude(b) for b in basis])
    expected = big @ vec
    out = apply_two_mode_unitary(s, expm(1j * h), 0, 1)
    got = np.array([out.amplitude(b) for b in basis])
    np.testing.assert_allclose(got, expected, atol=1e-9)


def test_state_rejects_mixed_photon_numbers():
    with pytest.raises(InvalidArgument):
        FockState({(1, 0): 1.0, (1, 1): 1.0}, 2)


def test_pruning():
    s = FockState({(1, 0): 1.0, (0, 1): 1e-16}, 2)
    assert len(s) == 1


def test_deterministic_ordering():
    s = FockState({(0, 2): 1.0, (2, 0): 1.0, (1, 1): 1.0}, 2)
    assert list(s.terms) == [(0, 2), (1, 1), (2, 0)]


def test_immutable():
    s = vacuum(1)
    with pytest.raises(TypeError):
        s.terms[(1,)] = 1.0

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from fewphoton import analysis
from fewphoton.analysis import (
    dip_model,
    fit_dip,
    fit_mode_mismatch,
    relative_visibility,
    v_ideal,
    visibility_from_curve,
)
from fewphoton.errors import FitFailure, InvalidArgument

FS = 1e-15


class TestVIdeal:
    def test_balanced(self):
        assert v_ideal(0.5) == 1.0

    def test_measured_coupler(self):
        assert v_ideal(0.5128) == pytest.approx(0.9987, abs=1e-4)

    def test_zero(self):
        assert v_ideal(0.0) == 0.0

    @given(st.floats(0, 1))
    def test_symmetry(self, eta):
        assert v_ideal(eta) == pytest.approx(v_ideal(1 - eta), abs=1e-12)

    @pytest.mark.parametrize("eta", [-0.1, 1.1])
    def test_out_of_range(self, eta):
        with pytest.raises(InvalidArgument):
            v_ideal(eta)


class TestRelativeVisibility:
    def test_measured(self):
        assert relative_visibility(0.958, 0.5128) == pytest.approx(0.958 / 0.9987, abs=1e-4)
        assert relative_visibility(0.958, 0.5128) == pytest.approx(0.959, abs=5e-4)

    def test_balanced(self):
        assert relative_visibility(0.73, 0.5) == 0.73

    def test_three_photon_coupler(self):
        assert relative_visibility(0.84 * v_ideal(0.659), 0.659) == pytest.approx(0.84, abs=1e-15)

    @pytest.mark.parametrize("eta", [0.0, 1.0])
    def test_domain(self, eta):
        with pytest.raises(InvalidArgument):
            relative_visibility(0.5, eta)


def test_visibility_from_curve():
    assert visibility_from_curve([4, 1, 4]) == pytest.approx(0.75)
    assert visibility_from_curve([4, 1, 4], asymptote=5) == pytest.approx(0.8)


def synthetic(a=1000.0, b=0.0, v=0.5, tau0=0.0, w=100 * FS, n=41, span=500 * FS):
    tau = np.linspace(-span, span, n)
    return tau, dip_model(tau, a, b, v, tau0, w)


class TestFitDip:
    def test_noiseless_round_trip(self):
        tau, y = synthetic()
        fit = fit_dip(tau, y)
        assert fit.baseline == pytest.approx(1000.0, rel=1e-6)
        assert fit.visibility == pytest.approx(0.5, rel=1e-6)
        assert fit.width == pytest.approx(100 * FS, rel=1e-6)
        assert abs(fit.slope) * 500 * FS < 1e-6 * 1000
        assert abs(fit.center) < 1e-6 * 100 * FS

    def test_noiseless_with_slope_and_offset(self):
        tau, y = synthetic(b=2e14, tau0=30 * FS, v=0.8)
        fit = fit_dip(tau, y)
        assert fit.slope == pytest.approx(2e14, rel=1e-6)
        assert fit.center == pytest.approx(30 * FS, rel=1e-6)
        assert fit.visibility == pytest.approx(0.8, rel=1e-6)

    def test_poisson_round_trip(self):
        tau, y = synthetic(a=2000, v=0.958, w=286 * FS, n=40, span=1200 * FS)
        counts = np.random.default_rng(5).poisson(y)
        fit = fit_dip(tau, counts)
        assert abs(fit.visibility - 0.958) < 2 * fit.errors["visibility"]
        assert 0.3 < fit.reduced_chi2 < 3

    def test_deterministic(self):
        tau, y = synthetic()
        counts = np.random.default_rng(1).poisson(y)
        assert fit_dip(tau, counts) == fit_dip(tau, counts)

    def test_scale_equivariance(self):
        tau, y = synthetic(v=0.7)
        counts = np.random.default_rng(2).poisson(y).astype(float)
        sig = np.sqrt(np.maximum(counts, 1))
        f1 = fit_dip(tau, counts, sig)
        f2 = fit_dip(tau, 7.5 * counts, 7.5 * sig)
        assert f2.visibility == pytest.approx(f1.visibility, rel=1e-8)
        assert f2.center == pytest.approx(f1.center, rel=1e-6, abs=1e-8 * FS)
        assert f2.width == pytest.approx(f1.width, rel=1e-8)
        assert f2.baseline == pytest.approx(7.5 * f1.baseline, rel=1e-8)

    def test_too_few_points(self):
        with pytest.raises(InvalidArgument):
            fit_dip([0, 1, 2, 3, 4], [5, 4, 3, 4, 5])

    def test_flat(self):
        with pytest.raises(FitFailure):
            fit_dip(np.arange(10.0), np.full(10, 50.0))

    def test_bad_sigma(self):
        tau, y = synthetic()
        with pytest.raises(InvalidArgument):
            fit_dip(tau, y, np.zeros_like(y))

    def test_non_convergence(self, monkeypatch):
        monkeypatch.setattr(analysis, "MAX_ITER", 1)
        tau, y = synthetic(b=2e14, tau0=30 * FS, v=0.8)
        counts = np.random.default_rng(3).poisson(y)
        with pytest.raises(FitFailure) as info:
            fit_dip(tau, counts)
        assert "iterations" in info.value.diagnostics

    def test_clamps_visibility(self):
        tau, y = synthetic(v=1.05)
        with pytest.warns(RuntimeWarning, match="clamped"):
            fit = fit_dip(tau, y, np.ones_like(y))
        assert fit.visibility == 1.0 and fit.clamped

    def test_zero_counts_use_unit_sigma(self):
        np.testing.assert_array_equal(analysis.poisson_sigma([0, 1, 4]), [1, 1, 2])


class TestModeMismatch:
    ETAS = [0.30, 0.38, 0.45, 0.5128, 0.56, 0.62, 0.68, 0.75]

    def test_exact(self):
        v = [0.952 * v_ideal(e) for e in self.ETAS]
        fit = fit_mode_mismatch(self.ETAS, v, [0.005] * 8)
        assert fit.mismatch == pytest.approx(0.952, abs=1e-12)

    def test_single_point(self):
        assert fit_mode_mismatch([0.5], [1.0]).mismatch == pytest.approx(1.0)

    def test_noisy(self):
        rng = np.random.default_rng(17)
        v = np.array([0.93 * v_ideal(e) for e in self.ETAS]) + rng.normal(0, 0.005, 8)
        fit = fit_mode_mismatch(self.ETAS, v, [0.005] * 8)
        assert abs(fit.mismatch - 0.93) < 2 * fit.uncertainty

    def test_closed_form_vs_minimizer(self):
        rng = np.random.default_rng(4)
        v = np.array([0.95 * v_ideal(e) for e in self.ETAS]) + rng.normal(0, 0.01, 8)
        sig = rng.uniform(0.003, 0.01, 8)
        fit = fit_mode_mismatch(self.ETAS, v, sig)
        vid = np.array([v_ideal(e) for e in self.ETAS])
        res = minimize_scalar(lambda m: np.sum(((v - m * vid) / sig) ** 2),
                              bracket=(0.5, 1.0), tol=1e-14)
        assert fit.mismatch == pytest.approx(res.x, abs=1e-10)

    def test_all_zero_ideal(self):
        with pytest.raises(InvalidArgument):
            fit_mode_mismatch([0.0, 1.0], [0.0, 0.0])

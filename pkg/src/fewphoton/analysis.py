"""Dip fitting and visibility bookkeeping."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import FitFailure, InvalidArgument

MAX_ITER = 200
PARAM_RTOL = 1e-10
PARAM_NAMES = ("baseline", "slope", "visibility", "center", "width")


def v_ideal(eta: float) -> float:
    """Ideal two-photon dip visibility of a coupler with reflectivity ``eta``."""
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgument(f"eta={eta} outside [0, 1]")
    return 2.0 * eta * (1.0 - eta) / (1.0 - 2.0 * eta + 2.0 * eta * eta)


def relative_visibility(v: float, eta: float) -> float:
    ideal = v_ideal(eta)
    if ideal == 0.0:
        raise InvalidArgument(f"ideal visibility vanishes at eta={eta}; ratio undefined")
    return v / ideal


def visibility_from_curve(values, asymptote: float | None = None) -> float:
    """``(max - min) / max``; ``max`` is the given asymptote when supplied."""
    values = np.asarray(values, dtype=float)
    top = float(values.max()) if asymptote is None else float(asymptote)
    if top <= 0.0:
        return 0.0
    return (top - float(values.min())) / top


def dip_model(tau, baseline, slope, visibility, center, width):
    """``(a + b tau) (1 - V exp(-(tau - tau0)^2 / (2 w^2)))``."""
    tau = np.asarray(tau, dtype=float)
    gauss = np.exp(-((tau - center) ** 2) / (2.0 * width * width))
    return (baseline + slope * tau) * (1.0 - visibility * gauss)


def _model_and_jac(x, p):
    a, b, v, x0, w = p
    d = x - x0
    g = np.exp(-d * d / (2.0 * w * w))
    base = a + b * x
    shape = 1.0 - v * g
    jac = np.empty((x.size, 5))
    jac[:, 0] = shape
    jac[:, 1] = x * shape
    jac[:, 2] = -base * g
    jac[:, 3] = -base * v * g * d / (w * w)
    jac[:, 4] = -base * v * g * d * d / (w ** 3)
    return base * shape, jac


@dataclass
class DipFitResult:
    baseline: float
    slope: float
    visibility: float
    center: float
    width: float
    errors: dict[str, float]
    reduced_chi2: float
    n_points: int
    iterations: int
    clamped: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def poisson_sigma(counts) -> np.ndarray:
    return np.sqrt(np.maximum(np.asarray(counts, dtype=float), 1.0))


def _initial_guess(x, y):
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    q = max(1, xs.size // 4)
    a0 = float(np.mean(np.concatenate([ys[:q], ys[-q:]])))
    v0 = float((ys.max() - ys.min()) / ys.max())
    x0 = float(xs[np.argmin(ys)])
    w0 = float((xs[-1] - xs[0]) / 8.0)
    return np.array([a0, 0.0, v0, x0, w0])


def _levenberg_marquardt(x, y, sig, p0):
    p = p0.copy()
    model, jac = _model_and_jac(x, p)
    r = (model - y) / sig
    chi2 = float(r @ r)
    lam = 1e-3
    for it in range(1, MAX_ITER + 1):
        jw = jac / sig[:, None]
        a_mat = jw.T @ jw
        grad = jw.T @ r
        diag = np.diag(a_mat).copy()
        diag[diag == 0.0] = 1.0
        while True:
            try:
                step = np.linalg.solve(a_mat + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                if lam > 1e20:
                    return p, it, True
                continue
            trial = p + step
            t_model, t_jac = _model_and_jac(x, trial)
            t_r = (t_model - y) / sig
            t_chi2 = float(t_r @ t_r)
            if np.isfinite(t_chi2) and t_chi2 <= chi2:
                break
            lam *= 10.0
            if lam > 1e20:
                # No downhill step left at machine precision: treat as converged.
                return p, it, True
        p, model, jac, r = trial, t_model, t_jac, t_r
        chi2_drop = chi2 - t_chi2
        chi2 = t_chi2
        lam = max(lam / 10.0, 1e-12)
        if np.all(np.abs(step) <= PARAM_RTOL * (np.abs(p) + PARAM_RTOL)):
            return p, it, True
        if chi2_drop <= 1e-15 * max(chi2, 1e-300) and it > 1:
            return p, it, True
    return p, MAX_ITER, False


def fit_dip(tau, counts, sigma=None) -> DipFitResult:
    """Weighted Gaussian-plus-linear dip fit.

    ``sigma`` defaults to Poisson errors ``sqrt(max(N, 1))``. Reported
    uncertainties come from the covariance, inflated by the reduced chi^2
    when it exceeds one.
    """
    tau = np.asarray(tau, dtype=float)
    y = np.asarray(counts, dtype=float)
    if tau.shape != y.shape or tau.ndim != 1:
        raise InvalidArgument("tau and counts must be 1-d arrays of equal length")
    if tau.size < 6:
        raise InvalidArgument(f"need at least 6 points, got {tau.size}")
    sig = poisson_sigma(y) if sigma is None else np.asarray(sigma, dtype=float)
    if sig.shape != y.shape or np.any(sig <= 0):
        raise InvalidArgument("sigma must be positive and match counts")
    if np.ptp(y) == 0.0 or y.max() <= 0.0:
        raise FitFailure("flat data: no dip to fit", {"max": float(y.max())})
    if np.ptp(tau) == 0.0:
        raise FitFailure("all delays identical", {})

    # Fit in O(1) units; the raw problem spans 1e-13 s and 1e3 counts.
    t_scale = float(np.max(np.abs(tau)))
    c_scale = float(y.max())
    x, ys, ss = tau / t_scale, y / c_scale, sig / c_scale
    p, iters, ok = _levenberg_marquardt(x, ys, ss, _initial_guess(x, ys))
    diagnostics = {"iterations": iters, "params_scaled": p.tolist()}
    if not ok or not np.all(np.isfinite(p)):
        raise FitFailure(f"no convergence after {iters} iterations", diagnostics)

    model, jac = _model_and_jac(x, p)
    r = (model - ys) / ss
    dof = max(x.size - 5, 1)
    red_chi2 = float(r @ r) / dof
    jw = jac / ss[:, None]
    try:
        cov = np.linalg.inv(jw.T @ jw)
    except np.linalg.LinAlgError as exc:
        raise FitFailure("singular normal matrix at the solution", diagnostics) from exc
    if red_chi2 > 1.0:
        cov = cov * red_chi2
    units = np.array([c_scale, c_scale / t_scale, 1.0, t_scale, t_scale])
    params = p * units
    errs = np.sqrt(np.abs(np.diag(cov))) * np.abs(units)
    params[4] = abs(params[4])

    clamped = False
    if not 0.0 <= params[2] <= 1.0:
        warnings.warn(f"fitted visibility {params[2]:.6g} clamped to [0, 1]", RuntimeWarning)
        params[2] = min(max(params[2], 0.0), 1.0)
        clamped = True
    return DipFitResult(
        baseline=float(params[0]),
        slope=float(params[1]),
        visibility=float(params[2]),
        center=float(params[3]),
        width=float(params[4]),
        errors={name: float(e) for name, e in zip(PARAM_NAMES, errs)},
        reduced_chi2=red_chi2,
        n_points=int(x.size),
        iterations=iters,
        clamped=clamped,
    )


@dataclass
class ModeMismatchFit:
    mismatch: float
    uncertainty: float
    residuals: list[float] = field(default_factory=list)
    reduced_chi2: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def fit_mode_mismatch(etas, visibilities, sigmas=None) -> ModeMismatchFit:
    """Fit ``V = M * v_ideal(eta)`` by weighted linear least squares."""
    etas = np.asarray(etas, dtype=float)
    v = np.asarray(visibilities, dtype=float)
    if etas.shape != v.shape or etas.ndim != 1 or etas.size < 1:
        raise InvalidArgument("etas and visibilities must be matching 1-d arrays")
    sig = np.ones_like(v) if sigmas is None else np.asarray(sigmas, dtype=float)
    if np.any(sig <= 0):
        raise InvalidArgument("sigmas must be positive")
    vid = np.array([v_ideal(e) for e in etas])
    w = 1.0 / sig**2
    denom = float(np.sum(w * vid * vid))
    if denom == 0.0:
        raise InvalidArgument("every ideal visibility is zero; M is undetermined")
    m = float(np.sum(w * v * vid)) / denom
    resid = v - m * vid
    dof = etas.size - 1
    red_chi2 = float(np.sum(w * resid**2)) / dof if dof > 0 else 0.0
    err = 1.0 / np.sqrt(denom)
    if red_chi2 > 1.0:
        err *= np.sqrt(red_chi2)
    return ModeMismatchFit(m, float(err), resid.tolist(), red_chi2)

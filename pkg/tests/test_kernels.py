import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.stats import unitary_group

from fewphoton import _pykernels, kernels
from oracles import brute_permanent

try:
    from fewphoton import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_permanent_matches_brute_force(backend, n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert backend.permanent(a) == pytest.approx(brute_permanent(a), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_permanent_of_ones(backend):
    # perm(J_n) = n!
    assert backend.permanent(np.ones((6, 6))).real == pytest.approx(720.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_permanent_rejects_nonsquare(backend):
    with pytest.raises(ValueError):
        backend.permanent(np.ones((2, 3)))


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n,m", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (3, 2), (0, 4)])
def test_two_mode_amplitudes_are_normalized(backend, n, m):
    u = unitary_group.rvs(2, random_state=7)
    amps = backend.two_mode_amplitudes(n, m, *u.ravel())
    assert amps.shape == (n + m + 1,)
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
@pytest.mark.parametrize("n,m", [(a, b) for a in range(4) for b in range(4)])
def test_backends_agree(n, m):
    u = unitary_group.rvs(2, random_state=n * 4 + m)
    np.testing.assert_allclose(
        _ckernels.two_mode_amplitudes(n, m, *u.ravel()),
        _pykernels.two_mode_amplitudes(n, m, *u.ravel()),
        atol=1e-13,
    )
    a = unitary_group.rvs(n + m + 2, random_state=3)
    assert _ckernels.permanent(a) == pytest.approx(_pykernels.permanent(a), abs=1e-12)


def test_balanced_splitter_two_photons():
    s = 1 / np.sqrt(2)
    amps = kernels.two_mode_amplitudes(1, 1, s, s, s, -s)
    # entry k is the amplitude on |k, 2-k>
    np.testing.assert_allclose(amps, [-s, 0, s], atol=1e-15)


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, FEWPHOTON_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import fewphoton.kernels as k; print(k.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"

"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times the two-mode binomial expansion, the Glynn permanent, and a full coupler
application on a three-photon state spread over three internal modes. The
compiled rows are skipped when the extension is not built.
"""

import argparse
import timeit
from unittest import mock

import numpy as np

from fewphoton import _pykernels, fock
from fewphoton.circuit import coupler_unitary
from fewphoton.distinguishability import PhotonInput, Wavepacket, build_input_state

try:
    from fewphoton import _ckernels
except ImportError:
    _ckernels = None


def _three_photon_state():
    sigma = 2.5e12
    inputs = [PhotonInput(0, Wavepacket(804.0, sigma, 0.0)),
              PhotonInput(0, Wavepacket(804.0, sigma, 4e-13)),
              PhotonInput(1, Wavepacket(804.0, sigma, -3e-13))]
    return build_input_state(inputs, 2)


def _cases(backend):
    u = coupler_unitary(0.37).astype(complex)
    mat = np.random.default_rng(0).normal(size=(6, 6)) + 1j * np.random.default_rng(1).normal(size=(6, 6))
    state = _three_photon_state()

    def full_coupler():
        with mock.patch.object(fock, "two_mode_amplitudes", backend.two_mode_amplitudes):
            fock.apply_two_mode_unitary(state, u, 0, 1)

    return {
        "two_mode_amplitudes(3, 3)": lambda: backend.two_mode_amplitudes(3, 3, *u.ravel()),
        "permanent 6x6": lambda: backend.permanent(mat),
        f"coupler on 3 photons x {state.n_internal} internal": full_coupler,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    results = {}
    for name, backend in backends.items():
        for case, fn in _cases(backend).items():
            timer = timeit.Timer(fn)
            number, _ = timer.autorange()
            best = min(timer.repeat(args.repeat, number)) / number
            results[(case, name)] = best

    cases = list(_cases(_pykernels))
    print(f"{'case':<40}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for case in cases:
        py = results[(case, "python")] * 1e6
        cy = results.get((case, "cython"))
        if cy is None:
            print(f"{case:<40}{py:>14.2f}{'n/a':>14}{'':>10}")
        else:
            print(f"{case:<40}{py:>14.2f}{cy * 1e6:>14.2f}{py / (cy * 1e6):>9.1f}x")


if __name__ == "__main__":
    main()

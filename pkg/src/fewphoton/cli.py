"""Command-line entry point.

    fewphoton simulate CONFIG [--seed N] [--out DIR] [--set key=value]...
    fewphoton fit CSV [--out FILE]

Exit codes: 0 success, 2 invalid config or input data, 3 fit failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, experiments
from .circuit import (
    mz_effective_reflectivity,
    mz_phase_for_reflectivity,
    phase_to_path_length,
)
from .config import (
    ACTUATOR_UNITS,
    DELAY_UNITS,
    ConfigError,
    RunConfig,
    load_config,
    resolve_output_dir,
)
from .errors import FitFailure, InvalidArgument

EXIT_OK, EXIT_CONFIG, EXIT_FIT, EXIT_IO = 0, 2, 3, 4


def fmt(x) -> str:
    """Lossless float text (17 significant digits)."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def content_hash(data: bytes) -> str:
    """Git blob hash of ``data``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _delays_seconds(section: dict) -> tuple[float, ...]:
    unit = section.get("unit", "s")
    if "values" in section:
        raw = np.asarray(section["values"], dtype=float)
    else:
        raw = np.linspace(section["start"], section["stop"], section["points"])
    raw = raw * DELAY_UNITS[unit]
    if unit in ACTUATOR_UNITS:
        return tuple(experiments.actuator_to_delay(raw, section.get("stage_passes", 2)))
    return tuple(raw)


def _scan_config(cfg: RunConfig, delays=None, **kw) -> experiments.ScanConfig:
    src = cfg.section("source")
    p = cfg.section("params")
    if delays is None:
        delays = _delays_seconds(cfg.section("delays"))
    fields = dict(
        delays=delays,
        eta=float(p.get("eta", 0.5)),
        rng_seed=cfg.seed,
        drift_per_s=float(p.get("drift_per_s", 0.0)),
        mode_overlap=float(p.get("mode_overlap", 1.0)),
    )
    for key in ("center_wavelength_nm", "filter_fwhm_nm", "rate_pairs_per_s",
                "integration_time_s", "rate_multiplier"):
        if key in src:
            fields[key] = float(src[key])
    fields.update(kw)
    return experiments.ScanConfig(**fields)


def _scan_rows(res: experiments.ScanResult):
    return zip(res.delays, res.expected_probability, res.expected_counts, res.sampled_counts)


SCAN_HEADER = ("tau_s", "expected_prob", "expected_counts", "sampled_counts")


def _print_table(header, rows) -> None:
    widths = [max(len(h), 12) for h in header]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        cells = [(f"{v:.6g}" if isinstance(v, float) else str(v)) for v in row]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))


def _run_hom(cfg: RunConfig, prefix: Path) -> dict:
    p = cfg.section("params")
    eta = float(p["eta"])
    extra = {}
    if "target_visibility" in p:
        vid = analysis.v_ideal(eta)
        if not 0 < p["target_visibility"] <= vid:
            raise InvalidArgument(f"target_visibility must lie in (0, {vid:.6g}] at eta={eta}")
        extra["mode_overlap"] = math.sqrt(p["target_visibility"] / vid)
    scfg = _scan_config(cfg, **extra)
    res = experiments.hom_scan(scfg)
    write_csv(Path(f"{prefix}_scan.csv"), SCAN_HEADER, _scan_rows(res))
    vid = analysis.v_ideal(eta)
    injected_v = vid * scfg.mode_overlap**2
    out = {
        "eta": eta, "v_ideal": vid, "injected_visibility": injected_v,
        "mode_overlap": scfg.mode_overlap, "curve_visibility": res.visibility,
        "bandwidth_sigma_rad_s": scfg.bandwidth_sigma,
    }
    row = [eta, injected_v, vid, injected_v / vid if vid else float("nan")]
    if p.get("fit", True):
        fit = analysis.fit_dip(res.delays, res.sampled_counts)
        out["fit"] = fit.to_dict()
        out["v_rel"] = analysis.relative_visibility(fit.visibility, eta) if vid else None
        row = [eta, fit.visibility, vid, out["v_rel"]]
    _print_table(("eta", "V", "V_ideal", "V_rel"), [row])
    return out


def _run_three_photon(cfg: RunConfig, prefix: Path) -> dict:
    p = cfg.section("params")
    rate_mult = cfg.section("source").get("rate_multiplier", experiments.THREE_PHOTON_RATE_MULTIPLIER)
    scfg = _scan_config(cfg, rate_multiplier=float(rate_mult))
    if "target_relative_visibility" in p:
        intra = experiments.intra_pair_overlap_for(scfg, float(p["target_relative_visibility"]))
    else:
        intra = float(p.get("intra_pair_overlap", 1.0))
    scfg = replace(scfg, intra_pair_overlap=intra)
    res = experiments.three_photon_scan(scfg)
    write_csv(Path(f"{prefix}_scan.csv"), SCAN_HEADER, _scan_rows(res))
    ideal = experiments.three_photon_visibility(replace(scfg, intra_pair_overlap=1.0, mode_overlap=1.0))
    v = experiments.three_photon_visibility(scfg)
    out = {
        "eta": scfg.eta, "intra_pair_overlap": intra, "visibility": v,
        "ideal_visibility": ideal, "v_rel": v / ideal if ideal > 0 else None,
        "zero_delay_probability": experiments.three_photon_probability(scfg, 0.0),
        "asymptote_probability": res.asymptote_probability,
        "curve_visibility": res.visibility,
    }
    row = [scfg.eta, v, ideal, out["v_rel"]]
    if p.get("fit", False):
        fit = analysis.fit_dip(res.delays, res.sampled_counts)
        out["fit"] = fit.to_dict()
        row[1] = fit.visibility
    _print_table(("eta", "V", "V_ideal", "V_rel"), [row])
    return out


def _run_sweep(cfg: RunConfig, prefix: Path) -> dict:
    p = cfg.section("params")
    mismatch = float(p.get("mode_mismatch", 1.0))
    etas = [float(e) for e in p["etas"]]
    dsec = cfg.section("delays")
    probe = _scan_config(cfg, delays=(0.0,))
    delays = _delays_seconds(dsec) if dsec else experiments.dense_delays(probe, 41, widths=4.0)
    template = _scan_config(cfg, delays=delays, mode_overlap=math.sqrt(mismatch))
    out: dict = {"mode_mismatch_injected": mismatch}
    if p.get("sampled", True):
        points, mm = experiments.fitted_visibility_sweep(etas, template)
        rows = [(pt.eta, pt.v_ideal, pt.visibility, pt.visibility_err, pt.v_rel) for pt in points]
        out["mode_mismatch_fit"] = mm.to_dict()
        out["mean_v_rel"] = float(np.mean([pt.v_rel for pt in points]))
    else:
        sweep = experiments.visibility_sweep(etas, template)
        rows = [(e, analysis.v_ideal(e), v, 0.0,
                 v / analysis.v_ideal(e) if analysis.v_ideal(e) else float("nan"))
                for e, v in sweep]
    write_csv(Path(f"{prefix}_sweep.csv"),
              ("eta", "v_ideal", "visibility", "visibility_err", "v_rel"), rows)
    out["points"] = [dict(zip(("eta", "v_ideal", "visibility", "visibility_err", "v_rel"), r)) for r in rows]
    _print_table(("eta", "V", "V_ideal", "V_rel"), [(r[0], r[2], r[1], r[4]) for r in rows])
    if "mode_mismatch_fit" in out:
        mm = out["mode_mismatch_fit"]
        print(f"M = {mm['mismatch']:.6g} +/- {mm['uncertainty']:.2g}")
    return out


def _run_mz(cfg: RunConfig, prefix: Path) -> dict:
    p = cfg.section("params")
    eta1, eta2, phi = float(p["eta1"]), float(p["eta2"]), float(p.get("phi", 0.0))
    target = float(p.get("target_eta_mz", 0.960))
    wavelength = float(p.get("wavelength_nm", 804.0))
    n = int(p.get("phase_points", 181))
    phases = np.linspace(0.0, 2.0 * math.pi, n)
    write_csv(Path(f"{prefix}_mz.csv"), ("phi_rad", "eta_mz"),
              ((ph, mz_effective_reflectivity(eta1, eta2, ph)) for ph in phases))
    closed = mz_effective_reflectivity(eta1, eta2, phi)
    simulated = experiments.mz_experiment(eta1, eta2, phi)
    phase = mz_phase_for_reflectivity(target)
    out = {
        "eta1": eta1, "eta2": eta2, "phi": phi,
        "eta_mz_closed_form": closed, "eta_mz_simulated": simulated,
        "target_eta_mz": target, "phase_for_target_rad": phase,
        "path_length_for_target_nm": phase_to_path_length(phase, wavelength),
        "wavelength_nm": wavelength,
    }
    _print_table(("eta1", "eta2", "phi", "eta_MZ"), [(eta1, eta2, phi, closed)])
    print(f"eta_MZ={target:g} needs phase {phase:.6g} rad "
          f"({out['path_length_for_target_nm']:.4g} nm at {wavelength:g} nm)")
    return out


def read_scan_csv(path: Path):
    """Read ``tau_s`` and counts (``counts`` or ``sampled_counts``), optional ``sigma``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        count_col = "counts" if "counts" in header else (
            "sampled_counts" if "sampled_counts" in header else None)
        if "tau_s" not in header or count_col is None:
            raise InvalidArgument(f"{path}: header needs 'tau_s' and 'counts'")
        tau, counts, sigma = [], [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                tau.append(float(row["tau_s"]))
                counts.append(float(row[count_col]))
                if "sigma" in header:
                    sigma.append(float(row["sigma"]))
            except (TypeError, ValueError) as exc:
                raise InvalidArgument(f"{path}:{lineno}: malformed row") from exc
    return np.array(tau), np.array(counts), (np.array(sigma) if sigma else None)


def _fit_doc(path: Path) -> dict:
    tau, counts, sigma = read_scan_csv(path)
    fit = analysis.fit_dip(tau, counts, sigma)
    return {"data": str(path), "input_hash": content_hash(path.read_bytes()), "fit": fit.to_dict()}


def _print_fit(fit: dict) -> None:
    for key in ("baseline", "slope", "visibility", "center", "width"):
        print(f"{key}={fmt(fit[key])}")
        print(f"{key}_err={fmt(fit['errors'][key])}")
    print(f"reduced_chi2={fmt(fit['reduced_chi2'])}")
    print(f"n_points={fit['n_points']}")


def _run_fit(cfg: RunConfig, prefix: Path) -> dict:
    data = Path(cfg.section("params")["data"])
    doc = _fit_doc(data)
    _print_fit(doc["fit"])
    return doc


RUNNERS = {
    "hom-scan": _run_hom,
    "three-photon-scan": _run_three_photon,
    "visibility-sweep": _run_sweep,
    "mz": _run_mz,
    "fit": _run_fit,
}


def run(config_path, overrides=(), seed=None, out=None) -> int:
    try:
        cfg = load_config(config_path, overrides, seed)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        outdir = resolve_output_dir(cfg, out)
        outdir.mkdir(parents=True, exist_ok=True)
        prefix = outdir / cfg.section("output").get("prefix", cfg.kind)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            results = RUNNERS[cfg.kind](cfg, prefix)
        echo = cfg.as_dict()
        doc = {
            "experiment": cfg.kind,
            "config": echo,
            "input_hash": content_hash(_canonical(echo)),
            "results": _jsonable(results),
        }
        write_json(Path(f"{prefix}_result.json"), doc)
    except (InvalidArgument, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FitFailure as exc:
        print(f"fit failed: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_FIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def fit_file(csv_path, out=None) -> int:
    path = Path(csv_path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            doc = _fit_doc(path)
        _print_fit(doc["fit"])
        target = Path(out) if out else path.with_name(path.stem + "_fit.json")
        write_json(target, _jsonable(doc))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidArgument, ValueError, csv.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FitFailure as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fewphoton", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run an experiment config")
    sim.add_argument("config")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default=None, help="output directory")
    sim.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="override a scalar config field")
    fit = sub.add_parser("fit", help="fit a Gaussian-plus-linear dip to CSV data")
    fit.add_argument("csv")
    fit.add_argument("--out", default=None, help="JSON result path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return run(args.config, args.overrides, args.seed, args.out)
    return fit_file(args.csv, args.out)


if __name__ == "__main__":
    sys.exit(main())

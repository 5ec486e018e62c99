"""Run-configuration loading and schema validation.

Configs are YAML documents with a ``schema_version`` field. Every key is
checked against the schema of its experiment kind; errors carry the line
number of the offending key.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

SCHEMA_VERSION = 1
OUTPUT_ENV = "FEWPHOTON_OUTPUT_DIR"
KINDS = ("hom-scan", "three-photon-scan", "visibility-sweep", "mz", "fit")

NUM = (int, float)

SOURCE_KEYS = {
    "center_wavelength_nm": NUM,
    "filter_fwhm_nm": NUM,
    "rate_pairs_per_s": NUM,
    "integration_time_s": NUM,
    "rate_multiplier": NUM,
}
DELAY_KEYS = {
    "start": NUM,
    "stop": NUM,
    "points": int,
    "unit": str,
    "stage_passes": int,
    "values": list,
}
OUTPUT_KEYS = {"dir": str, "prefix": str}

PARAM_KEYS = {
    "hom-scan": {
        "eta": NUM, "mode_overlap": NUM, "target_visibility": NUM,
        "drift_per_s": NUM, "fit": bool,
    },
    "three-photon-scan": {
        "eta": NUM, "intra_pair_overlap": NUM, "target_relative_visibility": NUM,
        "mode_overlap": NUM, "drift_per_s": NUM, "fit": bool,
    },
    "visibility-sweep": {"etas": list, "mode_mismatch": NUM, "sampled": bool},
    "mz": {
        "eta1": NUM, "eta2": NUM, "phi": NUM, "target_eta_mz": NUM,
        "wavelength_nm": NUM, "phase_points": int,
    },
    "fit": {"data": str},
}
SECTIONS_FOR = {
    "hom-scan": ("source", "delays", "output", "params"),
    "three-photon-scan": ("source", "delays", "output", "params"),
    "visibility-sweep": ("source", "delays", "output", "params"),
    "mz": ("output", "params"),
    "fit": ("output", "params"),
}
REQUIRED_PARAMS = {
    "hom-scan": ("eta",),
    "three-photon-scan": ("eta",),
    "visibility-sweep": ("etas",),
    "mz": ("eta1", "eta2"),
    "fit": ("data",),
}
DELAY_UNITS = {"s": 1.0, "ps": 1e-12, "fs": 1e-15, "um": 1e-6, "mm": 1e-3}
ACTUATOR_UNITS = ("um", "mm")


class ConfigError(Exception):
    def __init__(self, message: str, source: str = "", line: int | None = None):
        self.line = line
        where = f"{source}:{line}: " if line is not None else (f"{source}: " if source else "")
        super().__init__(where + message)


@dataclass
class RunConfig:
    kind: str
    seed: int
    sections: dict[str, dict[str, Any]]
    source_path: Path | None = None

    def section(self, name: str) -> dict[str, Any]:
        return self.sections.get(name, {})

    def as_dict(self) -> dict[str, Any]:
        d = {"schema_version": SCHEMA_VERSION, "experiment": self.kind, "seed": self.seed}
        d.update(copy.deepcopy(self.sections))
        return d


def _key_lines(node) -> dict[tuple[str, ...], int]:
    """Map dotted key paths to 1-based line numbers from a composed YAML tree."""
    lines: dict[tuple[str, ...], int] = {}

    def walk(n, prefix):
        if isinstance(n, yaml.MappingNode):
            for k, v in n.value:
                path = prefix + (str(k.value),)
                lines[path] = k.start_mark.line + 1
                walk(v, path)

    if node is not None:
        walk(node, ())
    return lines


def _type_ok(value, expected) -> bool:
    if expected is bool:
        return isinstance(value, bool)
    if isinstance(value, bool):
        return False
    if expected is int:
        return isinstance(value, int)
    return isinstance(value, expected)


def _schema_for(kind: str, section: str) -> dict:
    return {
        "source": SOURCE_KEYS,
        "delays": DELAY_KEYS,
        "output": OUTPUT_KEYS,
        "params": PARAM_KEYS[kind],
    }[section]


def validate(raw: dict, lines: dict | None = None, source: str = "") -> RunConfig:
    lines = lines or {}

    def fail(msg, path=()):
        raise ConfigError(msg, source, lines.get(tuple(path)))

    if not isinstance(raw, dict):
        fail("config must be a mapping")
    if "schema_version" not in raw:
        fail("missing 'schema_version'")
    if raw["schema_version"] != SCHEMA_VERSION:
        fail(f"unsupported schema_version {raw['schema_version']!r}, expected {SCHEMA_VERSION}",
             ("schema_version",))
    kind = raw.get("experiment")
    if kind not in KINDS:
        fail(f"'experiment' must be one of {', '.join(KINDS)}, got {kind!r}", ("experiment",))
    seed = raw.get("seed", 0)
    if not _type_ok(seed, int):
        fail("'seed' must be an integer", ("seed",))

    allowed_sections = SECTIONS_FOR[kind]
    sections: dict[str, dict] = {}
    for key, value in raw.items():
        if key in ("schema_version", "experiment", "seed"):
            continue
        if key not in allowed_sections:
            fail(f"unknown key '{key}' for experiment '{kind}'", (key,))
        if not isinstance(value, dict):
            fail(f"section '{key}' must be a mapping", (key,))
        schema = _schema_for(kind, key)
        for sub, v in value.items():
            if sub not in schema:
                fail(f"unknown key '{key}.{sub}'", (key, sub))
            if not _type_ok(v, schema[sub]):
                fail(f"'{key}.{sub}' has the wrong type ({type(v).__name__})", (key, sub))
        sections[key] = dict(value)

    params = sections.get("params", {})
    for req in REQUIRED_PARAMS[kind]:
        if req not in params:
            fail(f"missing required key 'params.{req}'", ("params",))
    if "delays" in allowed_sections:
        d = sections.get("delays", {})
        if "values" not in d and not {"start", "stop", "points"} <= d.keys() and kind != "visibility-sweep":
            fail("'delays' needs either 'values' or 'start', 'stop' and 'points'", ("delays",))
        if d.get("unit", "s") not in DELAY_UNITS:
            fail(f"'delays.unit' must be one of {', '.join(DELAY_UNITS)}", ("delays", "unit"))
        if "points" in d and d["points"] < 1:
            fail("'delays.points' must be >= 1", ("delays", "points"))
    if kind == "visibility-sweep":
        for e in params["etas"]:
            if not _type_ok(e, NUM):
                fail("'params.etas' must be a list of numbers", ("params", "etas"))
    return RunConfig(kind, int(seed), sections)


def _parse_scalar(text: str):
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError:
        return text
    return value


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``key=value`` strings; keys are dotted paths to existing-schema scalars."""
    raw = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        path = key.strip().split(".")
        value = _parse_scalar(text)
        if isinstance(value, (dict, list)):
            raise ConfigError(f"--set {key}: only scalar values can be overridden")
        target = raw
        for part in path[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"--set {key}: '{part}' is not a section")
        target[path[-1]] = value
    return raw


def load_config(path, overrides=(), seed: int | None = None) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    try:
        node = yaml.compose(text)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                          str(path), mark.line + 1 if mark else None) from exc
    lines = _key_lines(node)
    raw = apply_overrides(raw or {}, overrides)
    if seed is not None:
        raw["seed"] = seed
    cfg = validate(raw, lines, str(path))
    cfg.source_path = path
    return cfg


def resolve_output_dir(cfg: RunConfig, cli_out: str | None) -> Path:
    if cli_out:
        return Path(cli_out)
    configured = cfg.section("output").get("dir")
    if configured:
        return Path(configured)
    return Path(os.environ.get(OUTPUT_ENV, "results"))

"""Experiment configuration: a single YAML file, parsed and validated.

Schema (field names are frozen; see the README schema section):

    seed: 0                     # optional, defaults to 0
    system:                     # optional; sweeps do not need one
      name: rotation
      params: {theta: 0.618033988749895}
    analyses:                   # at least one entry
      - op: point_recurrence
        label: golden-point     # optional
        system: {...}           # optional per-analysis override
        params: {point: 0.0, eps: 0.05, horizon: 1000}
    output:
      formats: [jsonl, csv]     # optional, defaults to both

Numbers may be written as strings like "1/3" to request exact rationals
(this matters for the doubling map).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import yaml

from .recurrence import FamilyKind, FamilySpec
from .spaces import ArcUnion, BallUnion, FiniteSubset, OpenSet, ProductBox


class ConfigError(ValueError):
    """Configuration that parses but does not validate."""


KNOWN_OPS = (
    "return_set",
    "ell_return_set",
    "point_recurrence",
    "quasi_rigidity",
    "is_rec_system",
    "equivalence",
    "hyperspace_oracle",
    "fuzzy_oracle",
    "point_descent",
)


@dataclass(frozen=True)
class AnalysisSpec:
    op: str
    label: str
    params: dict
    system: dict | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    system: dict | None
    analyses: tuple[AnalysisSpec, ...]
    formats: tuple[str, ...]
    raw: dict = field(compare=False, default_factory=dict)


def parse_number(value):
    """YAML scalars plus 'p/q' strings for exact rationals."""
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse number {value!r}") from exc
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}")
    return value


def parse_point(value):
    if isinstance(value, list):
        return tuple(parse_point(v) for v in value)
    return parse_number(value)


def parse_open(spec) -> OpenSet:
    if not isinstance(spec, dict):
        raise ConfigError(f"open-set spec must be a mapping, got {spec!r}")
    if "points" in spec:
        return FiniteSubset(spec["points"])
    if "arc" in spec or "arcs" in spec:
        raw = spec.get("arcs", [spec.get("arc")])
        arcs = []
        for a in raw:
            if "center" in a:
                c = parse_number(a["center"])
                r = parse_number(a["radius"])
                arcs.append((c - r, c + r))
            else:
                arcs.append((parse_number(a["from"]), parse_number(a["to"])))
        return ArcUnion(arcs)
    if "balls" in spec:
        return BallUnion([(parse_point(b["center"]), parse_number(b["radius"]))
                          for b in spec["balls"]])
    if "box" in spec:
        return ProductBox([parse_open(side) for side in spec["box"]])
    raise ConfigError(
        f"open-set spec needs one of points/arc/arcs/balls/box, got {spec!r}")


_FAMILY_PARAM = {
    "infinite_window": "min_count",
    "thick_window": "run_length",
    "syndetic_window": "max_gap",
    "contains_ap": "length",
}


def parse_family(spec) -> FamilySpec:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"family spec needs a 'kind', got {spec!r}")
    kind = spec["kind"]
    try:
        fk = FamilyKind(kind)
    except ValueError as exc:
        raise ConfigError(f"unknown family kind {kind!r}") from exc
    if kind in _FAMILY_PARAM:
        pname = _FAMILY_PARAM[kind]
        if pname not in spec:
            raise ConfigError(f"family {kind!r} needs parameter {pname!r}")
        return FamilySpec(fk, int(spec[pname]))
    return FamilySpec(fk)


def _anchored(path: str, exc: yaml.YAMLError) -> str:
    mark = getattr(exc, "problem_mark", None)
    if mark is not None:
        return f"{path}:{mark.line + 1}: {getattr(exc, 'problem', exc)}"
    return f"{path}: {exc}"


def parse_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file")
    except yaml.YAMLError as exc:
        raise ConfigError(_anchored(path, exc))
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: top level must be a mapping")
    return validate_config(raw, path)


def validate_config(raw: dict, path: str = "<config>") -> ExperimentConfig:
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"{path}: seed must be an integer, got {seed!r}")
    system = raw.get("system")
    if system is not None:
        if not isinstance(system, dict) or "name" not in system:
            raise ConfigError(f"{path}: system needs a 'name'")
    analyses_raw = raw.get("analyses")
    if not isinstance(analyses_raw, list) or not analyses_raw:
        raise ConfigError(f"{path}: need a non-empty 'analyses' list")
    analyses = []
    for i, a in enumerate(analyses_raw):
        where = f"{path}: analyses[{i}]"
        if not isinstance(a, dict) or "op" not in a:
            raise ConfigError(f"{where}: each analysis needs an 'op'")
        op = a["op"]
        if op not in KNOWN_OPS:
            raise ConfigError(
                f"{where}: unknown op {op!r}; known: {', '.join(KNOWN_OPS)}")
        params = a.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"{where}: params must be a mapping")
        horizon = params.get("horizon")
        if horizon is not None and (not isinstance(horizon, int) or horizon < 1):
            raise ConfigError(f"{where}: horizon must be a positive integer")
        label = a.get("label", f"{op}-{i}")
        analyses.append(AnalysisSpec(op, label, params, a.get("system")))
    labels = [a.label for a in analyses]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"{path}: analysis labels must be unique")
    output = raw.get("output", {})
    formats = tuple(output.get("formats", ["jsonl", "csv"]))
    for f in formats:
        if f not in ("jsonl", "csv"):
            raise ConfigError(f"{path}: unknown output format {f!r}")
    return ExperimentConfig(seed, system, tuple(analyses), formats, raw)

"""Executes the analyses of an experiment config and assembles the report.

All randomness flows from the single config seed through named per-analysis
generators, so reports are replayable; independent analyses may run in
worker processes, with results assembled in declaration order.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from random import Random

from .catalog import build_system
from .config import (
    AnalysisSpec,
    ConfigError,
    ExperimentConfig,
    parse_family,
    parse_number,
    parse_open,
    parse_point,
    validate_config,
)
from .oracle import (
    check_fuzzy_equivalence,
    check_hyperspace_equivalence,
    check_point_recurrence_descent,
    sweep_fuzzy_equivalence,
    sweep_hyperspace_equivalence,
)
from .recurrence import (
    InternalCheckError,
    arc_probes,
    ell_return_set,
    family_eval,
    is_rec_system,
    point_recurrence,
    quasi_rigidity_search,
    return_set,
    singleton_probes,
)
from .report import RunReport
from .spaces import Circle, FiniteSpace

DEFAULT_HORIZON = 128


def derive_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def _resolve_system(analysis: AnalysisSpec, cfg_system: dict | None):
    spec = analysis.system or cfg_system
    if spec is None:
        return None
    return build_system(spec["name"], spec.get("params", {}))


def _need_system(sys, op: str):
    if sys is None:
        raise ConfigError(f"op {op!r} needs a 'system' section")
    return sys


def _probe_list(sys, params, rng):
    probes = params.get("probes")
    if probes == "singletons" or (probes is None and
                                  isinstance(sys.space, FiniteSpace)):
        if not isinstance(sys.space, FiniteSpace):
            raise ConfigError("singleton probes need a finite space")
        return singleton_probes(sys.space)
    if isinstance(probes, dict) and "arcs" in probes:
        info = probes["arcs"]
        return arc_probes(info.get("count", 16),
                          parse_number(info.get("radius", 0.05)))
    if isinstance(probes, list):
        return [parse_open(p) for p in probes]
    raise ConfigError("is_rec_system needs probes: list | 'singletons' | "
                      "{arcs: {count, radius}}")


def _window_result(window, params):
    result = {"window": window.to_json(),
              "summary": f"{len(window.members)} members"}
    if "family" in params:
        verdict = family_eval(window, parse_family(params["family"]))
        result["verdict"] = verdict.holds
        result["reason"] = verdict.reason
    return result


def run_analysis(analysis: AnalysisSpec, cfg_system: dict | None,
                 seed: int) -> tuple[str | None, str, dict]:
    """Execute one analysis; returns (system description, semantics, result)."""
    params = analysis.params
    rng = Random(derive_seed(seed, analysis.label))
    op = analysis.op
    sys = _resolve_system(analysis, cfg_system)
    horizon = params.get("horizon", DEFAULT_HORIZON)
    budget = params.get("witness_budget", 512)

    if op == "return_set":
        sys = _need_system(sys, op)
        w = return_set(sys, parse_open(params["u"]), parse_open(params["v"]),
                       horizon, budget, rng)
        return sys.describe(), w.semantics, _window_result(w, params)

    if op == "ell_return_set":
        sys = _need_system(sys, op)
        w = ell_return_set(sys, parse_open(params["u"]),
                           params.get("ell", 1), horizon, budget, rng)
        return sys.describe(), w.semantics, _window_result(w, params)

    if op == "point_recurrence":
        sys = _need_system(sys, op)
        pr = point_recurrence(sys, parse_point(params["point"]),
                              parse_number(params.get("eps", 0.05)),
                              params.get("horizon", 1000),
                              params.get("ap_max", 12))
        result = {
            "window": pr.window.to_json(),
            "max_ap": pr.max_ap,
            "ap": {str(k): v.holds for k, v in pr.ap_lengths.items()},
            "verdict": pr.recurrent(),
            "summary": f"{len(pr.window.members)} returns, "
                       f"max progression multiplicity {pr.max_ap}",
        }
        return sys.describe(), pr.window.semantics, result

    if op == "quasi_rigidity":
        sys = _need_system(sys, op)
        sample = params.get("sample")
        if sample is not None:
            sample = [parse_point(p) for p in sample]
        else:
            sample = sys.space.grid(params.get("sample_size", 20))
        schedule = params.get("schedule")
        if isinstance(schedule, dict):
            base = parse_number(schedule.get("base", 0.1))
            schedule = [base * 2.0 ** -k
                        for k in range(schedule.get("levels", 13))]
        elif isinstance(schedule, list):
            schedule = [parse_number(s) for s in schedule]
        else:
            schedule = [0.1 * 2.0 ** -k for k in range(13)]
        qr = quasi_rigidity_search(sys, sample,
                                   schedule, params.get("horizon", 100000))
        result = {
            "times": list(qr.times),
            "residuals": list(qr.residuals),
            "served_eps": list(qr.served_eps),
            "unserved_eps": list(qr.unserved_eps),
            "verdict": qr.complete,
            "summary": f"{len(qr.times)} times, "
                       f"{len(qr.unserved_eps)} radii unserved",
        }
        return sys.describe(), "windowed", result

    if op == "is_rec_system":
        sys = _need_system(sys, op)
        report = is_rec_system(sys, _probe_list(sys, params, rng),
                               params.get("ell", 1),
                               parse_family(params["family"]),
                               horizon, budget, rng)
        result = {
            "per_probe": [
                {"probe": p.probe, "holds": p.verdict.holds,
                 "reason": p.verdict.reason} for p in report.probes],
            "verdict": report.all_recurrent,
            "family": report.family,
            "ell": report.ell,
            "summary": f"{sum(p.verdict.holds for p in report.probes)}"
                       f"/{len(report.probes)} probes recurrent",
        }
        return sys.describe(), report.semantics, result

    if op == "equivalence":
        sys = _need_system(sys, op)
        which = params.get("which", "hyperspace")
        family = parse_family(params.get("family", {"kind": "infinite_exact"}))
        if which == "hyperspace":
            rep = check_hyperspace_equivalence(
                sys, params.get("ell", 1), family,
                params.get("n_max", 3), horizon)
        elif which == "fuzzy":
            rep = check_fuzzy_equivalence(
                sys, params.get("ell", 1), family,
                params.get("grid_m", 2), horizon)
        else:
            raise ConfigError(f"unknown equivalence target {which!r}")
        result = rep.to_json()
        result["verdict"] = rep.agreement
        result["summary"] = "statements agree" if rep.agreement \
            else "DISAGREEMENT"
        if not rep.agreement:
            raise InternalCheckError(
                f"equivalence disagreement on {sys.describe()}: {result}")
        return sys.describe(), "exact", result

    if op == "hyperspace_oracle":
        sweep = sweep_hyperspace_equivalence(
            count=params.get("count", 50),
            ells=tuple(params.get("ells", [1, 2])),
            max_size=params.get("max_size", 4),
            seed=derive_seed(seed, analysis.label),
            spec=parse_family(params.get("family",
                                         {"kind": "infinite_exact"})))
        result = {
            "instances": len(sweep.reports),
            "disagreements": len(sweep.disagreements),
            "verdict": sweep.all_agree,
            "summary": f"{len(sweep.reports)} instances, "
                       f"{len(sweep.disagreements)} disagreements",
        }
        if not sweep.all_agree:
            raise InternalCheckError(
                f"hyperspace oracle sweep found disagreements: "
                f"{[r.to_json() for r in sweep.disagreements[:3]]}")
        return None, "exact", result

    if op == "fuzzy_oracle":
        sweep = sweep_fuzzy_equivalence(
            count=params.get("count", 50),
            ell=params.get("ell", 2),
            grid_m=params.get("grid_m", 2),
            max_size=params.get("max_size", 3),
            seed=derive_seed(seed, analysis.label),
            spec=parse_family(params.get("family",
                                         {"kind": "infinite_exact"})))
        result = {
            "instances": len(sweep.reports),
            "disagreements": len(sweep.disagreements),
            "verdict": sweep.all_agree,
            "summary": f"{len(sweep.reports)} instances, "
                       f"{len(sweep.disagreements)} disagreements",
        }
        if not sweep.all_agree:
            raise InternalCheckError(
                f"fuzzy oracle sweep found disagreements: "
                f"{[r.to_json() for r in sweep.disagreements[:3]]}")
        return None, "exact", result

    if op == "point_descent":
        sys = _need_system(sys, op)
        eps = params.get("eps")
        rep = check_point_recurrence_descent(
            sys, params.get("mode", "point"),
            None if eps is None else parse_number(eps),
            params.get("horizon", 384),
            params.get("sample_size", 12),
            params.get("ap_length", 6),
            derive_seed(seed, analysis.label))
        result = rep.to_json()
        result["verdict"] = rep.agreement
        result["summary"] = ", ".join(
            f"{k}={'yes' if v.holds else 'no'}"
            for k, v in rep.statements.items())
        semantics = next(iter(rep.statements.values())).semantics
        return sys.describe(), semantics, result

    raise ConfigError(f"unknown op {op!r}")


def _job(raw_config: dict, index: int, seed: int):
    cfg = validate_config(raw_config)
    analysis = cfg.analyses[index]
    start = time.perf_counter()
    system, semantics, result = run_analysis(analysis, cfg.system, seed)
    return index, system, semantics, result, time.perf_counter() - start


def run_config(cfg: ExperimentConfig, out_dir: str,
               seed_override: int | None = None, jobs: int = 1) -> int:
    """Run every analysis, write report files, return the exit code."""
    seed = cfg.seed if seed_override is None else seed_override
    report = RunReport(seed, cfg.raw)
    status = "ok"
    rows: list = [None] * len(cfg.analyses)
    if jobs > 1 and len(cfg.analyses) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_job, cfg.raw, i, seed)
                       for i in range(len(cfg.analyses))]
            for fut in futures:
                try:
                    index, system, semantics, result, elapsed = fut.result()
                    rows[index] = (system, semantics, result, elapsed)
                except InternalCheckError as exc:
                    status = "internal-failure"
                    rows[futures.index(fut)] = (
                        None, "exact",
                        {"verdict": False, "summary": str(exc)[:400]}, 0.0)
    else:
        for i, analysis in enumerate(cfg.analyses):
            start = time.perf_counter()
            try:
                system, semantics, result = run_analysis(
                    analysis, cfg.system, seed)
                rows[i] = (system, semantics, result,
                           time.perf_counter() - start)
            except InternalCheckError as exc:
                status = "internal-failure"
                rows[i] = (None, "exact",
                           {"verdict": False, "summary": str(exc)[:400]},
                           time.perf_counter() - start)
    for analysis, row in zip(cfg.analyses, rows):
        system, semantics, result, elapsed = row
        report.add_analysis(analysis.label, analysis.op, system, semantics,
                            result, elapsed)
    report.finish(status)
    report.validate()
    write_report(report, out_dir, cfg.formats)
    return 0 if status == "ok" else 2


def write_report(report: RunReport, out_dir: str, formats) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if "jsonl" in formats:
        (out / "report.jsonl").write_text(report.jsonl())
    if "csv" in formats:
        (out / "summary.csv").write_text(report.csv_summary())

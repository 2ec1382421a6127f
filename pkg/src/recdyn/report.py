"""Run reports: line-delimited JSON plus a CSV summary.

Every volatile datum (wall-clock timestamp, per-analysis timings) lives on
the single header line; the remaining lines are a pure function of config
and seed, so two runs with the same seed are byte-identical below the
header.  Every verdict carries its semantics tag (exact / windowed /
witnessed) and the config echo makes a report re-runnable.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

import jsonschema

TOOL_NAME = "recdyn"
TOOL_VERSION = "0.1.0"
GENERATOR_NAME = "python-random-mt19937/v1"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "header"},
                "tool": {"type": "string"},
                "version": {"type": "string"},
                "timestamp": {"type": "string"},
                "timings": {"type": "object"},
            },
            "required": ["type", "tool", "version", "timestamp"],
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "config"},
                "seed": {"type": "integer"},
                "generator": {"type": "string"},
                "config": {"type": "object"},
            },
            "required": ["type", "seed", "generator", "config"],
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "analysis"},
                "label": {"type": "string"},
                "op": {"type": "string"},
                "system": {"type": ["string", "null"]},
                "semantics": {"type": "string"},
                "result": {"type": "object"},
            },
            "required": ["type", "label", "op", "semantics", "result"],
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "check"},
                "name": {"type": "string"},
                "passed": {"type": "boolean"},
                "details": {"type": "object"},
            },
            "required": ["type", "name", "passed", "details"],
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "end"},
                "status": {"type": "string"},
                "counts": {"type": "object"},
            },
            "required": ["type", "status"],
        },
    ],
}


def jsonable(value):
    """Recursively coerce report payloads to JSON-safe values; exact
    rationals become 'p/q' strings so nothing is silently rounded."""
    from fractions import Fraction
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" \
            if value.denominator != 1 else value.numerator
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


class RunReport:
    """Accumulates report lines; the header is always line one."""

    def __init__(self, seed: int, config_echo: dict):
        self.timings: dict[str, float] = {}
        self.lines: list[dict] = [
            {"type": "config", "seed": seed, "generator": GENERATOR_NAME,
             "config": jsonable(config_echo)},
        ]

    def add_analysis(self, label: str, op: str, system: str | None,
                     semantics: str, result: dict, elapsed: float) -> None:
        self.timings[label] = round(elapsed, 6)
        self.lines.append({
            "type": "analysis", "label": label, "op": op, "system": system,
            "semantics": semantics, "result": jsonable(result)})

    def add_check(self, name: str, passed: bool, details: dict,
                  elapsed: float) -> None:
        self.timings[name] = round(elapsed, 6)
        self.lines.append({"type": "check", "name": name, "passed": passed,
                           "details": jsonable(details)})

    def finish(self, status: str) -> None:
        counts: dict[str, int] = {}
        for line in self.lines:
            counts[line["type"]] = counts.get(line["type"], 0) + 1
        self.lines.append({"type": "end", "status": status, "counts": counts})

    def header(self) -> dict:
        return {"type": "header", "tool": TOOL_NAME, "version": TOOL_VERSION,
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "timings": self.timings}

    def jsonl(self) -> str:
        out = [dumps(self.header())]
        out.extend(dumps(line) for line in self.lines)
        return "\n".join(out) + "\n"

    def body(self) -> str:
        """Everything below the header; byte-identical across reruns."""
        return "\n".join(dumps(line) for line in self.lines) + "\n"

    def csv_summary(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label", "kind", "verdict", "semantics", "summary"])
        for line in self.lines:
            if line["type"] == "analysis":
                result = line["result"]
                writer.writerow([
                    line["label"], line["op"],
                    result.get("verdict", ""), line["semantics"],
                    result.get("summary", "")])
            elif line["type"] == "check":
                writer.writerow([
                    line["name"], "check",
                    "pass" if line["passed"] else "FAIL", "",
                    line["details"].get("summary", "")])
        return buf.getvalue()

    def validate(self) -> None:
        for raw in self.jsonl().splitlines():
            jsonschema.validate(json.loads(raw), REPORT_SCHEMA)


def load_report(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def strip_header(text: str) -> str:
    lines = text.splitlines()
    body = [l for l in lines if not l.startswith('{"timestamp"')
            and '"type":"header"' not in l]
    return "\n".join(body) + "\n"

"""Machine-readable reports: versioned JSON and CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = "1.0"


def cjson(value):
    """Serialise numbers: complex -> {"re", "im"}, reals -> float, containers recursively."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return _f(value)
    if type(value).__name__ == "mpf":
        return _f(float(value))
    if isinstance(value, dict):
        return {str(k): cjson(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [cjson(v) for v in value]
    if hasattr(value, "as_dict"):
        return cjson(value.as_dict())
    z = complex(value)
    return {"re": _f(z.real), "im": _f(z.imag)}


def _f(x: float):
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return x + 0.0  # normalise -0.0


def from_cjson(obj):
    """Inverse of :func:`cjson` for a single {"re", "im"} number."""
    return complex(float(obj["re"]), float(obj["im"]))


@dataclass
class Result:
    """One numeric result.  ``ref`` names where the value comes from; ``plumbing`` for bookkeeping."""

    name: str
    value: object
    error: float | None
    ref: str = "plumbing"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        err = None if self.error is None else float(self.error)
        if err is not None and not math.isfinite(err):
            err = str(err)
        out = {"name": self.name, "value": cjson(self.value), "error": err, "ref": self.ref}
        if self.extra:
            out["extra"] = cjson(self.extra)
        return out


@dataclass
class Check:
    id: str
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id} {self.title}"

    def as_dict(self, timings: bool = True) -> dict:
        out = {"id": self.id, "title": self.title, "passed": bool(self.passed), "detail": cjson(self.detail)}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class Report:
    version: str
    config: dict
    branch: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def add(self, name, value, error, ref="plumbing", **extra) -> Result:
        r = Result(name, value, error, ref, extra)
        self.results.append(r)
        return r

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self, timings: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "irrper", "version": self.version},
            "config": cjson(self.config),
            "branch": cjson(self.branch),
            "results": [r.as_dict() for r in self.results],
            "checks": [c.as_dict(timings) for c in self.checks],
            "passed": self.passed,
        }
        if self.tables:
            out["tables"] = cjson(self.tables)
        if timings:
            out["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return out

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.as_dict(timings), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Tables (if any) then the flat result list; complex values split into re/im columns."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for name, rows in sorted(self.tables.items()):
            if not rows:
                continue
            cols = list(rows[0].keys())
            w.writerow([f"# {name}"])
            w.writerow(_flat_header(cols, rows[0]))
            for row in rows:
                w.writerow(_flat_row(cols, row))
        w.writerow(["# results"])
        w.writerow(["name", "re", "im", "error", "ref"])
        for r in self.results:
            d = r.as_dict()
            v = d["value"]
            if isinstance(v, dict) and "re" in v:
                w.writerow([r.name, v["re"], v["im"], d["error"], r.ref])
            else:
                w.writerow([r.name, json.dumps(v, sort_keys=True), "", d["error"], r.ref])
        return buf.getvalue()


def _flat_header(cols, row):
    out = []
    for c in cols:
        v = cjson(row[c])
        if isinstance(v, dict) and set(v) == {"re", "im"}:
            out += [f"{c}_re", f"{c}_im"]
        else:
            out.append(c)
    return out


def _flat_row(cols, row):
    out = []
    for c in cols:
        v = cjson(row[c])
        if isinstance(v, dict) and set(v) == {"re", "im"}:
            out += [v["re"], v["im"]]
        elif isinstance(v, (dict, list)):
            out.append(json.dumps(v, sort_keys=True))
        else:
            out.append(v)
    return out


def parse_report(text: str) -> dict:
    data = json.loads(text)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
    return data

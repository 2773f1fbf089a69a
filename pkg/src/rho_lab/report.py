"""Check records, reports and deterministic JSON/CSV/table rendering."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1.0"
PROVENANCE = ("paper", "derived", "trivial")


@dataclass
class Check:
    """One verified quantity.

    ``asserted=False`` marks a diagnostic: it is reported but never fails a run.
    ``tolerance`` is absolute unless ``relative`` is set.
    """

    name: str
    value: float | None
    reference: float | None
    provenance: str
    tolerance: float | None = None
    relative: bool = False
    asserted: bool = True
    passed: bool | None = None
    note: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.passed is None:
            self.passed = self._evaluate()

    def _evaluate(self) -> bool:
        if self.value is None or not math.isfinite(self.value):
            return False
        if self.reference is None or self.tolerance is None:
            return True
        err = abs(self.value - self.reference)
        if self.relative:
            err /= max(abs(self.reference), 1e-300)
        return bool(err <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "reference": self.reference,
            "provenance": self.provenance,
            "tolerance": self.tolerance,
            "relative": self.relative,
            "asserted": self.asserted,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class Report:
    command: dict
    params: dict
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "checks": [c.as_dict() for c in sorted(self.checks, key=lambda c: c.name)],
            "data": self.data,
            "status": "pass" if self.passed else "fail",
        }


def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(report: Report) -> str:
    """Canonical JSON: fixed key order, floats with 17 significant digits."""
    return _encode(report.as_dict()) + "\n"


def to_csv(report: Report) -> str:
    """A matrix if the report carries one, otherwise its rows or checks."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "matrix" in report.data:
        for row in report.data["matrix"]:
            w.writerow([format(float(x), ".17g") for x in row])
    elif report.data.get("rows"):
        rows = report.data["rows"]
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r.values()])
    else:
        w.writerow(["name", "value", "reference", "provenance", "tolerance", "asserted", "passed"])
        for c in sorted(report.checks, key=lambda c: c.name):
            w.writerow([c.name, c.value, c.reference, c.provenance, c.tolerance, c.asserted, c.passed])
    return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def to_table(report: Report) -> str:
    lines = [f"{report.command.get('command', '')}  " +
             "  ".join(f"{k}={_fmt(v)}" for k, v in report.params.items())]
    rows = report.data.get("rows")
    if rows:
        keys = list(rows[0])
        cells = [[_fmt(r[k]) for k in keys] for r in rows]
        widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
        lines.append("  ".join(k.rjust(w) for k, w in zip(keys, widths)))
        lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
        lines.append("")
    for c in sorted(report.checks, key=lambda c: c.name):
        flag = ("PASS" if c.passed else "FAIL") if c.asserted else "DIAG"
        lines.append(f"[{flag}] {c.name}: {_fmt(c.value)}"
                     + (f" (ref {_fmt(c.reference)}, tol {_fmt(c.tolerance)}, {c.provenance})"
                        if c.reference is not None else f" ({c.provenance})"))
    lines.append(f"status: {'pass' if report.passed else 'fail'}")
    return "\n".join(lines) + "\n"

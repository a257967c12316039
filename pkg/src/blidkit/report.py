"""Report assembly, canonical JSON, and CSV emission.

Floats are written in the shortest decimal that round-trips (Python's
``repr``), so a fixed seed gives byte-identical files.  Non-finite values are
written as the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Case", "Report", "to_plain", "dumps", "emit_plotdata", "write_cases_csv",
           "FLOAT_FORMAT", "compare"]

FLOAT_FORMAT = "shortest round-trip decimal"
CASE_COLUMNS = ("case_id", "quantity", "observed", "relation", "bound", "pass", "status")


def to_plain(obj):
    """Convert numpy scalars/arrays, complex numbers and non-finite floats to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        if obj.imag == 0:
            return to_plain(float(obj.real))
        return [to_plain(float(obj.real)), to_plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), indent=2, sort_keys=True) + "\n"


def compare(observed: float, relation: str, bound: float) -> bool:
    ops = {"<": observed < bound, "<=": observed <= bound, "==": observed == bound,
           ">=": observed >= bound, ">": observed > bound}
    return bool(ops[relation])


@dataclass
class Case:
    """One verdict: ``observed relation bound``.

    ``expect_fail`` marks negative controls, whose case passes when the
    comparison does not hold.
    """

    case_id: str
    quantity: str
    observed: float
    bound: float
    relation: str = "<="
    witness: object = None
    status: str = ""
    detail: str | None = None
    expect_fail: bool = False

    def __post_init__(self):
        if not self.status:
            holds = compare(self.observed, self.relation, self.bound)
            self.status = "pass" if holds != self.expect_fail else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def error(cls, case_id: str, exc: BaseException) -> "Case":
        return cls(case_id, "error", math.nan, math.nan, status="error",
                   detail=f"{type(exc).__name__}: {exc}")

    def to_json(self) -> dict:
        out = {"case_id": self.case_id, "quantity": self.quantity, "observed": self.observed,
               "bound": self.bound, "relation": self.relation, "pass": self.passed,
               "status": self.status}
        if self.expect_fail:
            out["expect_fail"] = True
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    suite: str
    cases: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.cases = sorted(self.cases, key=lambda c: c.case_id)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def to_json(self) -> dict:
        return {"suite": self.suite, "pass": self.passed,
                "cases": [c.to_json() for c in self.cases],
                "metadata": self.metadata, "series": self.series, "details": self.details}

    def dumps(self) -> str:
        return dumps(self.to_json())

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write ``<suite>_report.json``, ``<suite>_cases.csv`` and the plot series."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{self.suite}_report.json"
        path.write_text(self.dumps())
        return [path, write_cases_csv(self, out_dir / f"{self.suite}_cases.csv"),
                *emit_plotdata(self, out_dir)]


def _cell(v):
    v = to_plain(v)
    return repr(v) if isinstance(v, float) else v


def write_cases_csv(report: Report, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CASE_COLUMNS)
        for c in report.cases:
            w.writerow([c.case_id, c.quantity, _cell(c.observed), c.relation, _cell(c.bound),
                        str(c.passed).lower(), c.status])
    return path


def emit_plotdata(report: Report, out_dir: str | Path) -> list[Path]:
    """One CSV per series: ``<suite>_<series>.csv`` with a header row.

    A report without series still gets ``<suite>_series.csv`` holding only
    its header, so downstream plotting scripts always find a file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    items = report.series.items() if report.series else [("series", {"columns": ["x", "y"],
                                                                       "rows": []})]
    for name, table in items:
        path = out_dir / f"{report.suite}_{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(table["columns"])
            for row in table["rows"]:
                w.writerow([_cell(v) for v in row])
        written.append(path)
    return written

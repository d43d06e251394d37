"""Structured pass/fail records shared by the verification routines."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import __version__

CSV_COLUMNS = ("check_id", "anchor", "measured", "bound", "slack", "passed", "note")


def _num(x):
    # JSON has no inf/nan; keep them readable and round-trippable
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _from_num(x):
    if x is None:
        return None
    return float(x)


@dataclass
class CheckRow:
    """One verified inequality or identity.

    ``anchor`` names the mathematical statement under test; every anchor used
    by the library is listed in the README's check index.
    """

    check_id: str
    anchor: str
    measured: float
    bound: float | None = None
    slack: float | None = None
    passed: bool = True
    note: str = ""

    def to_dict(self):
        return {"check_id": self.check_id, "anchor": self.anchor,
                "measured": _num(self.measured), "bound": _num(self.bound),
                "slack": _num(self.slack), "passed": bool(self.passed),
                "note": self.note}


@dataclass
class VerificationReport:
    suite: str
    rows: list[CheckRow] = field(default_factory=list)
    grid_meta: dict = field(default_factory=dict)
    version: str = __version__

    def add(self, check_id, anchor, measured, bound=None, slack=None,
            passed=True, note="") -> CheckRow:
        row = CheckRow(check_id, anchor, measured, bound, slack, bool(passed), note)
        self.rows.append(row)
        return row

    def extend(self, other: "VerificationReport"):
        self.rows.extend(other.rows)
        for k, v in other.grid_meta.items():
            self.grid_meta.setdefault(k, v)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.passed]

    def min_slack(self, anchor: str | None = None) -> float:
        vals = [r.slack for r in self.rows
                if r.slack is not None and (anchor is None or r.anchor == anchor)]
        return min(vals) if vals else math.inf

    def anchors(self) -> set[str]:
        return {r.anchor for r in self.rows}

    def to_dict(self) -> dict:
        return {"suite": self.suite, "version": self.version,
                "grid_meta": self.grid_meta, "passed": self.passed,
                "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        rows = [CheckRow(r["check_id"], r["anchor"], _from_num(r["measured"]),
                         _from_num(r.get("bound")), _from_num(r.get("slack")),
                         bool(r["passed"]), r.get("note", ""))
                for r in data["rows"]]
        return cls(data["suite"], rows, dict(data.get("grid_meta", {})),
                   data.get("version", __version__))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            d = r.to_dict()
            writer.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def summary(self) -> str:
        n_fail = len(self.failures())
        return f"{self.suite}: {len(self.rows) - n_fail}/{len(self.rows)} checks passed"


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, bool):
        return "1" if x else "0"
    return "" if x is None else str(x)

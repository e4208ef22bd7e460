"""Experiment reports: exact values as ``"p/q"`` strings, fixed CSV layouts."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

REDUCTION_COLUMNS = (
    "index",
    "target",
    "n",
    "vertices",
    "exact",
    "estimate",
    "error",
    "error_display",
    "b_queries",
    "accounting_bound",
    "hitter_size",
    "inner_size",
    "w_inner",
    "bh_width",
    "approx_error",
    "gate_oracle",
    "gate_hitter",
    "gate_inner",
    "gate_width",
    "gate_approx",
    "gate_error",
    "gate_queries",
    "gate_plan",
)

LEMMA_COLUMNS = ("index", "check", "passed", "checked", "violations", "detail")

SCHEMAS = {"reduction/v1": REDUCTION_COLUMNS, "lemma-suite/v1": LEMMA_COLUMNS}


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def display(x) -> str:
    return f"{float(Fraction(x)):.6f}"


def run_id(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass
class ExperimentReport:
    config: dict
    schema: str
    rows: list[dict] = field(default_factory=list)
    schedules: list[dict] = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)

    @property
    def run_id(self) -> str:
        return run_id(self.config)

    @property
    def passed(self) -> bool:
        return bool(self.aggregate.get("passed", False))

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "csv_schema": self.schema,
            "config": self.config,
            "schedules": self.schedules,
            "rows": self.rows,
            "aggregate": self.aggregate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        cols = SCHEMAS[self.schema]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({c: _cell(row.get(c, "")) for c in cols})
        return buf.getvalue()

    def to_ndjson(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.rows)

    def write(self, out_dir, stem: str | None = None, ndjson: bool = False) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.config.get("name", "report")
        paths = {"json": out / f"{stem}.json", "csv": out / f"{stem}.csv"}
        paths["json"].write_text(self.to_json())
        paths["csv"].write_text(self.to_csv())
        if ndjson:
            paths["ndjson"] = out / f"{stem}.ndjson"
            paths["ndjson"].write_text(self.to_ndjson())
        return paths

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        return cls(data["config"], data["csv_schema"], data["rows"], data.get("schedules", []), data["aggregate"])

    @classmethod
    def read(cls, path) -> "ExperimentReport":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _cell(v):
    if isinstance(v, bool):
        return "pass" if v else "FAIL"
    return v

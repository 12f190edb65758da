"""File schemas shared by the command-line harness and downstream tools.

Selection records are JSON documents; tables are RFC-4180-style CSV with
a header row. Infinite bound values serialize as the string "inf" so the
files stay parseable outside Python.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, asdict
from datetime import datetime, timezone

from . import __version__

METHODS = ("proposed", "edge", "random", "exhaustive")

SWEEP_COLUMNS = ["N", "M", "method", "seed", "worst_case_crb", "argmax_dw"]
EVALUATE_COLUMNS = ["delta_omega", "crb"]
CURVE_COLUMNS = ["x", "method", "mean", "min", "max"]
PATTERN_COLUMNS = ["method", "n", "m", "pattern"]


def encode_value(value: float):
    return "inf" if math.isinf(value) else value


def decode_value(value) -> float:
    if value == "inf":
        return math.inf
    return float(value)


@dataclass
class SelectionRecord:
    n: int
    m: int
    positions: list
    selected: list
    method: str
    worst_case: float
    argmax_dw: float
    factor: float
    grid: dict  # {"points": int, "min": float, "max": float}
    seed: int | None = None
    c_star: float | None = None
    g_star: float | None = None
    version: str = __version__
    created_at: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        self.selected = sorted(int(i) for i in self.selected)
        if len(set(self.selected)) != self.m:
            raise ValueError("selected indices must be unique and match m")
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()

    def to_json_dict(self) -> dict:
        doc = asdict(self)
        doc["worst_case"] = encode_value(self.worst_case)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SelectionRecord":
        doc = dict(doc)
        doc["worst_case"] = decode_value(doc["worst_case"])
        return cls(**doc)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "SelectionRecord":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def write_csv(path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: encode_value(v) if isinstance(v, float) else v
                             for k, v in row.items()})


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))

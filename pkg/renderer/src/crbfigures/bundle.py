"""Reading and validating figure data bundles.

A bundle is a directory with a ``manifest.json`` naming the figure, the
kind of data, and the CSV files to draw. Pattern files carry one 0/1
selection string per method; curve files carry per-method mean/min/max of
the worst-case bound against an array- or selection-size axis. Values are
used verbatim; this package never recomputes bounds.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

PATTERN_COLUMNS = ["method", "n", "m", "pattern"]
CURVE_COLUMNS = ["x", "method", "mean", "min", "max"]


class BundleError(ValueError):
    """The bundle directory does not match the expected schema."""


@dataclass(frozen=True)
class PatternTable:
    name: str
    n: int
    m: int
    rows: list  # (method, pattern string) in file order


@dataclass(frozen=True)
class CurvePoint:
    x: float
    method: str
    mean: float
    low: float
    high: float


@dataclass(frozen=True)
class FigureBundle:
    figure: str
    kind: str
    x_label: str | None
    patterns: list
    curves: list

    @property
    def methods(self) -> list:
        seen = []
        source = ([m for t in self.patterns for m, _ in t.rows]
                  if self.kind == "patterns" else
                  [c.method for c in self.curves])
        for method in source:
            if method not in seen:
                seen.append(method)
        return seen


def _number(text: str, where: str) -> float:
    if text == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise BundleError(f"non-numeric cell {text!r} in {where}") from None


def _read_rows(path: Path, columns: list) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != columns:
            raise BundleError(
                f"{path.name}: expected columns {columns}, got {reader.fieldnames}")
        return list(reader)


def _load_pattern_file(path: Path) -> PatternTable:
    rows = _read_rows(path, PATTERN_COLUMNS)
    if not rows:
        raise BundleError(f"{path.name}: no pattern rows")
    n = int(rows[0]["n"])
    m = int(rows[0]["m"])
    parsed = []
    for i, row in enumerate(rows, start=2):  # header is line 1
        pattern = row["pattern"]
        if int(row["n"]) != n or int(row["m"]) != m:
            raise BundleError(f"{path.name} line {i}: mixed (n, m) in one file")
        if len(pattern) != n:
            raise BundleError(
                f"{path.name} line {i}: pattern length {len(pattern)} != n={n}")
        if set(pattern) - {"0", "1"}:
            raise BundleError(f"{path.name} line {i}: pattern must be 0/1")
        parsed.append((row["method"], pattern))
    return PatternTable(name=path.name, n=n, m=m, rows=parsed)


def _load_curve_file(path: Path) -> list:
    rows = _read_rows(path, CURVE_COLUMNS)
    if not rows:
        raise BundleError(f"{path.name}: no curve rows")
    points = []
    for i, row in enumerate(rows, start=2):
        where = f"{path.name} line {i}"
        points.append(CurvePoint(
            x=_number(row["x"], where),
            method=row["method"],
            mean=_number(row["mean"], where),
            low=_number(row["min"], where),
            high=_number(row["max"], where),
        ))
    return points


def load_bundle(directory) -> FigureBundle:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise BundleError(f"no manifest.json in {directory}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise BundleError(f"manifest.json is not valid JSON: {exc}") from None
    for key in ("figure", "kind", "files"):
        if key not in manifest:
            raise BundleError(f"manifest.json lacks {key!r}")
    kind = manifest["kind"]
    if kind not in ("patterns", "curves"):
        raise BundleError(f"unknown bundle kind {kind!r}")
    if not manifest["files"]:
        raise BundleError("manifest lists no files")
    paths = []
    for name in manifest["files"]:
        path = directory / name
        if not path.is_file():
            raise BundleError(f"manifest references missing file {name}")
        paths.append(path)
    patterns, curves = [], []
    if kind == "patterns":
        patterns = [_load_pattern_file(p) for p in paths]
    else:
        for p in paths:
            curves.extend(_load_curve_file(p))
    return FigureBundle(
        figure=str(manifest["figure"]),
        kind=kind,
        x_label=manifest.get("x"),
        patterns=patterns,
        curves=curves,
    )

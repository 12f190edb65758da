"""Command-line harness: select / evaluate / baseline / sweep / figure-data.

Angles on the command line are radians by default and accept ``deg`` or
``rad`` suffixes (``--grid-min 10deg``). Records are JSON, tables CSV;
see records.py for the schemas. Exit codes: 0 success, 2 invalid
configuration or malformed input, 3 solver failure, 4 infeasible.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import edge_selection, exhaustive_best, random_selection
from .crb import CrbParams, crb_over_grid, worst_case_crb
from .model import ArrayGeometry, DeltaGrid, Selection, make_default_grid, make_ula
from .records import (
    CURVE_COLUMNS,
    EVALUATE_COLUMNS,
    PATTERN_COLUMNS,
    SWEEP_COLUMNS,
    SelectionRecord,
    write_csv,
)
from .relaxation import SolverConfig, build_relaxation, solve_relaxation
from .rounding import RoundingConfig, round_selection

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INFEASIBLE = 4

FIGURE1_PAIRS = [(128, 32), (64, 16), (32, 8), (16, 4), (8, 4)]
FIGURE3A_SIZES = [8, 16, 32, 64, 128]
FIGURE3B_SIZES = [4, 8, 16, 32, 64]


class ConfigError(ValueError):
    pass


def parse_angle(text: str) -> float:
    """Radians, with optional 'deg'/'rad' suffix."""
    text = text.strip().lower()
    if text.endswith("deg"):
        return math.radians(float(text[:-3]))
    if text.endswith("rad"):
        return float(text[:-3])
    return float(text)


@dataclass
class RunConfig:
    """Validated harness inputs; angles already in radians."""

    n: int
    m: int
    positions: list[float] | None = None
    grid_points: int = 128
    grid_min: float | None = None  # None = 1.772/N
    grid_max: float = math.pi
    factor: float = 1.0
    trials: int = 100
    seed: int = 0
    out: str | None = None

    def geometry(self) -> ArrayGeometry:
        if self.positions is not None:
            return ArrayGeometry(np.asarray(self.positions, dtype=float))
        return make_ula(self.n)

    def grid(self, geometry: ArrayGeometry) -> DeltaGrid:
        return make_default_grid(geometry, self.grid_points,
                                 min_dw=self.grid_min, max_dw=self.grid_max)

    def params(self) -> CrbParams:
        return CrbParams.from_factor(self.factor)

    def grid_descriptor(self, grid: DeltaGrid) -> dict:
        return {"points": grid.size,
                "min": float(grid.points[0]),
                "max": float(grid.points[-1])}


def _config_from_args(args) -> RunConfig:
    positions = None
    n = args.n
    if getattr(args, "positions", None):
        positions = [float(tok) for tok in args.positions.split(",")]
        if n is not None and n != len(positions):
            raise ConfigError("--n disagrees with the number of --positions")
        n = len(positions)
    if n is None:
        raise ConfigError("--n (or --positions) is required")
    m = getattr(args, "m", None)
    return RunConfig(
        n=n,
        m=m if m is not None else 0,
        positions=positions,
        grid_points=args.grid_points,
        grid_min=parse_angle(args.grid_min) if args.grid_min else None,
        grid_max=parse_angle(args.grid_max),
        factor=args.factor,
        trials=getattr(args, "trials", 100),
        seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None),
    )


def _solver_config() -> SolverConfig:
    verbose = os.environ.get("CRBSELECT_SOLVER_VERBOSE", "") not in ("", "0")
    return SolverConfig(verbose=verbose)


def run_proposed(geometry: ArrayGeometry, m: int, grid: DeltaGrid,
                 params: CrbParams, trials: int, seed: int):
    """Full pipeline: relax, solve, round (with top-m hedge).

    Returns (selection, worst_case, argmax_dw, relaxation_result).
    Raises ConfigError upstream; solver outcomes are the caller's to map.
    """
    problem = build_relaxation(geometry, m, grid)
    result = solve_relaxation(problem, _solver_config())
    if not result.usable:
        return None, math.inf, math.nan, result
    rounded = round_selection(result.relaxed, geometry, grid, params,
                              RoundingConfig(trials=trials, seed=seed))
    return rounded.selection, rounded.worst_case, rounded.argmax_dw, result


def _print_selection(selection: Selection) -> None:
    print(selection.pattern("1", "0"))
    print(selection.pattern())


def cmd_select(args) -> int:
    cfg = _config_from_args(args)
    if cfg.m < 2:
        raise ConfigError("select needs --m >= 2")
    geometry = cfg.geometry()
    grid = cfg.grid(geometry)
    params = cfg.params()
    selection, wc, dw, result = run_proposed(geometry, cfg.m, grid, params,
                                             cfg.trials, cfg.seed)
    if selection is None:
        print(f"relaxation failed: {result.status} ({result.solver_status})",
              file=sys.stderr)
        return EXIT_INFEASIBLE if result.status == "infeasible" else EXIT_SOLVER
    _print_selection(selection)
    print(f"worst_case={wc!r} argmax_dw={dw!r} c_star={result.c_star!r} "
          f"status={result.status}")
    record = SelectionRecord(
        n=geometry.size, m=cfg.m,
        positions=geometry.positions.tolist(),
        selected=selection.indices.tolist(),
        method="proposed",
        worst_case=wc, argmax_dw=dw, factor=cfg.factor,
        grid=cfg.grid_descriptor(grid), seed=cfg.seed,
        c_star=result.c_star, g_star=result.g_star,
    )
    if cfg.out:
        record.write(cfg.out)
    else:
        json.dump(record.to_json_dict(), sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def cmd_baseline(args) -> int:
    cfg = _config_from_args(args)
    geometry = cfg.geometry()
    grid = cfg.grid(geometry)
    params = cfg.params()
    if args.method == "edge":
        selection = edge_selection(geometry.size, cfg.m)
    elif args.method == "random":
        selection = random_selection(geometry.size, cfg.m, cfg.seed)
    else:
        selection, _ = exhaustive_best(geometry, cfg.m, grid, params)
    wc, dw = worst_case_crb(geometry, selection, grid, params)
    _print_selection(selection)
    print(f"worst_case={wc!r} argmax_dw={dw!r}")
    record = SelectionRecord(
        n=geometry.size, m=cfg.m,
        positions=geometry.positions.tolist(),
        selected=selection.indices.tolist(),
        method=args.method,
        worst_case=wc, argmax_dw=dw, factor=cfg.factor,
        grid=cfg.grid_descriptor(grid),
        seed=cfg.seed if args.method == "random" else None,
    )
    if cfg.out:
        record.write(cfg.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        record = SelectionRecord.read(args.selection)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"cannot read selection file {args.selection}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    geometry = ArrayGeometry(np.asarray(record.positions, dtype=float))
    selection = Selection.from_indices(geometry.size, record.selected)
    points = args.grid_points or record.grid["points"]
    gmin = parse_angle(args.grid_min) if args.grid_min else record.grid["min"]
    gmax = parse_angle(args.grid_max) if args.grid_max else record.grid["max"]
    grid = DeltaGrid(np.linspace(gmin, gmax, points))
    factor = args.factor if args.factor is not None else record.factor
    params = CrbParams.from_factor(factor)
    values = crb_over_grid(geometry, selection, grid, params)
    rows = [{"delta_omega": float(dw), "crb": float(v)}
            for dw, v in zip(grid.points, values)]
    if args.out:
        write_csv(args.out, EVALUATE_COLUMNS, rows)
    i = int(np.argmax(values))
    print(f"worst_case={float(values[i])!r} argmax_dw={float(grid.points[i])!r}")
    return EXIT_OK


def _sweep_rows(pairs, methods, factor, trials, seed, grid_points, random_seeds):
    rows = []
    for n, m in pairs:
        geometry = make_ula(n)
        grid = make_default_grid(geometry, grid_points)
        params = CrbParams.from_factor(factor)
        for method in methods:
            if method == "proposed":
                selection, wc, dw, result = run_proposed(
                    geometry, m, grid, params, trials, seed)
                if selection is None:
                    raise RuntimeError(
                        f"relaxation failed at N={n}, M={m}: {result.status}")
                rows.append({"N": n, "M": m, "method": method, "seed": seed,
                             "worst_case_crb": wc, "argmax_dw": dw})
            elif method == "edge":
                wc, dw = worst_case_crb(geometry, edge_selection(n, m), grid, params)
                rows.append({"N": n, "M": m, "method": method, "seed": 0,
                             "worst_case_crb": wc, "argmax_dw": dw})
            elif method == "random":
                for k in range(random_seeds):
                    sel = random_selection(n, m, seed + k)
                    wc, dw = worst_case_crb(geometry, sel, grid, params)
                    rows.append({"N": n, "M": m, "method": method, "seed": seed + k,
                                 "worst_case_crb": wc, "argmax_dw": dw})
            else:
                raise ConfigError(f"unknown sweep method {method!r}")
    rows.sort(key=lambda r: (r["N"], r["M"], r["method"], r["seed"]))
    return rows


def cmd_sweep(args) -> int:
    values = [int(tok) for tok in args.values.split(",") if tok.strip()]
    if not values:
        raise ConfigError("--values must list at least one size")
    methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
    if args.vary == "n":
        if args.m_rule == "quarter":
            pairs = [(n, n // 4) for n in values]
        else:
            if args.m is None:
                raise ConfigError("--m-rule fixed needs --m")
            pairs = [(n, args.m) for n in values]
    else:
        if args.n is None:
            raise ConfigError("--vary m needs --n")
        pairs = [(args.n, m) for m in values]
    for n, m in pairs:
        if m < 2 or m > n:
            raise ConfigError(f"selection size {m} invalid for N={n}")
    rows = _sweep_rows(pairs, methods, args.factor, args.trials, args.seed,
                       args.grid_points, args.random_seeds)
    write_csv(args.out, SWEEP_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _pattern_rows(n: int, m: int, grid_min, grid_points, factor, trials, seed):
    geometry = make_ula(n)
    grid = make_default_grid(geometry, grid_points, min_dw=grid_min)
    params = CrbParams.from_factor(factor)
    edge = edge_selection(n, m)
    proposed, wc, dw, result = run_proposed(geometry, m, grid, params, trials, seed)
    if proposed is None:
        raise RuntimeError(f"relaxation failed at N={n}, M={m}: {result.status}")
    return [
        {"method": "edge", "n": n, "m": m, "pattern": edge.pattern("1", "0")},
        {"method": "proposed", "n": n, "m": m, "pattern": proposed.pattern("1", "0")},
    ]


def _aggregate_curves(rows, x_key):
    table = {}
    for row in rows:
        key = (row[x_key], row["method"])
        table.setdefault(key, []).append(row["worst_case_crb"])
    out = []
    for (x, method), vals in sorted(table.items()):
        out.append({"x": x, "method": method,
                    "mean": float(np.mean(vals)),
                    "min": float(np.min(vals)),
                    "max": float(np.max(vals))})
    return out


def cmd_figure_data(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"figure": args.figure, "files": []}
    if args.figure == "1":
        manifest["kind"] = "patterns"
        for n, m in FIGURE1_PAIRS:
            rows = _pattern_rows(n, m, None, args.grid_points, args.factor,
                                 args.trials, args.seed)
            name = f"patterns_{n}x{m}.csv"
            write_csv(out_dir / name, PATTERN_COLUMNS, rows)
            manifest["files"].append(name)
    elif args.figure == "2":
        manifest["kind"] = "patterns"
        rows = _pattern_rows(64, 16, math.pi / 18, args.grid_points, args.factor,
                             args.trials, args.seed)
        name = "patterns_64x16_min10deg.csv"
        write_csv(out_dir / name, PATTERN_COLUMNS, rows)
        manifest["files"].append(name)
    elif args.figure in ("3a", "3b"):
        manifest["kind"] = "curves"
        if args.figure == "3a":
            pairs = [(n, n // 4) for n in FIGURE3A_SIZES]
            manifest["x"] = "N"
        else:
            pairs = [(128, m) for m in FIGURE3B_SIZES]
            manifest["x"] = "M"
        rows = _sweep_rows(pairs, ["proposed", "edge", "random"], args.factor,
                           args.trials, args.seed, args.grid_points,
                           args.random_seeds)
        raw_name = f"sweep_{args.figure}.csv"
        write_csv(out_dir / raw_name, SWEEP_COLUMNS, rows)
        x_key = manifest["x"]
        curves = _aggregate_curves(rows, x_key)
        curve_name = f"curves_{args.figure}.csv"
        write_csv(out_dir / curve_name, CURVE_COLUMNS, curves)
        manifest["files"] = [curve_name]
        manifest["raw"] = [raw_name]
    else:
        raise ConfigError(f"unknown figure id {args.figure!r}")
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote figure {args.figure} bundle to {out_dir}")
    return EXIT_OK


def _add_common(parser, with_m=True, with_trials=False):
    parser.add_argument("--n", type=int, default=None, help="candidate array size")
    if with_m:
        parser.add_argument("--m", type=int, default=None, help="sensors to select")
    parser.add_argument("--positions", default=None,
                        help="comma-separated explicit positions (non-uniform array)")
    parser.add_argument("--grid-points", type=int, default=128)
    parser.add_argument("--grid-min", default=None,
                        help="smallest separation (default 1.772/N); accepts deg/rad suffix")
    parser.add_argument("--grid-max", default="180deg",
                        help="largest separation; accepts deg/rad suffix")
    parser.add_argument("--factor", type=float, default=1.0,
                        help="noise/snapshot scale sigma^2/(2T)")
    if with_trials:
        parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crbselect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="optimize a selection of m sensors")
    _add_common(p, with_trials=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("baseline", help="evaluate a reference selection")
    p.add_argument("--method", choices=["edge", "random", "exhaustive"], required=True)
    _add_common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="per-separation bound of a stored selection")
    p.add_argument("--selection", required=True, help="selection record JSON")
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--grid-min", default=None)
    p.add_argument("--grid-max", default=None)
    p.add_argument("--factor", type=float, default=None)
    p.add_argument("--out", default=None, help="per-separation CSV path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="compare methods across sizes")
    p.add_argument("--vary", choices=["n", "m"], required=True)
    p.add_argument("--values", required=True, help="comma-separated sizes")
    p.add_argument("--m-rule", choices=["quarter", "fixed"], default="quarter")
    p.add_argument("--methods", default="proposed,edge,random")
    p.add_argument("--random-seeds", type=int, default=100)
    _add_common(p, with_trials=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure-data", help="emit the data bundle behind a figure")
    p.add_argument("--figure", required=True, help="1, 2, 3a, or 3b")
    p.add_argument("--grid-points", type=int, default=128)
    p.add_argument("--factor", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-seeds", type=int, default=100)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_figure_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

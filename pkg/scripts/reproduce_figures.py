#!/usr/bin/env python3
"""Regenerate every figure data bundle (selection patterns and worst-case
curves) into out/figures/, then render PNGs if the renderer package is on
the path.

Usage: python scripts/reproduce_figures.py [--out DIR] [--seed S]
"""

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from crbselect.cli import main as crbselect_main

FIGURES = ["1", "2", "3a", "3b"]


def run(argv):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/figures")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=100)
    args = parser.parse_args(argv)

    base = Path(args.out)
    for figure in FIGURES:
        bundle_dir = base / f"fig{figure}"
        print(f"== figure {figure} -> {bundle_dir}")
        code = crbselect_main([
            "figure-data", "--figure", figure,
            "--seed", str(args.seed), "--trials", str(args.trials),
            "--out", str(bundle_dir),
        ])
        if code != 0:
            return code

    if shutil.which("render") is None:
        print("renderer not installed; bundles written, skipping images")
        return 0
    for figure in FIGURES:
        bundle_dir = base / f"fig{figure}"
        image = base / f"fig{figure}.png"
        print(f"== render {figure} -> {image}")
        proc = subprocess.run(["render", "--figure", figure,
                               "--in", str(bundle_dir), "--out", str(image)])
        if proc.returncode != 0:
            return proc.returncode
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))

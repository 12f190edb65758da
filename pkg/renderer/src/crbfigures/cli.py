"""Command line: render --figure 1 --in BUNDLE_DIR --out fig1.png"""

from __future__ import annotations

import argparse
import sys

from .bundle import BundleError, load_bundle
from .render import render_bundle


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render", description=__doc__)
    parser.add_argument("--figure", required=True,
                        help="figure id the bundle must carry (1, 2, 3a, 3b)")
    parser.add_argument("--in", dest="bundle_dir", required=True,
                        help="bundle directory with manifest.json")
    parser.add_argument("--out", required=True, help="output image path")
    scale = parser.add_mutually_exclusive_group()
    scale.add_argument("--log-scale", dest="log_scale", action="store_true",
                       default=True)
    scale.add_argument("--linear", dest="log_scale", action="store_false")
    args = parser.parse_args(argv)
    try:
        bundle = load_bundle(args.bundle_dir)
        if bundle.figure != args.figure:
            raise BundleError(
                f"bundle is for figure {bundle.figure!r}, not {args.figure!r}")
        render_bundle(bundle, args.out, log_scale=args.log_scale)
    except BundleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line: profile pretrained classifiers under bit-flip corruption.

    profiler --models digits_mlp --dataset digits \
             --ber-grid 1e-6,1e-4,1e-2,0.5 --samples 797 --seed 0 \
             --out profiles.json

Exit codes: 0 success, 1 spec/resolution error.
"""

from __future__ import annotations

import argparse
import sys

from .datasets import DatasetResolutionError
from .models import ModelResolutionError
from .profiler import DEFAULT_BER_GRID, ProfilerSpec, estimate_curve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="profiler",
        description="Estimate accuracy-vs-BER reliability profiles",
    )
    parser.add_argument("--models", default="digits_mlp",
                        help="comma-separated model names")
    parser.add_argument("--dataset", default="digits")
    parser.add_argument("--ber-grid", default=None,
                        help="comma-separated BER knots (default: log grid to 0.5)")
    parser.add_argument("--samples", type=int, default=1000,
                        help="validation samples per BER knot")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="profile JSON output path")
    parser.add_argument("--cache-dir", default=None,
                        help="cache directory for locally prepared models")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.ber_grid is not None:
            grid = tuple(float(x) for x in args.ber_grid.split(",") if x.strip())
        else:
            grid = DEFAULT_BER_GRID
        spec = ProfilerSpec(
            models=tuple(m.strip() for m in args.models.split(",") if m.strip()),
            dataset=args.dataset,
            ber_grid=grid,
            samples=args.samples,
            seed=args.seed,
            out_path=args.out,
            cache_dir=args.cache_dir,
        )
        _, reports = estimate_curve(spec)
    except (ValueError, ModelResolutionError, DatasetResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for rep in reports:
        print(f"{rep.name}: clean accuracy {rep.clean_accuracy:.4f} "
              f"({rep.n_samples} samples, {rep.flops:.3g} FLOPs/batch)")
        for knot in rep.knots:
            print(f"  ber {knot.ber:10.3e} -> accuracy {knot.accuracy:.4f} "
                  f"+/- {knot.stderr:.4f}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands:
  run                one simulation -> trace.csv + summary.json
  sweep              constraint grids -> gearr.csv (and tradeoff.csv with a
                     V grid; the trade-off table fixes the first --f-th)
  validate-profiles  check a reliability profile file

Exit codes: 0 success, 1 config/validation error, 2 runtime error. When
--out is omitted, a timestamped directory is created under
$GEARRSIM_OUT_ROOT. Every invocation echoes its effective config and a
manifest into the output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config_file, write_effective_config
from .reliability import ProfileError, load_catalog
from .sim import (
    run as run_sim,
    sweep_gearr,
    sweep_tradeoff,
    write_rows_csv,
    write_summary_json,
    write_trace_csv,
)

OUT_ROOT_ENV = "GEARRSIM_OUT_ROOT"


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected comma-separated decimals, got {text!r}") from exc
    if not values:
        raise ConfigError(f"{flag}: empty list")
    return values


def _parse_int_list(text: str, flag: str) -> list[int]:
    return [int(v) for v in _parse_float_list(text, flag)]


def _resolve_out_dir(out: str | None, command: str) -> Path:
    if out is not None:
        path = Path(out)
    else:
        root = os.environ.get(OUT_ROOT_ENV)
        if root is None:
            raise ConfigError(
                f"--out not given and {OUT_ROOT_ENV} is not set"
            )
        stamp = time.strftime("%Y%m%d-%H%M%S")
        path = Path(root) / f"{command}-{stamp}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(out_dir: Path, command: str, seeds: list[int], extra: dict | None = None) -> None:
    doc = {
        "artifact": "gearrsim",
        "version": __version__,
        "command": command,
        "seeds": seeds,
        "argv": sys.argv[1:],
    }
    if extra:
        doc.update(extra)
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


def cmd_run(args) -> int:
    cfg, effective = load_config_file(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
        effective["sim"]["seed"] = args.seed
    out_dir = _resolve_out_dir(args.out, "run")
    summary, trace = run_sim(cfg)
    write_trace_csv(trace, out_dir / "trace.csv")
    write_summary_json(summary, out_dir / "summary.json")
    write_effective_config(effective, out_dir / "effective_config.yaml")
    _write_manifest(out_dir, "run", [cfg.seed])
    status = "stable" if summary.stable else "UNSTABLE"
    print(
        f"run: {cfg.horizon_slots} slots, seed {cfg.seed} [{status}] -> {out_dir}\n"
        f"  avg arrivals     {summary.avg_a_d_bits:.4g} bits/slot\n"
        f"  goal-effect.     {summary.avg_gamma_g:.4f}\n"
        f"  avg compute      {summary.avg_f_flops / 1e12:.4f} TFLOPS\n"
        f"  queueing delay   "
        + (f"{summary.avg_delay_q_s * 1e3:.2f} ms" if summary.avg_delay_q_s is not None else "n/a (no traffic)")
    )
    return 0


def cmd_sweep(args) -> int:
    cfg, effective = load_config_file(args.config)
    gamma_grid = _parse_float_list(args.gamma_th, "--gamma-th")
    if args.f_th is not None:
        f_grid = [f * 1e12 for f in _parse_float_list(args.f_th, "--f-th")]
    else:
        f_grid = [cfg.policy.f_th_flops]
    seeds = _parse_int_list(args.seeds, "--seeds") if args.seeds else [cfg.seed]
    out_dir = _resolve_out_dir(args.out, "sweep")

    gearr_rows = sweep_gearr(
        cfg, gamma_grid, f_grid, seeds=seeds,
        include_baseline=args.baseline, jobs=args.jobs,
    )
    write_rows_csv(gearr_rows, out_dir / "gearr.csv")
    written = ["gearr.csv"]

    if args.v_grid is not None:
        v_grid = _parse_float_list(args.v_grid, "--v-grid")
        base = replace(cfg, policy=replace(cfg.policy, f_th_flops=f_grid[0]))
        tradeoff_rows = sweep_tradeoff(base, v_grid, gamma_grid, seeds=seeds, jobs=args.jobs)
        write_rows_csv(tradeoff_rows, out_dir / "tradeoff.csv")
        written.append("tradeoff.csv")

    write_effective_config(effective, out_dir / "effective_config.yaml")
    _write_manifest(out_dir, "sweep", seeds, {
        "gamma_th_grid": gamma_grid,
        "f_th_flops_grid": f_grid,
        "baseline": bool(args.baseline),
    })
    print(f"sweep: wrote {', '.join(written)} -> {out_dir}")
    return 0


def cmd_validate_profiles(args) -> int:
    catalog = load_catalog(args.path)
    for profile in catalog.profiles:
        bers = [b for b, _ in profile.curve]
        accs = [a for _, a in profile.curve]
        print(
            f"{profile.model_name}: {len(profile.curve)} knots, "
            f"{profile.omega_flops / 1e9:.4g} GFLOPs, "
            f"ber [{bers[0]:.3g}, {bers[-1]:.3g}], "
            f"accuracy [{min(accs):.4f}, {max(accs):.4f}]"
        )
    print(f"ok: {len(catalog)} model profile(s) valid")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gearrsim",
        description="Goal-oriented/data-oriented spectrum-sharing simulator",
    )
    parser.add_argument("--version", action="version", version=f"gearrsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one run")
    p_run.add_argument("--config", required=True, help="YAML config file")
    p_run.add_argument("--seed", type=int, default=None, help="override sim.seed")
    p_run.add_argument("--out", default=None, help=f"output directory (default: under ${OUT_ROOT_ENV})")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="constraint-grid sweeps")
    p_sweep.add_argument("--config", required=True, help="YAML config file")
    p_sweep.add_argument("--gamma-th", required=True, help="comma-separated goal-effectiveness targets")
    p_sweep.add_argument("--f-th", default=None, help="comma-separated compute budgets (TFLOPS)")
    p_sweep.add_argument("--v-grid", default=None, help="comma-separated V values (Mbit) for the trade-off table")
    p_sweep.add_argument("--seeds", default=None, help="comma-separated seeds")
    p_sweep.add_argument("--baseline", action="store_true", help="also emit static-baseline rows")
    p_sweep.add_argument("--out", default=None, help=f"output directory (default: under ${OUT_ROOT_ENV})")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate-profiles", help="validate a reliability profile file")
    p_val.add_argument("path", help="profile JSON file")
    p_val.set_defaults(func=cmd_validate_profiles)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ProfileError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

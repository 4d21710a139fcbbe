"""Command-line entry point: ``rcr run --config exp.json [--mode ...]``.

Exit status: 0 on success, 1 if any grid cell (or theory check) failed,
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .data import DataError, encode_abalone
from .experiment import (
    MODES,
    ConfigError,
    ExperimentConfig,
    emit_results,
    emit_verification,
    run_experiment,
    run_increasing_n,
    run_theory_verification,
)

log = logging.getLogger("rcr")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rcr", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid or the theory checks")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--mode", choices=MODES, help="override the config's mode")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--out", type=Path, help="override output_dir")
    run.add_argument("--jobs", type=int, help="worker processes (default: $RCR_JOBS or 1)")
    run.add_argument("--no-figures", action="store_true", help="skip PNG figures")

    prep = sub.add_parser("prepare-abalone", help="one-hot encode the raw Abalone file")
    prep.add_argument("src", type=Path)
    prep.add_argument("dst", type=Path)
    return p


def _print_table(rows, stream=None):
    stream = stream or sys.stdout
    for r in rows:
        frac = f" frac={r['fraction']:g}" if "fraction" in r else ""

        def fmt(k):
            v = r.get(k)
            return "  -  " if v is None else f"{v:.4g}"

        print(
            f"{r['dataset']:>10} {r['loss_kind']:>8}{frac} c={r['cost']:<6} sup={fmt('sup')} "
            f"rcr={fmt('rcr_loss')} al={fmt('al')} rl={fmt('rl')} rej={fmt('rej')} "
            f"ar={fmt('ar')} ra={fmt('ra')} fail={r['failures']}",
            file=stream,
        )


def cmd_run(args) -> int:
    try:
        cfg = ExperimentConfig.load(args.config)
        overrides = {}
        if args.mode:
            overrides["mode"] = args.mode
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.out:
            overrides["output_dir"] = str(args.out)
        if args.no_figures:
            overrides["figures"] = False
        if overrides:
            cfg = replace(cfg, **overrides)
            cfg.validate()
    except (ConfigError, DataError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.output_dir)

    if cfg.mode == "verify-theory":
        try:
            report = run_theory_verification(cfg)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        paths = emit_verification(report, out, cfg)
        if cfg.figures and report.regret_results:
            from .plotting import plot_regret

            paths += plot_regret(report.regret_results, out)
        for c in report.checks:
            status = "PASS" if c.ok else "FAIL"
            detail = f" ({c.detail})" if c.detail else ""
            print(f"{status} {c.name}: {c.passed}/{c.total}{detail}")
        print(f"wrote {', '.join(str(p) for p in paths)}")
        return 0 if report.ok else 1

    try:
        if cfg.mode == "increasing-n":
            table = run_increasing_n(cfg, args.jobs)
        else:
            table = run_experiment(cfg, args.jobs)
    except (ConfigError, DataError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    paths = emit_results(table, out, cfg=cfg)
    rows = [r.flat() for r in table.rows]
    if cfg.figures and rows:
        from . import plotting

        plot = plotting.plot_increasing_n if cfg.mode == "increasing-n" else plotting.plot_cost_curves
        paths += plot(rows, out)
    _print_table(rows)
    for f in table.failures:
        print(f"cell failed: {f.cell}: {f.error}", file=sys.stderr)
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return 1 if table.failures else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "prepare-abalone":
        try:
            print(encode_abalone(args.src, args.dst))
        except (OSError, DataError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())

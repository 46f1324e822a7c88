"""Command-line front end.

Subcommands:

    evolve   CONFIG   run one evolution scenario from a flat config file
    verify   CONFIG   check one comparison candidate from a config file
    converge CONFIG   refinement study driven by an evolve config
    repro    SUITE    run a canned scenario suite from the catalog

Shared flags: ``--out DIR`` (artifact root; overrides the config's out_dir),
``--snapshots K`` (cap on persisted snapshot files, first and last always
kept), ``--quiet``.

Exit status: 0 when every enabled check passed, 1 when a check failed or the
evolution broke down numerically, 2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .catalog import SUITES
from .config import EvolveConfig, ScenarioConfig, VerifyConfig, parse_config
from .errors import NumericalFailure, ObstacleFlowError, UsageError
from .runner import DEFAULT_SNAPSHOT_CAP, run_config, run_converge, run_repro

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstaclemcf",
        description="Obstacle-constrained level-set curvature flow: solvers and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    specs = [
        ("evolve", "run one evolution scenario"),
        ("verify", "verify one comparison candidate"),
        ("converge", "grid refinement study for an evolve config"),
        ("repro", "run a canned scenario suite"),
    ]
    for name, blurb in specs:
        s = sub.add_parser(name, help=blurb)
        if name == "repro":
            s.add_argument("suite", help="suite name (one of: %s)" % ", ".join(sorted(SUITES)))
        else:
            s.add_argument("config", help="flat key=value config file")
        s.add_argument("--out", default=None,
                       help="artifact root directory (default: the config's out_dir)")
        s.add_argument("--snapshots", type=int, default=DEFAULT_SNAPSHOT_CAP,
                       help="max snapshot files to keep per run (default %(default)s)")
        s.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def _load(path: str) -> ScenarioConfig:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file not found: {p}")
    return parse_config(p.read_text())


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "repro":
            out = args.out if args.out is not None else "runs"
            reports = run_repro(args.suite, out, args.snapshots, args.quiet)
        else:
            cfg = _load(args.config)
            name = Path(args.config).stem
            out = args.out if args.out is not None else cfg.out_dir
            if args.command == "converge":
                if not isinstance(cfg, EvolveConfig):
                    raise UsageError("converge needs an evolve config (solver = ...)")
                reports = [run_converge(cfg, name, out, args.snapshots, args.quiet)]
            elif args.command == "verify":
                if not isinstance(cfg, VerifyConfig):
                    raise UsageError("verify needs a candidate config (candidate = ...)")
                reports = [run_config(cfg, name, out, args.snapshots, args.quiet)]
            else:
                if not isinstance(cfg, EvolveConfig):
                    raise UsageError("evolve needs an evolve config (solver = ...)")
                reports = [run_config(cfg, name, out, args.snapshots, args.quiet)]
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except ObstacleFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    failed = [r.scenario for r in reports if not r.passed]
    if not args.quiet:
        n_checks = sum(len(r.checks) for r in reports)
        if failed:
            print(f"FAIL: {len(failed)}/{len(reports)} runs failed checks: {', '.join(failed)}")
        else:
            print(f"ok: {len(reports)} run(s), {n_checks} check(s)")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())

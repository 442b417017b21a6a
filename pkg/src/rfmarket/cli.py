"""Command-line entry point: ``rfmarket {solve,sweep,verify,compare}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import SCHEMES, load_config
from .errors import ConfigError, RFMarketError
from .harness import emit_ic_profile, run_comparison, sweep, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_FEASIBILITY = 0, 2, 3, 4

log = logging.getLogger("rfmarket")


def _exit_code(exc_or_name) -> int:
    name = exc_or_name if isinstance(exc_or_name, str) else type(exc_or_name).__name__
    if name in ("FeasibilityError", "MonotonicityError"):
        return EXIT_FEASIBILITY
    if name in ("ConvergenceError", "BracketError"):
        return EXIT_SOLVER
    if name in ("ConfigError", "EnumerationCapError", "DomainError"):
        return EXIT_CONFIG
    return EXIT_SOLVER


def _common(p):
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--seed", type=int, help="override the scenario seed (unsigned 64-bit)")
    p.add_argument("--mc-draws", type=int, dest="mc_draws", help="Monte Carlo realizations")
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=None,
                   help="also compute exact composition expectations")
    p.add_argument("--timings", action="store_true", help="record runtimes (output no longer reproducible)")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfmarket", description="Solve and compare incentive mechanisms for an RF energy trading market."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one scheme")
    p.add_argument("scheme", choices=SCHEMES)
    _common(p)

    p = sub.add_parser("sweep", help="compare schemes across gamma or N")
    p.add_argument("--param", choices=("gamma", "n"), required=True)
    p.add_argument("--values", type=_float_list, required=True)
    p.add_argument("--schemes", default="all")
    _common(p)

    p = sub.add_parser("verify", help="feasibility checks")
    p.add_argument("check", choices=("ic",))
    p.add_argument("--probes", type=_int_list, required=True, help="1-based type indices")
    _common(p)

    p = sub.add_parser("compare", help="compare schemes on one scenario")
    p.add_argument("--schemes", default="all")
    _common(p)
    return parser


def _schemes(text):
    if text == "all":
        return list(SCHEMES)
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in SCHEMES]
    if bad or not names:
        raise ConfigError(f"unknown schemes {bad}; choose from {', '.join(SCHEMES)} or 'all'")
    return names


def _load(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        changes["seed"] = args.seed
    if args.mc_draws is not None:
        changes["mc_draws"] = args.mc_draws
    if args.exact is not None:
        changes["exact"] = args.exact
    return cfg.with_(**changes) if changes else cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    out = args.out or sys.stdout
    try:
        cfg = _load(args)
        if args.command == "verify":
            rows = emit_ic_profile(cfg, args.probes)
        elif args.command == "solve":
            rows = run_comparison(cfg, [args.scheme])
        elif args.command == "compare":
            rows = run_comparison(cfg, _schemes(args.schemes))
        else:
            rows = sweep(cfg, args.param, args.values, _schemes(args.schemes))
    except (RFMarketError, TypeError, ValueError) as exc:
        log.error("error: %s", exc)
        return _exit_code(exc) if isinstance(exc, RFMarketError) else EXIT_CONFIG
    write_csv(rows, out, timings=args.timings)
    failed = [r for r in rows if getattr(r, "status", "ok") != "ok"]
    for r in failed:
        log.error("%s: %s: %s", r.scheme, r.status, r.message)
    if failed:
        return max(_exit_code(r.status) for r in failed)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

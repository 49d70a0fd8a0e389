"""Command line entry point: ``tmnn run SPEC [options]``.

Exit codes: 0 success, 1 configuration error, 2 runtime or numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, parse_spec
from .experiment import run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tmnn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment specification")
    run.add_argument("spec", help="path to a 'section.key = value' spec file")
    run.add_argument("--output-dir", help="overrides output.dir from the spec")
    run.add_argument("--threads", type=int, default=1, help="solvers run concurrently (default 1)")
    run.add_argument("--trace", action="store_true", help="write per-iteration trace.csv files")
    run.add_argument("--seed-override", type=int, default=None,
                     help="replace all seeds: phantom=S, mask=S+1, noise=S+2")
    run.add_argument("--timing", action="store_true",
                     help="report median-of-3 solver wall time (results.csv then varies run to run)")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        spec = parse_spec(args.spec)
        if args.seed_override is not None:
            spec = spec.with_seed(args.seed_override)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        outcome = run_experiment(spec, args.output_dir, threads=args.threads,
                                 trace=args.trace, timing=args.timing)
    except (OSError, ValueError, FloatingPointError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    print(f"zero-filled: {outcome.zero_filled_snr_db:.2f} dB")
    for row in outcome.rows:
        print(f"{row['method']:>12s}: {row['snr_db']} dB, {row['iters'] or '-'} iterations")
    if outcome.failures:
        for f in outcome.failures:
            print(f"solver failed: {f}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

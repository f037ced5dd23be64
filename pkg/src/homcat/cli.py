"""Command-line entry point.

Thread pools are pinned to one worker before numpy loads, making CSV
output byte-identical across runs and across machines with different core
counts; the package's lazy imports exist so this module really is the
first thing that touches numpy on the console-script path.

Exit codes: 0 success, 1 validation failure, 2 numeric-regime failure,
3 acceptance (selftest) failure.
"""

from __future__ import annotations

import os

# Unconditional: the byte-identity guarantee must not depend on what the
# caller happened to export. Library users keep their own pools.
for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
):
    os.environ[_var] = "1"

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .config import EXPERIMENTS, parse_config, print_config, resolve_config
from .errors import NumericRegimeError, ValidationError
from .runner import run_experiment
from .selftest import run_selftest

_USAGE_HINT = (
    "pick an experiment ({}) on the command line or in the config file, "
    "or run --selftest".format(", ".join(EXPERIMENTS))
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homcat",
        description=(
            "Two-photon interferometry simulations: coincidence traces, "
            "chronocyclic maps, time-resolved detection, double-slit "
            "fringes, and chirped-pump map scans."
        ),
    )
    parser.add_argument(
        "experiment",
        nargs="*",
        metavar="experiment",
        help="experiment to run: " + ", ".join(EXPERIMENTS),
    )
    parser.add_argument(
        "--config", metavar="PATH", help="key = value parameter file"
    )
    parser.add_argument(
        "--out",
        metavar="DIR",
        default="homcat-results",
        help="output directory (default: %(default)s)",
    )
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="echo the fully resolved configuration in canonical units",
    )
    parser.add_argument(
        "--selftest",
        action="store_true",
        help="run the acceptance checks and print the report table",
    )
    parser.add_argument(
        "--selftest-coarsen-grids",
        action="store_true",
        help=argparse.SUPPRESS,
    )
    return parser


def _experiment_from_tokens(tokens: List[str]) -> Optional[str]:
    if not tokens:
        return None
    if len(tokens) == 2 and tuple(tokens) == ("wigner", "cat-decomp"):
        return "cat-decomp"
    if len(tokens) == 1:
        name = tokens[0]
        if name in EXPERIMENTS:
            return name
        raise ValidationError(
            f"unknown experiment {name!r}; expected one of "
            + ", ".join(EXPERIMENTS)
        )
    raise ValidationError(
        "expected one experiment token (or the pair 'wigner cat-decomp'), "
        f"got {' '.join(tokens)!r}"
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.selftest or args.selftest_coarsen_grids:
        ok = run_selftest(coarsen_grids=args.selftest_coarsen_grids)
        return 0 if ok else 3

    try:
        raw = {}
        if args.config is not None:
            path = Path(args.config)
            if not path.is_file():
                raise ValidationError(f"config file not found: {path}")
            raw = parse_config(path.read_text())
        experiment = _experiment_from_tokens(list(args.experiment))
        if experiment is None and "experiment" not in raw:
            parser.print_usage(sys.stderr)
            print(_USAGE_HINT, file=sys.stderr)
            return 1
        config = resolve_config(raw, experiment=experiment)
        if args.print_config:
            sys.stdout.write(print_config(config))
            return 0
        result = run_experiment(config, Path(args.out))
    except ValidationError as exc:
        print(f"homcat: validation error: {exc}", file=sys.stderr)
        return 1
    except NumericRegimeError as exc:
        print(f"homcat: numeric-regime error: {exc}", file=sys.stderr)
        return 2

    for line in result.lines:
        print(line)
    for path in result.paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

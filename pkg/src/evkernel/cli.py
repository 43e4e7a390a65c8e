"""``evkernel`` command line: run, validate, formats."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .errors import EvKernelError, ParseError
from .problem import (
    ENGINES,
    EXIT_INPUT,
    EXIT_OK,
    SCHEMA,
    parse_problem,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evkernel",
        description="Conditionalize interval and belief evidence against interval rules.",
    )
    parser.add_argument("--version", action="version", version=f"evkernel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an engine on a problem file")
    p_run.add_argument("file")
    p_run.add_argument("--engine", choices=ENGINES + ("all",),
                       help="override the engine named in the file")
    p_run.add_argument("--exact", action="store_true", default=None,
                       help="solve oracle LPs in exact rational arithmetic")
    p_run.add_argument("--table", action="store_true",
                       help="also print an aligned comparison table")
    p_run.add_argument("--closure", action="store_true", default=None,
                       help="alternate cheap closure with optimistic refinement")
    p_run.add_argument("--tol", type=float)
    p_run.add_argument("--max-sweeps", type=int)
    p_run.add_argument("--partition-cap", type=int)
    p_run.add_argument("--iterate-partition", action="store_true", default=None,
                       help="repeat partition passes to a fixpoint")
    p_run.add_argument("--timing", action="store_true",
                       help="include wall-clock times (makes output run-dependent)")

    p_val = sub.add_parser("validate", help="check a problem file without running it")
    p_val.add_argument("file")

    sub.add_parser("formats", help="print the problem-file JSON schema")
    return parser


def _fail(exc: Exception) -> int:
    where = []
    if isinstance(exc, ParseError):
        if exc.line is not None:
            where.append(f"line {exc.line}")
        if exc.field is not None:
            where.append(f"field {exc.field}")
    prefix = f" ({', '.join(where)})" if where else ""
    print(f"evkernel: {type(exc).__name__}{prefix}: {exc}", file=sys.stderr)
    return EXIT_INPUT


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "formats":
        print(json.dumps(SCHEMA, indent=2))
        return EXIT_OK

    try:
        problem = parse_problem(args.file)
    except EvKernelError as exc:
        return _fail(exc)

    if args.command == "validate":
        print(f"ok: {len(problem.frame.atoms)} atoms, {len(problem.rules.rules)} rules, "
              f"engine {problem.engine}")
        return EXIT_OK

    changes = {
        "exact": args.exact,
        "closure": args.closure,
        "tol": args.tol,
        "max_sweeps": args.max_sweeps,
        "partition_cap": args.partition_cap,
        "iterate_partition": args.iterate_partition,
    }
    changes = {k: v for k, v in changes.items() if v is not None}
    if changes:
        problem = problem.with_options(**changes)
    if args.engine:
        problem = replace(problem, engine=args.engine)

    report = run(problem, timing=args.timing)
    sys.stdout.write(report.to_json())
    if args.table:
        sys.stdout.write("\n" + report.table())
    for name, section in report.data["engines"].items():
        if section["status"] != "ok":
            print(f"evkernel: {name}: {section['status']}: {section['error']}: "
                  f"{section['message']}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

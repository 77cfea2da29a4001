"""Command line entry point: ``pseudosplit run|validate FILE``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .fans import DEFAULT_HEIGHT_CAP
from .perm_core import DEFAULT_ORDER_CAP
from .problem import ProblemError, dumps_report, parse_problem_file, render_text, run


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", type=Path, help="problem file (JSON)")
    common.add_argument("--cap-group-order", type=int, default=DEFAULT_ORDER_CAP,
                        help="refuse groups with more elements than this (default %(default)s)")
    common.add_argument("--cap-height", type=int, default=DEFAULT_HEIGHT_CAP,
                        help="height cap for the m_t search (default %(default)s)")

    parser = argparse.ArgumentParser(prog="pseudosplit", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run the jobs of a problem file")
    p_run.add_argument("--jobs", type=int, default=1, help="run jobs in N worker processes")
    p_run.add_argument("--out", type=Path, help="write the JSON report here")
    p_run.add_argument("--format", choices=("json", "text"),
                       help="stdout rendering (default: json, or text when --out is given)")
    sub.add_parser("validate", parents=[common], help="parse and validate a problem file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pf = parse_problem_file(args.file, args.cap_group_order, args.cap_height)
    except ProblemError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.cmd == "validate":
        print(f"ok: {len(pf.groups)} groups, {len(pf.algebras)} algebras, {len(pf.setups)} setups, "
              f"{len(pf.fans)} fans, {len(pf.morphisms)} morphisms, {len(pf.families)} families, "
              f"{len(pf.jobs)} jobs")
        return 0

    report = run(pf, jobs=max(1, args.jobs))
    text = dumps_report(report)
    fmt = args.format or ("text" if args.out else "json")
    if args.out:
        try:
            args.out.write_text(text, encoding="utf-8")
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
    sys.stdout.write(render_text(report) if fmt == "text" else text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

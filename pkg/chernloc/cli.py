"""
Command Line
============
argparse front end over ReportService.

- One subcommand per report command; two-word commands are nested ("verify stokes")
- --tol and --seed override the settings for one run
- Exit codes: 0 all checks pass, 1 a check or a numeric step fails, 2 bad input
"""

import argparse
import logging
import sys
from typing import Dict, Optional, Sequence, Tuple

from chernloc.config.settings import get_settings
from chernloc.layers.report.renderers import render_json, render_table
from chernloc.layers.report.report_service import ReportService
from chernloc.utils.errors import ChernlocError, InputError, InvariantViolation
from chernloc.utils.logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

# (command, scene argument: "required" | "optional" | None, flags)
COMMANDS: Tuple[Tuple[str, Optional[str], Tuple[str, ...]], ...] = (
    ("chern", "required", ("q", "connection")),
    ("bott-diff", "required", ("q", "c0", "c1")),
    ("integrate", "required", ("form",)),
    ("cech verify", "required", ("q", "section", "connection")),
    ("verify stokes", None, ("trials", "threshold")),
    ("verify residue-theorem", "required", ("q", "section", "connection")),
    ("verify expected", "required", ()),
    ("residue index", "required", ("radius",)),
    ("residue camacho-sad", "required", ("radius",)),
    ("extendability bloom-herrera", "optional", ("max_degree",)),
    ("scenes", None, ()),
)

FLAG_HELP = {
    "q": (int, "Chern degree"),
    "connection": (str, "connection name (default: the scene's first)"),
    "section": (str, "section name (default: the scene's first)"),
    "c0": (str, "first connection of the Bott difference"),
    "c1": (str, "second connection of the Bott difference"),
    "form": (str, "form name (default: the scene's first)"),
    "trials": (int, "number of random forms and triangles"),
    "threshold": (float, "largest accepted Stokes difference"),
    "radius": (float, "sphere or link radius (default: the scene's)"),
    "max_degree": (int, "truncation degree N"),
}


def parse_param(text: str) -> Tuple[str, object]:
    """name=value with value read as an int, a float or kept as an expression string."""
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    for kind in (int, float):
        try:
            return name.strip(), kind(value)
        except ValueError:
            continue
    return name.strip(), value.strip()


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, help="quadrature tolerance (default 1e-9)")
    parser.add_argument("--acceptance-tol", type=float, help="pass/fail tolerance (default 1e-6)")
    parser.add_argument("--seed", type=lambda s: int(s, 0), help="sampling seed (default 0x5EED)")
    parser.add_argument("--param", type=parse_param, action="append", default=[], metavar="NAME=VALUE",
                        help="scene parameter override, repeatable")
    parser.add_argument("--log-level", help="chernloc log level (default from settings)")
    output = parser.add_mutually_exclusive_group()
    output.add_argument("--json", dest="output", action="store_const", const="json", help="JSON report")
    output.add_argument("--table", dest="output", action="store_const", const="table", help="table report (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chernloc", description="Localized Chern classes and residues on chart models.")
    commands = parser.add_subparsers(dest="group", metavar="command", required=True)
    groups: Dict[str, object] = {}
    for command, scene, flags in COMMANDS:
        words = command.split()
        if len(words) == 1:
            leaf = commands.add_parser(words[0], help=f"run {command}")
        else:
            if words[0] not in groups:
                group = commands.add_parser(words[0], help=f"{words[0]} commands")
                groups[words[0]] = group.add_subparsers(dest="action", metavar="action", required=True)
            leaf = groups[words[0]].add_parser(words[1], help=f"run {command}")
        if scene == "required":
            leaf.add_argument("scene", help="scene file or packaged scene name")
        elif scene == "optional":
            leaf.add_argument("scene", nargs="?", help="scene file or packaged scene name")
        for flag in flags:
            kind, text = FLAG_HELP[flag]
            leaf.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=kind, help=text)
        _common(leaf)
        leaf.set_defaults(command=command, flag_names=flags)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command and print its report.

    Returns:
        Exit code: 0 pass, 1 failing check or numeric error, 2 input error
    """
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in (
            ("quadrature_tol", args.tol),
            ("acceptance_tol", args.acceptance_tol),
            ("seed", args.seed),
            ("log_level", args.log_level),
        )
        if value is not None
    }
    settings = get_settings().model_copy(update=overrides)
    configure_logging(settings.log_level)

    flags = {name: getattr(args, name) for name in args.flag_names}
    params = dict(args.param)
    try:
        report = ReportService(settings).run(args.command, getattr(args, "scene", None), flags, params or None)
    except (InputError, FileNotFoundError, InvariantViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ChernlocError as e:
        logger.error("[CLI] command=%s failed: %s", args.command, e)
        print(f"error: {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL

    print(render_json(report) if args.output == "json" else render_table(report))
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

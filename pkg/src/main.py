#!/usr/bin/env python3
"""
floorlattice - Main Application Entry Point
Exact quantifier elimination for the ordered reals with floor, and components
of semilinear sets over the integer lattice

Usage:
    python src/main.py decide "A x. floor(x) <= x"
    python src/main.py verify multiples --d 2 --max 8
    python src/main.py --help
"""

import sys
import os
import argparse
from typing import List, Optional

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '.'))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from controllers.engine_controller import CONSTRUCTIONS, EngineController
from controllers.verification import TARGETS, run_target
from views.renderers import (
    FORMATS, render_components, render_construction, render_decision, render_formula,
    render_path, render_report, render_trace
)
from config.settings import settings
from utils.helpers import (
    EliminationError, EngineError, ExportHelper, InvariantViolation
)
from utils.logger import get_logger

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Command-line grammar: global options and one subcommand per operation"""
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description=settings.APP_DESCRIPTION)
    parser.add_argument('--version', action='version',
                        version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    parser.add_argument('--trace-log', help="write the elimination step trace to this file")
    parser.add_argument('--format', choices=FORMATS, default="text")
    parser.add_argument('--output', help="write results to this file instead of stdout")
    commands = parser.add_subparsers(dest='command', required=True)

    qe_cmd = commands.add_parser('qe', help="eliminate quantifiers from a formula")
    qe_cmd.add_argument('formula')

    decide_cmd = commands.add_parser('decide', help="decide a sentence (exit 0 true, 1 false)")
    decide_cmd.add_argument('formula')

    comp_cmd = commands.add_parser('components', help="connected components of a set file")
    comp_cmd.add_argument('setfile')
    comp_cmd.add_argument('--window', type=int, help="half-width for formula files")

    trace_cmd = commands.add_parser('trace', help="trace of a point's component on a subspace")
    trace_cmd.add_argument('setfile')
    trace_cmd.add_argument('--point', required=True)
    trace_cmd.add_argument('--fix', action='append', default=[], metavar="i=v",
                           help="fix coordinate i to a rational, Z (integers) or * (free)")
    trace_cmd.add_argument('--window', type=int)
    trace_cmd.add_argument('--expect', metavar="TRACEFILE",
                           help="compare with a trace file (exit 1 on difference)")

    path_cmd = commands.add_parser('path', help="witness path between two points")
    path_cmd.add_argument('setfile')
    path_cmd.add_argument('--from', dest='start', required=True)
    path_cmd.add_argument('--to', dest='end', required=True)
    path_cmd.add_argument('--window', type=int)

    build_cmd = commands.add_parser('build', help="write the set file of a construction")
    build_cmd.add_argument('name', choices=CONSTRUCTIONS)
    build_cmd.add_argument('--max', dest='max_value', type=int, default=settings.DEFAULT_WINDOW)
    build_cmd.add_argument('--d', type=int, default=1)
    build_cmd.add_argument('--points', help="comma-separated ladder points starting at 0")
    build_cmd.add_argument('--map', dest='mapping', metavar="a:b,...",
                           help="ladder map f as pairs (default: next point)")
    build_cmd.add_argument('--tagging', choices=("diagonal", "parity"), default="diagonal")
    build_cmd.add_argument('--predictions', help="write the predicted trace to this file")

    verify_cmd = commands.add_parser('verify', help="check a construction's trace law")
    verify_cmd.add_argument('target', choices=TARGETS)
    verify_cmd.add_argument('--max', dest='max_value', type=int, default=settings.DEFAULT_WINDOW)
    verify_cmd.add_argument('--d', type=int, default=1)
    verify_cmd.add_argument('--points')
    verify_cmd.add_argument('--map', dest='mapping', metavar="a:b,...")
    verify_cmd.add_argument('--window', type=int)
    return parser


def _emit(lines: List[str], output: Optional[str]) -> None:
    if output:
        ExportHelper.write_text(lines, output)
    else:
        for line in lines:
            print(line)


def run(args: argparse.Namespace, controller: EngineController) -> int:
    """Dispatch a parsed command; returns the exit code"""
    fmt = args.format
    if args.command == 'qe':
        _emit(render_formula(controller.eliminate(args.formula), fmt), args.output)
        return settings.EXIT_OK
    if args.command == 'decide':
        value = controller.decide(args.formula)
        _emit(render_decision(value, fmt), args.output)
        return settings.EXIT_OK if value else settings.EXIT_FALSE
    if args.command == 'components':
        lc = controller.load_set(args.setfile, args.window)
        _emit(render_components(lc, controller.components(lc), fmt), args.output)
        return settings.EXIT_OK
    if args.command == 'trace':
        lc = controller.load_set(args.setfile, args.window)
        points = controller.trace_of_point(lc, controller.parse_point(args.point), args.fix)
        _emit(render_trace(points, fmt), args.output)
        if args.expect and not controller.matches_trace_file(points, args.expect):
            return settings.EXIT_FALSE
        return settings.EXIT_OK
    if args.command == 'path':
        lc = controller.load_set(args.setfile, args.window)
        path = controller.path(lc, controller.parse_point(args.start),
                               controller.parse_point(args.end))
        _emit(render_path(path, fmt), args.output)
        return settings.EXIT_OK
    if args.command == 'build':
        construction = controller.build(args.name, args.max_value, args.d, args.points,
                                         args.tagging, args.mapping)
        _emit(render_construction(construction, fmt), args.output)
        if args.predictions:
            controller.export_trace(construction.predicted, args.predictions)
        return settings.EXIT_OK
    reports = run_target(args.target, args.max_value, args.d, args.points, args.window,
                         args.mapping)
    _emit([line for report in reports for line in render_report(report, fmt)], args.output)
    return settings.EXIT_OK if all(r.match for r in reports) else settings.EXIT_FALSE


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exit_:
        return settings.EXIT_OK if exit_.code == 0 else settings.EXIT_USAGE

    logger.info(f"=== {settings.APP_NAME} {args.command} ===")
    controller = EngineController(args.trace_log)
    try:
        return run(args, controller)
    except (InvariantViolation, EliminationError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return settings.EXIT_INTERNAL
    except (EngineError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return settings.EXIT_USAGE
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        print(f"internal error: {e}", file=sys.stderr)
        return settings.EXIT_INTERNAL
    finally:
        controller.close()


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line surface: argument parsing, logging setup and exit codes.

    solve        collocate one problem at one mesh size, CSV samples out
    converge     error table over several mesh sizes
    basis-table  integer knot stencils of the septic B-spline
    selftest     built-in oracle checks
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from ..errors import ConfigError, SepticSolverError
from ..models import CliConfig, Scheme, SolverChoice
from ..core.selftest import FAULTS
from .commands import COMMAND_HANDLERS, EXIT_ERROR

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s: %(message)s"


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors become ConfigError so they share exit code 1."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def _mesh_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _add_problem_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--builtin', metavar='NAME', help="built-in problem (example1, poly0 .. poly7)")
    source.add_argument('--problem', dest='problem_path', metavar='PATH', help="JSON problem file")
    parser.add_argument('--scheme', choices=[s.value for s in Scheme], default=Scheme.LEAST_SQUARES.value)
    parser.add_argument('--solver', choices=[s.value for s in SolverChoice],
                        help="defaults to band-qr for least_squares and band-lu otherwise")
    parser.add_argument('--output', metavar='PATH', help="CSV destination, '-' or omitted for stdout")


def build_parser() -> argparse.ArgumentParser:
    verbosity = _ArgumentParser(add_help=False)
    verbosity.add_argument('-v', '--verbose', action='store_true', help="debug logging on stderr")

    parser = _ArgumentParser(
        prog='septic-solver',
        description="Septic B-spline collocation for linear seventh-order boundary value problems.",
    )
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_ArgumentParser)

    solve = commands.add_parser('solve', parents=[verbosity], help="solve one problem")
    _add_problem_options(solve)
    solve.add_argument('--n', type=int, required=True, help="number of intervals (>= 8)")
    solve.add_argument('--sample', choices=['knots', 'knots_and_midpoints'], default='knots')
    solve.add_argument('--dump-system', metavar='PATH', help="write the equilibrated system as CSV")

    converge = commands.add_parser('converge', parents=[verbosity], help="convergence study")
    _add_problem_options(converge)
    converge.add_argument('--ns', type=_mesh_list, required=True, metavar='N1,N2,...')

    table = commands.add_parser('basis-table', parents=[verbosity], help="knot stencil table")
    table.add_argument('--limit', choices=['left', 'right'], default='left',
                       help="one-sided limit used for the order-7 row")
    table.add_argument('--output', metavar='PATH')

    selftest = commands.add_parser('selftest', parents=[verbosity], help="run the oracle suite")
    selftest.add_argument('--inject-fault', choices=FAULTS, help=argparse.SUPPRESS)
    return parser


def _configure_logging(verbose: bool) -> None:
    # force=True rebinds the handler to the current sys.stderr on every run
    logging.basicConfig(
        stream=sys.stderr,
        format=LOG_FORMAT,
        level=logging.DEBUG if verbose else logging.WARNING,
        force=True,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse `argv`, dispatch, and return the process exit code."""
    _configure_logging(verbose=False)
    try:
        args = build_parser().parse_args(argv)
        config = CliConfig.from_dict(vars(args))
        _configure_logging(config.verbose)
        config.validate()
        logger.debug("configuration: %s", config.to_dict())
        return COMMAND_HANDLERS[config.command](config)
    except (SepticSolverError, OSError) as err:
        logger.error("%s", err)
        return EXIT_ERROR

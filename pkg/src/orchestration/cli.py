"""
Command-line front end.

    count --max-b B [--method naive|torsor] [--star]
    scan --ladder B1,B2,... [--method naive|torsor]
    decompose x1 x2 x3 x4
    verify --max-b B
    densities --p-max P [--special E]
    rho --q Q [--a A --b B] [--check]
    lemma6 --random N --seed S | --v a,b,c --h h1,h2,h3
    lemma7 --random N --seed S
    lemma34 --which 1|2|3|4 [--k k1,...,k7 | --random N --seed S [--budget M]]
    lowerbound --b B [--delta p/q]
    lattice-det m1 m2 m3 m4 [--check]

Every subcommand also takes --format csv|json, --out PATH, --workers N and
--timing. Exit codes: 0 success, 1 usage error, 2 capacity exceeded,
3 violation detected.

CSV headers and JSON keys, per subcommand:

    count       CSV  B,N,Nstar,ratio,method[,elapsed_seconds]
                JSON the same keys
    scan        CSV  one count row per rung
                JSON method, rows (count rows), non_decreasing, note
    decompose   CSV  x1..x4,sign,y1..y4,z12,z13,z14,z23,z24,z34
                JSON x, sign, y, z (keyed "12".."34"), A, B, P, v (keyed "ij")
    verify      CSV  max_b,tuples_checked,points_checked,oracle_equivalence,failures
                JSON the same keys plus failure_examples
    densities   CSV  p,variant,e,density_formula,density_bruteforce,equal
                JSON p_max, special_e, rows (CSV rows), all_equal
    rho --a/--b CSV  q,a,b,rho,rho_jacobi,bound,failures
                JSON the same keys
    rho --check CSV  max_q,identity_checked,bound_checked,failures
                JSON the same keys plus failure_examples
    lemma6 --v  CSV  v,H,count,bound
                JSON the same keys, v and H as lists
    lemma6/lemma7 --random
                CSV  check,trials,seed,violations,max_ratio,outside_domain,outside_domain_over_bound
                JSON the same keys plus violation_examples, outside_domain_examples
    lemma34 --k CSV  variant,K1..K7,count,bound_value,ratio
                JSON the same keys plus verification_failures
    lemma34 --random
                CSV  variant,K1..K7,count,bound_value,ratio, one row per trial
                JSON variant, trials, seed, budget, max_ratio, rows
    lowerbound  CSV  B,delta,value,exact
                JSON the same keys
    lattice-det CSV  m1,m2,m3,m4,det[,bruteforce]
                JSON m, det[, bruteforce]
"""

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from config.config import config
from src.empirical.dyadic_equations import DyadicTuple7
from src.enumeration.point_counter import METHODS, TORSOR
from src.orchestration.cayley_pipeline import CayleyPipeline, StepResult
from src.utils.errors import BoundViolationError, CapacityError, InternalInconsistencyError
from src.utils.logging_setup import setup_logger

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_VIOLATION = 3

SIGNIFICANT_DIGITS = 12
RANDOM_COMMANDS = ('lemma6', 'lemma7', 'lemma34')

logger = setup_logger(__name__)


class UsageError(Exception):
    pass


class CayleyArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class RunConfig(BaseModel):
    command: str
    output_format: Literal['csv', 'json'] = 'json'
    out: Optional[str] = None
    workers: int = Field(default=1, ge=1)
    seed: Optional[int] = Field(default=None, ge=0, le=2 ** 64 - 1)
    random: Optional[int] = Field(default=None, ge=0)
    budget: Optional[int] = Field(default=None, ge=1)
    timing: bool = False

    @model_validator(mode='after')
    def seed_required_for_random(self):
        if self.command in RANDOM_COMMANDS and self.random is not None and self.seed is None:
            raise ValueError(f"{self.command} --random needs an explicit --seed")
        return self


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fraction_list(text: str) -> List[Fraction]:
    return [_fraction(part) for part in text.split(',')]


def build_parser() -> CayleyArgumentParser:
    common = CayleyArgumentParser(add_help=False)
    common.add_argument('--format', dest='output_format', choices=['csv', 'json'], default='json',
                        help='Output format')
    common.add_argument('--out', default=None, help='Write output to this file instead of standard output')
    common.add_argument('--workers', type=int, default=config.WORKERS, help='Worker processes')
    common.add_argument('--timing', action='store_true', help='Include elapsed seconds in count reports')

    parser = CayleyArgumentParser(prog='cayley', description='Count rational points on the Cayley cubic')
    subparsers = parser.add_subparsers(dest='command', required=True)

    p_count = subparsers.add_parser('count', parents=[common], help='N(B) for one height bound')
    p_count.add_argument('--max-b', type=_fraction, required=True)
    p_count.add_argument('--method', choices=METHODS, default=TORSOR)
    p_count.add_argument('--star', action='store_true', help='Also report N*(B)')

    p_scan = subparsers.add_parser('scan', parents=[common], help='N(B) and N(B)/(B (log B)^6) over a ladder')
    p_scan.add_argument('--ladder', type=_fraction_list, required=True)
    p_scan.add_argument('--method', choices=METHODS, default=TORSOR)

    p_decompose = subparsers.add_parser('decompose', parents=[common], help='Torsor coordinates of a point')
    p_decompose.add_argument('coords', type=int, nargs=4, metavar='x')

    p_verify = subparsers.add_parser('verify', parents=[common], help='Round trip and identity suite')
    p_verify.add_argument('--max-b', type=_fraction, required=True)

    p_densities = subparsers.add_parser('densities', parents=[common], help='Local densities against brute force')
    p_densities.add_argument('--p-max', type=int, required=True)
    p_densities.add_argument('--special', type=int, default=None, metavar='E')

    p_rho = subparsers.add_parser('rho', parents=[common], help='Square-root counts modulo q')
    p_rho.add_argument('--q', type=int, required=True)
    p_rho.add_argument('--a', type=int, default=None)
    p_rho.add_argument('--b', type=int, default=None)
    p_rho.add_argument('--check', action='store_true')

    p_lemma6 = subparsers.add_parser('lemma6', parents=[common], help='Primitive vectors on a plane in a box')
    p_lemma6.add_argument('--random', type=int, default=None, metavar='N')
    p_lemma6.add_argument('--seed', type=int, default=None)
    p_lemma6.add_argument('--v', type=_int_list, default=None)
    p_lemma6.add_argument('--h', type=_fraction_list, default=None)

    p_lemma7 = subparsers.add_parser('lemma7', parents=[common], help='Lattice points in an ellipse')
    p_lemma7.add_argument('--random', type=int, required=True, metavar='N')
    p_lemma7.add_argument('--seed', type=int, required=True)

    p_lemma34 = subparsers.add_parser('lemma34', parents=[common], help='Dyadic-box equation counts')
    p_lemma34.add_argument('--which', type=int, choices=[1, 2, 3, 4], required=True)
    p_lemma34.add_argument('--k', type=_fraction_list, default=None)
    p_lemma34.add_argument('--random', type=int, default=None, metavar='N')
    p_lemma34.add_argument('--seed', type=int, default=None)
    p_lemma34.add_argument('--budget', type=int, default=None)

    p_lower = subparsers.add_parser('lowerbound', parents=[common], help='The lower-bound main-term sum')
    p_lower.add_argument('--b', type=_fraction, required=True)
    p_lower.add_argument('--delta', type=_fraction, default=Fraction(1, 84))

    p_det = subparsers.add_parser('lattice-det', parents=[common], help='Index of a divisibility lattice')
    p_det.add_argument('moduli', type=int, nargs=4, metavar='m')
    p_det.add_argument('--check', action='store_true', help='Compare with a brute-force index')

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        output_format=args.output_format,
        out=args.out,
        workers=args.workers,
        seed=getattr(args, 'seed', None),
        random=getattr(args, 'random', None),
        budget=getattr(args, 'budget', None),
        timing=args.timing,
    )


def _dispatch(pipeline: CayleyPipeline, args: argparse.Namespace, run_config: RunConfig) -> StepResult:
    command = args.command
    if command == 'count':
        return pipeline.count(args.max_b, args.method, args.star)
    if command == 'scan':
        return pipeline.scan(args.ladder, args.method)
    if command == 'decompose':
        return pipeline.decompose(args.coords)
    if command == 'verify':
        return pipeline.verify(args.max_b)
    if command == 'densities':
        return pipeline.densities(args.p_max, args.special)
    if command == 'rho':
        if (args.a is None) != (args.b is None):
            raise ValueError("rho takes both --a and --b or neither")
        return pipeline.rho(args.q, args.a, args.b, args.check)
    if command == 'lemma6':
        if args.v is not None or args.h is not None:
            if args.random is not None or args.v is None or args.h is None:
                raise ValueError("lemma6 takes either --random N --seed S or both --v and --h")
            return pipeline.lemma6(v=args.v, H=args.h)
        if args.random is None:
            raise ValueError("lemma6 needs --random N --seed S or --v a,b,c --h h1,h2,h3")
        return pipeline.lemma6(trials=run_config.random, seed=run_config.seed)
    if command == 'lemma7':
        return pipeline.lemma7(run_config.random, run_config.seed)
    if command == 'lemma34':
        if (args.k is None) == (args.random is None):
            raise ValueError("lemma34 takes exactly one of --k and --random")
        K = DyadicTuple7(tuple(args.k)) if args.k is not None else None
        return pipeline.lemma34(args.which, K, run_config.random, run_config.seed, run_config.budget)
    if command == 'lowerbound':
        return pipeline.lowerbound(args.b, args.delta)
    if command == 'lattice-det':
        return pipeline.lattice_det(args.moduli, args.check)
    raise ValueError(f"unknown command {command!r}")


def _plain(value: Any) -> Any:
    """JSON-ready copy: floats to 12 significant digits, rationals as text, numpy scalars unwrapped."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return str(value)


def render(result: StepResult, output_format: str) -> str:
    if output_format == 'csv':
        return result.table.to_csv(index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g", lineterminator='\n')
    return json.dumps(_plain(result.payload), indent=2) + '\n'


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        run_config = _run_config(args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except ValidationError as e:
        print(f"invalid arguments: {e}", file=sys.stderr)
        return EXIT_USAGE

    pipeline = CayleyPipeline(workers=run_config.workers, include_timing=run_config.timing)
    try:
        result = _dispatch(pipeline, args, run_config)
    except CapacityError as e:
        logger.error(f"capacity exceeded: {e}")
        return EXIT_CAPACITY
    except (BoundViolationError, InternalInconsistencyError) as e:
        logger.error(f"violation: {e}")
        return EXIT_VIOLATION
    except ValueError as e:
        logger.error(f"usage error: {e}")
        print(f"cayley {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    _write(render(result, run_config.output_format), run_config.out)
    if run_config.output_format == 'csv':
        for note in result.notes:
            print(f"note: {note}", file=sys.stderr)
    if result.violations:
        logger.error(f"{args.command}: {result.violations} violations detected")
        return EXIT_VIOLATION
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()

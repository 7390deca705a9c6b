"""
Command-line front end for the Fong-Tsui toolkit
Reads matrices, runs analyses, decompositions, generators, suites and searches

Exit codes: 0 success, 1 a check or suite failed, 2 input or format error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
import yaml
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

from src.analysis.search import counterexample_search
from src.analysis.suites import SUITES, default_dims, theorem_suite
from src.data.generators import ClassSpec, GeneratorKind, generate, paper_example_41
from src.data.storage import load_matrix, save_matrix
from src.reporting.report import (
    DECOMPOSITIONS,
    SearchSummary,
    analyze,
    decompose,
    render_analysis,
    render_decomposition,
    render_search,
    render_suite,
    search_run,
    suite_summary,
)
from src.utils.config import Tolerances, default_workers, load_tolerances
from src.utils.errors import TheoremViolation, ToolkitError
from src.utils.timing import Stopwatch

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
CONSOLE_WIDTH = 120


def parse_dims(text: str) -> List[int]:
    """'A..B' (inclusive) or a single 'N'"""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or N, got '{text}'")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"empty or non-positive dimension range '{text}'")
    return list(range(lo, hi + 1))


def parse_orders(text: str) -> List[int]:
    try:
        orders = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of orders, got '{text}'")
    if not orders or min(orders) < 1:
        raise argparse.ArgumentTypeError(f"orders must be >= 1, got '{text}'")
    return orders


def setup_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, os.getenv("FT_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _stdout() -> Console:
    return Console(file=sys.stdout, width=CONSOLE_WIDTH, highlight=False, soft_wrap=True)


def _emit(args: argparse.Namespace, model, render: Callable) -> None:
    if args.format == "json":
        sys.stdout.write(model.model_dump_json(indent=2) + "\n")
    else:
        render(model, _stdout())


def _tolerances(args: argparse.Namespace) -> Tolerances:
    overrides = {
        "rank": args.tol_rank,
        "psd": args.tol_psd,
        "eq": args.tol_eq,
        "conv": args.tol_conv,
        "max_iter": args.max_iter,
    }
    return load_tolerances(args.config, overrides)


# ========== Commands ==========

def cmd_analyze(args: argparse.Namespace, tol: Tolerances) -> int:
    T = load_matrix(args.file)
    report = analyze(T, tol, args.m, timings=args.timings)
    _emit(args, report, render_analysis)
    return EXIT_CHECK_FAILED if report.verdict.soundness_violation else EXIT_OK


def cmd_decompose(args: argparse.Namespace, tol: Tolerances) -> int:
    T = load_matrix(args.file)
    summary = decompose(T, args.which, tol, args.m)
    _emit(args, summary, render_decomposition)
    return EXIT_OK if summary.invariants_hold else EXIT_CHECK_FAILED


def cmd_gen(args: argparse.Namespace, tol: Tolerances) -> int:
    spec = ClassSpec(
        kind=GeneratorKind(args.kind),
        dim=args.dim,
        seed=args.seed,
        rank=args.rank,
        order=args.order,
        m=max(args.m) if args.kind == GeneratorKind.M_QUASI_ISOMETRY.value else None,
        epsilon=args.epsilon,
        contractive=not args.non_contractive,
    )
    T = generate(spec, tol)
    save_matrix(T, args.output)
    return EXIT_OK


def _run_suite(args: argparse.Namespace, tol: Tolerances, suite_id: str) -> int:
    dims = args.dims or list(range(default_dims(suite_id)[0], default_dims(suite_id)[1] + 1))
    watch = Stopwatch()
    report = theorem_suite(suite_id, args.trials, dims, args.seed, tol, workers=args.workers)
    watch.lap(suite_id)
    summary = suite_summary(report, args.seed, dims, dict(watch.laps) if args.timings else None)
    _emit(args, summary, render_suite)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_verify(args: argparse.Namespace, tol: Tolerances) -> int:
    return _run_suite(args, tol, args.suite)


def cmd_fuzz(args: argparse.Namespace, tol: Tolerances) -> int:
    return _run_suite(args, tol, "fuzz")


def cmd_example(args: argparse.Namespace, tol: Tolerances) -> int:
    T, _ = paper_example_41(args.half_dim)
    save_matrix(T.astype(np.complex128), args.output)
    return EXIT_OK


def cmd_search(args: argparse.Namespace, tol: Tolerances) -> int:
    dims = args.dims or list(range(2, 7))
    watch = Stopwatch()
    runs = []
    for dim in dims:
        result = counterexample_search(dim, args.restarts, args.iters, args.delta, args.seed, tol,
                                       workers=args.workers)
        watch.lap(f"dim_{dim}")
        runs.append(search_run(result, tol))
    summary = SearchSummary(seed=args.seed, restarts=args.restarts, iters_per_restart=args.iters, runs=runs,
                            timings=dict(watch.laps) if args.timings else None)
    _emit(args, summary, render_search)
    return EXIT_CHECK_FAILED if any(run.reaches_condition for run in runs) else EXIT_OK


# ========== Parser ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None, help="relative singular value cutoff")
    common.add_argument("--tol-psd", type=float, default=None, help="relative negative eigenvalue slack")
    common.add_argument("--tol-eq", type=float, default=None, help="relative matrix equality slack")
    common.add_argument("--tol-conv", type=float, default=None, help="iteration stopping threshold")
    common.add_argument("--max-iter", type=int, default=None, help="iteration cap")
    common.add_argument("--config", type=Path, default=None, help="YAML tolerance profile")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--m", type=parse_orders, default=[1, 2], help="quasi-isometry orders, e.g. 1,2,3")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="fong-tsui",
        description="Finite-dimensional checks around the condition |T| <= |Re T|",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="full report for one matrix")
    p.add_argument("file", help="matrix file (JSON or CSV), '-' for stdin")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("decompose", parents=[common], help="one structural decomposition")
    p.add_argument("file")
    p.add_argument("--which", choices=list(DECOMPOSITIONS), required=True)
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("gen", parents=[common], help="generate a seeded operator of a class")
    p.add_argument("kind", choices=[k.value for k in GeneratorKind])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--non-contractive", action="store_true", help="random coupling block for m_quasi_isometry")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--dims", type=parse_dims, default=None)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("fuzz", parents=[common], help="random contractions through the verdict")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--dims", type=parse_dims, default=None)
    p.set_defaults(handler=cmd_fuzz)

    p = sub.add_parser("example", parents=[common], help="write a worked example matrix")
    p.add_argument("name", choices=["rmk41"])
    p.add_argument("--half-dim", type=int, default=1)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(handler=cmd_example)

    p = sub.add_parser("search", parents=[common], help="randomized counterexample search")
    p.add_argument("--dims", type=parse_dims, default=None)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--delta", type=float, default=0.1)
    p.set_defaults(handler=cmd_search)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    if args.workers is None:
        args.workers = default_workers()

    try:
        tol = _tolerances(args)
        return args.handler(args, tol)
    except TheoremViolation as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (ToolkitError, ValueError, OSError, yaml.YAMLError) as e:
        print(f"error: {type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main() -> None:
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        sys.exit(130)


if __name__ == "__main__":
    main()

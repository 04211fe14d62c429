#!/usr/bin/env python3
"""
Command-line surface of the Deligne-Simpson toolkit.

JSON results go to stdout, diagnostics and logs to stderr.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import DecidedUnsolvable, DSPKitError
from app.core.logging import get_logger, setup_logging
from app.schemas.common import Flavor, Mode, Verdict
from app.schemas.problem import SolverOptions
from app.schemas.verification import MatrixTupleDocument
from app.services.dsp_decider import decide, psi_chain
from app.services.genericity import default_s_range, sample_generic
from app.services.jordan_core import Partition
from app.services.problems import (
    check_generic,
    dump_json,
    from_assignment,
    load_problem,
    nilpotent_check,
    orbit_chain,
    to_class_tuple,
)
from app.services.realizer import MatrixTuple, build_tuple
from app.services.verify import verify_tuple

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_REFUSED = 2
EXIT_INPUT = 3

VERDICT_EXIT = {
    Verdict.SOLVABLE: EXIT_OK,
    Verdict.WEAKLY_SOLVABLE: EXIT_OK,
    Verdict.NOT_SOLVABLE: EXIT_NEGATIVE,
    Verdict.NOT_WEAKLY_SOLVABLE: EXIT_NEGATIVE,
    Verdict.OUT_OF_THEOREM_SCOPE: EXIT_REFUSED,
}


def parse_parts(text: str) -> List[int]:
    """'3,1,1' -> [3, 1, 1]"""
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")


def parse_part_list(text: str) -> List[List[int]]:
    """'2,1;1,1,1' -> [[2, 1], [1, 1, 1]]"""
    return [parse_parts(chunk) for chunk in text.split(";") if chunk.strip()]


def parse_s_range(text: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}")
    return lo, hi


def resolve_s_range(args: argparse.Namespace, n: int) -> Tuple[Optional[int], Optional[int]]:
    if args.s_range is not None:
        return args.s_range
    if args.paper_s_range:
        return default_s_range(n, strict=True)
    return None, None


def emit(model, pretty: bool) -> None:
    sys.stdout.write(dump_json(model, pretty) + "\n")


def print_trace(trace) -> None:
    for i, stage in enumerate(trace.stages):
        r = stage.report
        blocks = "; ".join(
            " ".join(f"{e.label}:{e.blocks}" for e in form.entries) for form in stage.forms
        )
        print(
            f"stage {i}: n={stage.n} r={r.r} kappa={r.kappa} "
            f"alpha={r.alpha_holds} beta={r.beta_holds} omega={r.omega_holds} | {blocks}",
            file=sys.stderr,
        )
    print(f"stop: {trace.stop_reason.value}", file=sys.stderr)


def cmd_decide(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    t = to_class_tuple(problem)
    s_min, s_max = resolve_s_range(args, problem.n)
    decision = decide(t, problem.mode, s_min, s_max)
    if args.trace:
        print_trace(decision.trace)
    emit(decision, args.pretty)
    return VERDICT_EXIT[decision.verdict]


def cmd_reduce(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    trace = psi_chain(to_class_tuple(problem).forms)
    if args.trace:
        print_trace(trace)
    emit(trace, args.pretty)
    return EXIT_OK


def cmd_realize(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    opts = problem.solver or SolverOptions()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if overrides:
        opts = opts.model_copy(update=overrides)

    t = to_class_tuple(problem)
    result = build_tuple(t, opts, force=args.force)
    report = verify_tuple(result, opts.rank_tolerance)
    text = dump_json(result.to_document(report), args.pretty)
    if args.out:
        Path(args.out).write_text(text + "\n")
        logger.info(f"Wrote tuple to {args.out}")
    else:
        sys.stdout.write(text + "\n")

    verified = (
        report.forms_match
        and report.irreducible
        and report.residual <= opts.target_for(problem.flavor)
    )
    if not verified:
        logger.warning("Solver output did not pass verification")
    return EXIT_OK if verified else EXIT_NEGATIVE


def cmd_verify(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    try:
        doc = MatrixTupleDocument.model_validate_json(Path(args.tuple).read_text())
    except (OSError, ValidationError) as e:
        print(f"cannot read tuple {args.tuple}: {e}", file=sys.stderr)
        return EXIT_INPUT
    result = MatrixTuple.from_document(doc, to_class_tuple(problem))
    report = verify_tuple(result, args.tol)
    emit(report, args.pretty)
    target = (problem.solver or SolverOptions()).target_for(problem.flavor)
    ok = report.forms_match and report.irreducible and report.residual <= target
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_sample_generic(args: argparse.Namespace) -> int:
    pmv = [Partition(tuple(mv)) for mv in args.pmv]
    if not pmv:
        print("--pmv needs at least one multiplicity vector", file=sys.stderr)
        return EXIT_INPUT
    s_min, s_max = resolve_s_range(args, pmv[0].size)
    a = sample_generic(
        pmv,
        flavor=Flavor(args.flavor),
        seed=args.seed,
        s_min=s_min,
        s_max=s_max,
        exponent_sum=args.exponent_sum,
    )
    emit(from_assignment(a, mode=Mode.GENERIC), args.pretty)
    return EXIT_OK


def cmd_check_generic(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    s_min, s_max = resolve_s_range(args, problem.n)
    report = check_generic(problem, s_min, s_max, args.limit)
    emit(report, args.pretty)
    return EXIT_OK if report.classification.generic else EXIT_NEGATIVE


def cmd_orbit_chain(args: argparse.Namespace) -> int:
    response = orbit_chain(args.source, args.target)
    emit(response, args.pretty)
    return EXIT_OK if response.comparable else EXIT_NEGATIVE


def cmd_nilpotent_check(args: argparse.Namespace) -> int:
    partitions = args.partitions
    n = args.n if args.n is not None else sum(partitions[0])
    decision = nilpotent_check(n, partitions)
    emit(decision, args.pretty)
    return VERDICT_EXIT[decision.verdict]


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host=args.host or settings.HOST,
        port=args.port or settings.PORT,
        reload=args.reload,
        log_level=settings.LOG_LEVEL.lower(),
    )
    return EXIT_OK


def add_s_range(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--s-range", type=parse_s_range, metavar="MIN:MAX",
        help="Subset sizes checked for genericity relations",
    )
    parser.add_argument(
        "--paper-s-range", action="store_true",
        help="Check only 1 < s < n",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dspkit",
        description=settings.APP_DESCRIPTION,
    )
    parser.add_argument("--pretty", action="store_true", help="Indented JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="Verdict for a problem file")
    p.add_argument("problem", help="Problem JSON file")
    p.add_argument("--trace", action="store_true", help="Print reduction stages to stderr")
    add_s_range(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("reduce", help="Reduction trace only")
    p.add_argument("problem", help="Problem JSON file")
    p.add_argument("--trace", action="store_true", help="Print reduction stages to stderr")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("realize", help="Numerical witness tuple")
    p.add_argument("problem", help="Problem JSON file")
    p.add_argument("--out", help="Write the tuple here instead of stdout")
    p.add_argument("--seed", type=int, help="Master seed")
    p.add_argument("--threads", type=int, help="Parallel restarts (DSPKIT_THREADS wins)")
    p.add_argument("--force", action="store_true", help="Run even if not decided solvable")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="Verification report of a tuple file")
    p.add_argument("tuple", help="Tuple JSON file")
    p.add_argument("problem", help="Problem JSON file with the declared classes")
    p.add_argument("--tol", type=float, default=None, help="Rank tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample-generic", help="Random generic eigenvalues as a problem file")
    p.add_argument("--pmv", type=parse_part_list, required=True,
                   help="Multiplicity vectors, e.g. '1,1;1,1;1,1'")
    p.add_argument("--flavor", choices=[f.value for f in Flavor], default=Flavor.ADDITIVE.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exponent-sum", type=int, default=1,
                   help="Required sum of exponents (multiplicative flavor)")
    add_s_range(p)
    p.set_defaults(func=cmd_sample_generic)

    p = sub.add_parser("check-generic", help="Genericity report of a problem file")
    p.add_argument("problem", help="Problem JSON file")
    p.add_argument("--limit", type=int, default=None, help="Stop after this many witnesses")
    add_s_range(p)
    p.set_defaults(func=cmd_check_generic)

    p = sub.add_parser("orbit-chain", help="Adjacency chain between nilpotent orbits")
    p.add_argument("source", type=parse_parts, help="Smaller orbit, e.g. '2,1,1'")
    p.add_argument("target", type=parse_parts, help="Larger orbit, e.g. '3,1'")
    p.set_defaults(func=cmd_orbit_chain)

    p = sub.add_parser("nilpotent-check", help="Nice tuples in nilpotent classes")
    p.add_argument("--partitions", type=parse_part_list, required=True,
                   help="Jordan partitions, e.g. '2,2;2,2;2,2;2,2'")
    p.add_argument("--n", type=int, default=None, help="Matrix size")
    p.set_defaults(func=cmd_nilpotent_check)

    p = sub.add_parser("serve", help="Run the HTTP API")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--reload", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DecidedUnsolvable as e:
        print(f"{e.error_code}: {e.message}", file=sys.stderr)
        return EXIT_REFUSED
    except DSPKitError as e:
        print(f"{e.error_code}: {e.message}", file=sys.stderr)
        return EXIT_NEGATIVE if isinstance(e, RuntimeError) else EXIT_INPUT
    except ValidationError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

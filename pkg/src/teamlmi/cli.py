"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 no feasible gain below gamma_bar,
3 ill-posed gain.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time

from . import corpus
from .fileio import (
    ProblemFileError,
    dump_json,
    encode_float,
    gain_to_list,
    load_gain,
    load_problem,
    problem_to_dict,
    report_to_dict,
)
from .lift import DynamicProblem, lift_dynamic
from .lmi import feasibility_margin
from .model import (
    AssumptionViolation,
    IllPosedLoopError,
    InvalidProblemError,
    TeamProblem,
    as_gamma_form,
    gamma_bar,
    validate_problem,
)
from .oracle import achieved_gamma, well_posed, worst_case_witness
from .solver import SolverConfig, bisect_gamma

log = logging.getLogger("teamlmi")

EXIT_OK, EXIT_INPUT, EXIT_ASSUMPTION, EXIT_ILL_POSED = 0, 1, 2, 3
EXAMPLES = ("witsenhausen", "witsenhausen-team", "multistage", "multistage-dynamic")


def _example(name: str, k2: float, m: int):
    if name == "witsenhausen":
        return corpus.witsenhausen(k2)
    if name == "witsenhausen-team":
        return corpus.witsenhausen_team(k2)
    if name == "multistage":
        return corpus.multistage(m)
    return corpus.multistage_dynamic(m)


def _source(args):
    if getattr(args, "example", None):
        return _example(args.example, args.k2, args.m)
    if not getattr(args, "input", None):
        raise ProblemFileError("give a problem file or --example")
    return load_problem(args.input)


def _static(prob):
    if isinstance(prob, DynamicProblem):
        log.info("lifting dynamic problem over %d stages", prob.horizon)
        return lift_dynamic(prob)
    bad = validate_problem(prob)
    if bad:
        raise InvalidProblemError("; ".join(bad))
    return prob


def _emit(doc, args) -> None:
    text = dump_json(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def cmd_solve(args) -> int:
    prob = _static(_source(args))
    cfg = SolverConfig(gamma_tol=args.tol, gamma_lo=args.gamma_lo, gamma_hi=args.gamma_hi, seed=args.seed)
    t0 = time.perf_counter()
    try:
        report = bisect_gamma(prob, cfg)
    except AssumptionViolation as exc:
        _emit({
            "status": "assumption_violation",
            "message": str(exc),
            "gamma_bar": encode_float(exc.gamma_bar),
            "gamma_probe": encode_float(exc.gamma_probe),
            "zero_gain_gamma": encode_float(exc.upper),
            "bisection_trace": [[encode_float(g), bool(f)] for g, f in exc.trace],
            "solver": {"seed": args.seed, "gamma_tol": args.tol, "wall_time": time.perf_counter() - t0},
        }, args)
        _say(args, f"error: {exc}")
        return EXIT_ASSUMPTION
    doc = report_to_dict(report, wall_time=time.perf_counter() - t0)
    if isinstance(prob, TeamProblem):
        doc["well_posed"] = well_posed(prob, report.gain)
    _emit(doc, args)
    _say(args, f"gamma_star = {report.gamma_star:.10g} (oracle {report.oracle_gamma:.10g}, gamma_bar {report.gamma_bar:.10g})")
    return EXIT_OK


def cmd_verify(args) -> int:
    prob = _static(_source(args))
    if not args.gain:
        raise ProblemFileError("verify needs --gain")
    K = load_gain(args.gain)
    K.check_partition(prob.partition)
    doc = {"status": "ok", "gain": gain_to_list(K), "well_posed": well_posed(prob, K)}
    if not doc["well_posed"]:
        doc["status"] = "ill_posed"
        _emit(doc, args)
        _say(args, "error: I - D K is singular; the closed loop is ill-posed")
        return EXIT_ILL_POSED
    value = achieved_gamma(prob, K)
    doc["oracle_gamma"] = encode_float(value)
    doc["gamma_bar"] = encode_float(gamma_bar(prob))
    if not math.isfinite(value):
        doc["status"] = "unbounded"
        _emit(doc, args)
        _say(args, "worst-case ratio is unbounded for this gain")
        return EXIT_OK
    wit = worst_case_witness(prob, K)
    if isinstance(prob, TeamProblem):
        doc["witness"] = {
            "w": [encode_float(v) for v in wit.w],
            "v": [encode_float(v) for v in wit.v],
            "ratio": encode_float(wit.ratio),
            "w_degenerate": wit.w_degenerate,
        }
    else:
        doc["witness"] = {"x": [encode_float(v) for v in wit.x], "ratio": encode_float(wit.ratio)}
    try:
        doc["lmi_margin"] = encode_float(feasibility_margin(as_gamma_form(prob), K, value))
    except ValueError:
        # value at or above gamma_bar: the LMI is not defined there
        doc["lmi_margin"] = None
    _emit(doc, args)
    _say(args, f"oracle_gamma = {value:.10g}")
    return EXIT_OK


def cmd_lift(args) -> int:
    prob = _source(args)
    if not isinstance(prob, DynamicProblem):
        raise ProblemFileError(f"lift needs a dynamic problem, got kind '{problem_to_dict(prob)['kind']}'")
    _emit(problem_to_dict(lift_dynamic(prob)), args)
    return EXIT_OK


def cmd_gamma_bar(args) -> int:
    prob = _static(_source(args))
    value = gamma_bar(prob)
    text = "inf" if math.isinf(value) else repr(value)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_example(args) -> int:
    _emit(problem_to_dict(_example(args.name, args.k2, args.m)), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--tol", type=float, default=1e-4, help="bisection width target (default 1e-4)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", action="store_true")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("input", nargs="?", help="problem file (JSON)")
    source.add_argument("--example", choices=EXAMPLES, help="use a built-in problem instead of a file")
    source.add_argument("--k2", type=float, default=0.1)
    source.add_argument("--m", type=int, default=3)

    parser = argparse.ArgumentParser(prog="teamlmi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, source], help="find gamma* and an optimal block gain")
    p.add_argument("--gamma-lo", type=float, default=None)
    p.add_argument("--gamma-hi", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common, source], help="worst-case ratio of a given gain")
    p.add_argument("--gain", help="gain file: {\"blocks\": [[[...]], ...]}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lift", parents=[common, source], help="stack a dynamic problem into team form")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("gamma-bar", parents=[common, source], help="print the ceiling gamma_bar")
    p.set_defaults(func=cmd_gamma_bar)

    p = sub.add_parser("example", parents=[common], help="write a built-in problem file")
    p.add_argument("name", choices=EXAMPLES)
    p.add_argument("--k2", type=float, default=0.1)
    p.add_argument("--m", type=int, default=3)
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = os.environ.get("TEAMLMI_LOG", "ERROR" if args.quiet else "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except IllPosedLoopError as exc:
        _say(args, f"error: {exc}")
        return EXIT_ILL_POSED
    except (InvalidProblemError, ValueError, OSError) as exc:
        _say(args, f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``tsallis-lab <command> ...``.

Exit codes: 0 all checks pass, 1 verified violation, 2 usage/parse error,
3 resource cap hit.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .axioms import FLOAT_TOLERANCE, SampleSpec, exit_status, full_report
from .errors import AmbiguousReconstruction, SizeLimit, StepLimitExceeded, TsallisLabError
from .functionals import (
    ClosedFormFunctional,
    EntropyFunctional,
    closed_form,
    default_functional,
    load_table,
    make_tabulated,
    perturb,
)
from .kernel import DEFAULT_GRID_CAP, run_experiment
from .lab import (
    alpha2_sum_residual,
    exceptional_starts,
    lemma1_residual,
    orbit,
    reconstruct_all,
    rational_route,
)
from .simplex import farey_points, format_rational, parse_rational, parse_vector, uniform
from .values import Alpha, EntropyValue, precision_from_env

TOOL = f"tsallis_lab {__version__}"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- helpers -----------------------------------------------------------------------

def _alpha(args) -> Alpha:
    try:
        return Alpha.parse(args.alpha)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --alpha {args.alpha!r}: {exc}") from exc


def _precision(args) -> int:
    return args.precision if args.precision is not None else precision_from_env()


def build_functional(args, alpha: Alpha, prec: int) -> EntropyFunctional:
    sel = args.functional
    if sel == "tsallis":
        if alpha.is_one():
            raise UsageError("tsallis needs alpha != 1; use --functional shannon")
        F = default_functional(alpha, prec)
    elif sel == "shannon":
        F = default_functional(Alpha(1), prec)
    elif sel == "closed-form":
        c = (EntropyValue.of(parse_rational(args.c), prec) if args.c is not None
             else default_functional(alpha, prec)(uniform(2)))
        F = ClosedFormFunctional(alpha, c, prec)
    elif sel.startswith("table:"):
        F = make_tabulated(load_table(sel[len("table:"):], prec), default_functional(alpha, prec))
    else:
        raise UsageError(f"unknown functional {sel!r}")
    for spec in args.perturb or ():
        if "@" not in spec:
            raise UsageError(f"--perturb expects VECTOR@DELTA, got {spec!r}")
        vec, delta = spec.split("@", 1)
        F = perturb(F, parse_vector(vec), parse_rational(delta))
    return F


def _value_text(v: EntropyValue) -> str:
    return str(v)


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    if cfg.get("precision") is None:
        cfg["precision"] = _precision(args)
    return cfg


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict) -> None:
    doc = {"tool": TOOL, "config": _config(args)}
    doc.update(payload)
    _emit(args, json.dumps(doc, indent=2) + "\n")


def _violates(residual: EntropyValue) -> bool:
    if residual.is_exact:
        return residual.exact != 0
    return abs(float(residual.approx)) > FLOAT_TOLERANCE


def _sweep(args, residual_fn, name: str) -> int:
    worst, worst_p, bad, n = None, None, 0, 0
    for p in farey_points(args.max_denominator):
        r = residual_fn(p)
        n += 1
        bad += _violates(r)
        if worst is None or abs(r) > worst:
            worst, worst_p = abs(r), p
    status = EXIT_VIOLATION if bad else EXIT_OK
    payload = {"check": name, "instances": n, "violations": bad,
               "max_residual": worst.to_json(), "witness_p": format_rational(worst_p),
               "status": status}
    if args.format == "plain":
        _emit(args, f"{name}: {n} instances, max residual {worst} at p={format_rational(worst_p)}\n")
    else:
        _emit_json(args, payload)
    return status


# -- subcommands ---------------------------------------------------------------------

def cmd_entropy(args) -> int:
    alpha, prec = _alpha(args), _precision(args)
    F = build_functional(args, alpha, prec)
    value = F(parse_vector(args.vector))
    if args.format == "json":
        _emit_json(args, {"functional": F.name, "value": value.to_json()})
    else:
        _emit(args, _value_text(value) + "\n")
    return EXIT_OK


def cmd_axioms(args) -> int:
    alpha, prec = _alpha(args), _precision(args)
    F = build_functional(args, alpha, prec)
    spec = SampleSpec(args.max_denominator, args.max_length, args.samples, args.seed)
    reports = full_report(F, alpha, spec)
    status = exit_status(reports)
    if args.format == "plain":
        lines = [f"{r.axiom}: {r.verdict} ({r.instances} instances, max residual {r.max_residual})"
                 for r in reports]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit_json(args, {"functional": F.name, "reports": [r.to_json() for r in reports],
                          "status": status})
    return status


def cmd_lemma1(args) -> int:
    alpha, prec = _alpha(args), _precision(args)
    F = build_functional(args, alpha, prec)
    return _sweep(args, lambda p: lemma1_residual(F, alpha, p), "lemma1")


def cmd_alpha2sum(args) -> int:
    prec = _precision(args)
    F = build_functional(args, Alpha(2), prec)
    return _sweep(args, lambda p: alpha2_sum_residual(F, p), "alpha2sum")


def cmd_orbit(args) -> int:
    try:
        p = parse_rational(args.p)
    except TsallisLabError as exc:
        raise UsageError(str(exc)) from exc
    trace = orbit(p, args.max_steps)
    if args.format == "json":
        _emit_json(args, {
            "start": format_rational(trace.start),
            "points": [format_rational(q) for q in trace.points],
            "denominators": trace.denominators,
            "hit_index": trace.hit_index,
            "open_hit_index": trace.open_hit_index,
            "reached_one": trace.reached_one,
            "exceptional": trace.open_hit_index is None and Fraction(2, 3) < trace.start < 1,
        })
    else:
        header = "# " + json.dumps({"tool": TOOL, "config": _config(args)}, sort_keys=True)
        _emit(args, header + "\n" + trace.to_csv())
    return EXIT_OK


def cmd_orbit_scan(args) -> int:
    family = exceptional_starts(args.max_denominator)
    _emit_json(args, {"max_denominator": args.max_denominator,
                      "exceptional_starts": [format_rational(q) for q in family]})
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    alpha, prec = _alpha(args), _precision(args)
    F = build_functional(args, alpha, prec)
    v = parse_vector(args.vector)
    direct = F(v)
    try:
        value, values = reconstruct_all(F, alpha, v)
        agree = True
    except AmbiguousReconstruction as exc:
        values, value, agree = {}, None, False
        reason = str(exc)
    matches = agree and value.close_to(direct, rel=0.0, abs_tol=FLOAT_TOLERANCE)
    status = EXIT_OK if matches else EXIT_VIOLATION
    payload = {"vector": args.vector, "functional": F.name, "direct": direct.to_json(),
               "strategies": {k: val.to_json() for k, val in values.items()},
               "strategies_agree": agree, "matches_direct": matches, "status": status}
    if not agree:
        payload["reason"] = reason
    if args.format == "plain":
        _emit(args, f"{value if value is not None else 'ambiguous'} (direct {direct})\n")
    else:
        _emit_json(args, payload)
    return status


def cmd_rational(args) -> int:
    alpha, prec = _alpha(args), _precision(args)
    v = parse_vector(args.vector)
    c = (EntropyValue.of(parse_rational(args.c), prec) if args.c is not None
         else default_functional(alpha, prec)(uniform(2)))
    route = rational_route(alpha, v, c, prec)
    closed = closed_form(v, alpha, c, prec)
    matches = route.value.close_to(closed, rel=0.0, abs_tol=FLOAT_TOLERANCE)
    status = EXIT_OK if matches else EXIT_VIOLATION
    if args.format == "plain":
        _emit(args, f"{route.value} (closed form {closed})\n")
    else:
        _emit_json(args, {"vector": args.vector, "c": c.to_json(),
                          "common_denominator": route.common_denominator,
                          "proof_route": route.value.to_json(), "closed_form": closed.to_json(),
                          "matches": matches, "status": status})
    return status


def cmd_kernel(args) -> int:
    alpha = _alpha(args)
    if not alpha.is_exact_integer:
        raise UsageError("kernel needs a positive integer --alpha")
    report = run_experiment(args.b, args.L, alpha, args.cap)
    status = EXIT_OK if report.closed_form_member else EXIT_VIOLATION
    if args.format == "plain":
        _emit(args, f"b={report.b} L={report.L} unknowns={report.unknowns} "
                    f"constraints={report.constraints} rank={report.rank} "
                    f"kernel_dimension={report.kernel_dimension}\n")
    else:
        _emit_json(args, {"kernel": report.to_json(), "status": status})
    return status


def cmd_replay(args) -> int:
    doc = json.loads(Path(args.report).read_text())
    config = dict(doc["config"])
    config["output"] = args.output
    ns = argparse.Namespace(**config)
    ns.func = COMMANDS[ns.command]
    return ns.func(ns)


COMMANDS = {
    "entropy": cmd_entropy,
    "axioms": cmd_axioms,
    "lemma1": cmd_lemma1,
    "alpha2sum": cmd_alpha2sum,
    "orbit": cmd_orbit,
    "orbit-scan": cmd_orbit_scan,
    "reconstruct": cmd_reconstruct,
    "rational": cmd_rational,
    "kernel": cmd_kernel,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsallis-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json", functional=True, alpha="2"):
        p.add_argument("--alpha", default=alpha)
        p.add_argument("--precision", type=int, default=None,
                       help="float precision in bits (overrides $TSALLIS_LAB_PRECISION)")
        p.add_argument("--output", "-o", default=None)
        p.add_argument("--format", choices=["json", "csv", "plain"], default=fmt)
        if functional:
            p.add_argument("--functional", default="tsallis",
                           help="tsallis | shannon | closed-form | table:PATH")
            p.add_argument("--c", default=None, help="normalization H(1/2,1/2) for closed-form")
            p.add_argument("--perturb", action="append", metavar="VECTOR@DELTA")

    p = sub.add_parser("entropy", help="evaluate a functional at a vector")
    common(p, fmt="plain")
    p.add_argument("--vector", required=True)

    p = sub.add_parser("axioms", help="run every axiom check")
    common(p)
    p.add_argument("--max-denominator", type=int, default=6)
    p.add_argument("--max-length", type=int, default=4)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    for name in ("lemma1", "alpha2sum"):
        p = sub.add_parser(name, help=f"{name} residual sweep over p = a/b")
        common(p)
        p.add_argument("--max-denominator", type=int, default=50)

    p = sub.add_parser("orbit", help="f-orbit of p as CSV")
    common(p, fmt="csv", functional=False)
    p.add_argument("--p", required=True)
    p.add_argument("--max-steps", type=int, default=None)

    p = sub.add_parser("orbit-scan", help="list starts whose orbit skips the open interval")
    common(p, functional=False)
    p.add_argument("--max-denominator", type=int, default=200)

    p = sub.add_parser("reconstruct", help="rebuild H(v) from two-point values")
    common(p)
    p.add_argument("--vector", required=True)

    p = sub.add_parser("rational", help="uniform-refinement route vs closed form")
    common(p, functional=False)
    p.add_argument("--vector", required=True)
    p.add_argument("--c", default=None)

    p = sub.add_parser("kernel", help="solve the pairwise-additivity system on a grid")
    common(p, functional=False)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--L", type=int, default=4)
    p.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP)

    p = sub.add_parser("replay", help="re-run the configuration embedded in a JSON report")
    p.add_argument("report")
    p.add_argument("--output", "-o", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    args.func = COMMANDS[args.command]
    try:
        return args.func(args)
    except (SizeLimit, StepLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, TsallisLabError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad
input (parse errors carry line and column).  With ``--format json`` every
check prints one JSON object per line.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import aksz
from . import bvgraded as bv
from .dorfman import TwistData, dorfman
from .errors import ParseError, PoleEncountered, SingularOperator, StepUnderflow
from .exterior import FORM, ext_d
from .fileio import dump_section, dump_tensor, load_section, load_tensor, tensor_to_obj
from .nambu import fi_report, gauge_transform
from .scalarfield import Chart
from .suites import SUITES, run_suite
from .swflow import FlowConfig, sw_defects

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(args, obj: dict, text: str):
    if args.format == "json":
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)


def _witness_obj(w):
    if isinstance(w, tuple):
        return [list(x) if isinstance(x, tuple) else x for x in w]
    return w


def _load(path, chart=None):
    if path is None:
        return None
    try:
        return load_tensor(path, chart)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


# ----- subcommands ------------------------------------------------------------------

def cmd_check_np(args) -> int:
    pi = _load(args.tensor)
    if pi.variance != "vector" or pi.degree < 2:
        raise InputError("check-np needs a p-vector with p >= 2")
    r = fi_report(pi)
    wit = [_witness_obj(w) for w in r.witnesses]
    obj = {"name": "check-np", "instances": 1, "failures": int(not r.is_np),
           "first_witness": wit[0] if wit else None, "np": r.is_np, "alg": r.alg_ok,
           "diff": r.diff_ok, "decomposable": r.decomposable, "witnesses": wit}
    lines = [f"{'PASS' if r.is_np else 'FAIL'} Nambu-Poisson (p={pi.degree}, n={pi.chart.dim})",
             f"  algebraic condition: {'ok' if r.alg_ok else 'violated'}",
             f"  differential condition: {'ok' if r.diff_ok else 'violated'}",
             f"  decomposable: {'yes' if r.decomposable else 'no'}"]
    lines += [f"  witness: {w}" for w in wit]
    _emit(args, obj, "\n".join(lines))
    return EXIT_OK if r.is_np else EXIT_FAIL


def cmd_check_decomposable(args) -> int:
    from .exterior import decomposable

    T = _load(args.tensor)
    ok, bad = decomposable(T, witness=True)
    wit = [[list(a), list(J)] for a, J in bad[:8]]
    obj = {"name": "check-decomposable", "instances": 1, "failures": int(not ok),
           "first_witness": wit[0] if wit else None, "decomposable": ok, "witnesses": wit}
    text = f"{'PASS' if ok else 'FAIL'} decomposable" + "".join(f"\n  witness: a={a} J={J}" for a, J in wit)
    _emit(args, obj, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gauge(args) -> int:
    pi = _load(args.pi)
    b = _load(args.b, pi.chart)
    try:
        out = gauge_transform(pi, b)
    except SingularOperator as exc:
        print(f"SingularOperator: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise InputError(str(exc)) from None
    text = dump_tensor(out)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_samples(path, n):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    if not isinstance(data, list) or not all(isinstance(p, list) and len(p) == n for p in data):
        raise InputError(f"{path}: expected a list of points with {n} coordinates")
    try:
        return [[Fraction(str(v)) for v in p] for p in data]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{path}: coordinates must be numbers or 'p/q' strings") from None


def cmd_sw_flow(args) -> int:
    pi = _load(args.pi)
    a = _load(args.a, pi.chart)
    if a.variance != FORM or a.degree != pi.degree - 1:
        raise InputError(f"a must be a {pi.degree - 1}-form")
    samples = _read_samples(args.samples, pi.chart.dim)
    try:
        cfg = FlowConfig(Fraction(args.t_end), Fraction(args.step), float(args.tol))
        defects = sw_defects(pi, a, cfg, samples)
    except (PoleEncountered, StepUnderflow) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise InputError(str(exc)) from None
    worst = float(max(defects))
    ok = worst <= cfg.tol
    obj = {"name": "sw-flow", "instances": len(samples), "failures": int(sum(d > cfg.tol for d in defects)),
           "max_defect": worst, "defects": [float(d) for d in defects]}
    lines = ["sample  defect"] + [f"{k:6d}  {d:.3e}" for k, d in enumerate(defects)]
    lines.append(f"max defect {worst:.3e} (tol {cfg.tol:g}): {'PASS' if ok else 'FAIL'}")
    _emit(args, obj, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bv_check(args) -> int:
    pi = _load(args.pi)
    chart = pi.chart if pi is not None else None
    c = _load(args.c, chart)
    if chart is None:
        chart = c.chart if c is not None else Chart(args.dim)
    if args.dim is not None and chart.dim != args.dim:
        raise InputError(f"--dim {args.dim} does not match the input files ({chart.dim})")
    try:
        gc = bv.GradedChart(chart, args.p, args.space)
        if args.space == bv.POISSON:
            if pi is None:
                raise InputError("the Poisson space needs --pi")
            S = bv.poisson_hamiltonian(gc, pi)
        else:
            S = bv.gamma(gc, c)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    master = bv.master_defect(gc, S)
    results = [{"name": "master-equation", "instances": 1, "failures": int(not master.is_zero()),
                "first_witness": None if master.is_zero() else str(master)}]
    lines = [f"{'PASS' if master.is_zero() else 'FAIL'} master equation on the {args.space} space (p={gc.p})"]
    if not master.is_zero() and args.emit == "defect":
        if c is not None and not ext_d(c).is_zero():
            dc = ext_d(c)
            results[0]["dc"] = tensor_to_obj(dc)
            lines.append(f"  dc = {dc!r}")
        lines.append(f"  {{S, S}} = {master}")
    if pi is not None and args.space == bv.PBRANE:
        if pi.degree != gc.p:
            raise InputError(f"pi must be a {gc.p}-vector")
        bd = bv.boundary_defect(pi, c)
        results.append({"name": "boundary-condition", "instances": 1, "failures": int(bool(bd)),
                        "first_witness": {k: str(v) for k, v in bd.items()} or None})
        lines.append(f"{'PASS' if not bd else 'FAIL'} gamma vanishes on L'_pi")
        if bd and args.emit == "defect":
            lines += [f"  {k}: {v}" for k, v in bd.items()]
    if args.format == "json":
        for r in results:
            print(json.dumps(r, sort_keys=True))
    else:
        print("\n".join(lines))
    return EXIT_OK if all(r["failures"] == 0 for r in results) else EXIT_FAIL


def cmd_derived_bracket(args) -> int:
    try:
        e1 = load_section(args.e1)
        e2 = load_section(args.e2, e1.chart)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except ParseError as exc:
        raise InputError(str(exc)) from None
    c = _load(args.c, e1.chart)
    p = e1.order
    try:
        gc = bv.GradedChart(e1.chart, p, bv.MEMBRANE)
        S = bv.twdorf_hamiltonian(gc, c)
        derived = bv.lower_section(gc, bv.derived_bracket(gc, S, bv.lift_section(gc, e1), bv.lift_section(gc, e2)))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    tw = TwistData(c=c * bv.C_SIGN) if c is not None else TwistData()
    direct = dorfman(e1, e2, tw)
    ok = (derived - direct).is_zero()
    if args.format == "json":
        print(json.dumps({"name": "derived-bracket", "instances": 1, "failures": int(not ok),
                          "first_witness": None if ok else json.loads(dump_section(derived - direct))},
                         sort_keys=True))
    else:
        sys.stdout.write(dump_section(derived))
        print(f"{'PASS' if ok else 'FAIL'} derived bracket equals the Dorfman bracket")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_emit_action(args) -> int:
    pi = _load(args.pi)
    chart = pi.chart if pi is not None else None
    c = _load(args.c, chart)
    if chart is None:
        chart = c.chart if c is not None else (Chart(args.dim) if args.dim else None)
    if chart is None:
        raise InputError("need --dim or an input file")
    if args.dim is not None and chart.dim != args.dim:
        raise InputError(f"--dim {args.dim} does not match the input files ({chart.dim})")
    warnings: list = []
    try:
        A = aksz.build_action(args.model, args.p, chart, pi, c, warnings)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    sys.stdout.write(aksz.emit_text(A, args.style))
    return EXIT_OK


def cmd_proptest(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; available: all, {', '.join(SUITES)}")
    if args.instances is not None and args.instances < 0:
        raise InputError("--instances must be non-negative")
    status = EXIT_OK
    for name in names:
        r = run_suite(name, args.seed, args.instances)
        if r["failures"]:
            status = EXIT_FAIL
        text = f"{'PASS' if not r['failures'] else 'FAIL'} {name}: {r['failures']}/{r['instances']} failures"
        if r["first_witness"] is not None:
            text += f"\n  first witness: {json.dumps(r['first_witness'], sort_keys=True)}"
        _emit(args, r, text)
    return status


# ----- parser -----------------------------------------------------------------------

def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not -(2**63) <= v < 2**64:
        raise argparse.ArgumentTypeError("seed overflow: must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=argparse.SUPPRESS, help="seed for random instances")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="npbrane", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-np", parents=[common], help="decide the Nambu-Poisson conditions")
    s.add_argument("tensor")
    s.set_defaults(func=cmd_check_np)

    s = sub.add_parser("check-decomposable", parents=[common], help="Plucker test for decomposability")
    s.add_argument("tensor")
    s.set_defaults(func=cmd_check_decomposable)

    s = sub.add_parser("gauge", parents=[common], help="gauge transform pi by a p-form b")
    s.add_argument("pi")
    s.add_argument("b")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gauge)

    s = sub.add_parser("sw-flow", parents=[common], help="numeric check of the gauge flow")
    s.add_argument("--pi", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--t-end", default="1")
    s.add_argument("--step", default="1/1000")
    s.add_argument("--samples", required=True)
    s.add_argument("--tol", default="1e-6")
    s.set_defaults(func=cmd_sw_flow)

    s = sub.add_parser("bv-check", parents=[common], help="master equation and boundary conditions")
    s.add_argument("--space", choices=bv.SPACES, required=True)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--dim", type=int)
    s.add_argument("--c")
    s.add_argument("--pi")
    s.add_argument("--emit", choices=("defect",))
    s.set_defaults(func=cmd_bv_check)

    s = sub.add_parser("derived-bracket", parents=[common], help="derived bracket of two sections")
    s.add_argument("--e1", required=True)
    s.add_argument("--e2", required=True)
    s.add_argument("--c")
    s.set_defaults(func=cmd_derived_bracket)

    s = sub.add_parser("emit-action", parents=[common], help="print a superfield action")
    s.add_argument("--model", choices=aksz.MODELS, required=True)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--dim", type=int)
    s.add_argument("--pi")
    s.add_argument("--c")
    s.add_argument("--style", choices=("plain", "latex"), default="plain")
    s.set_defaults(func=cmd_emit_action)

    s = sub.add_parser("proptest", parents=[common], help="run a randomized property suite")
    s.add_argument("suite", help="suite name or 'all'")
    s.add_argument("--instances", type=int)
    s.set_defaults(func=cmd_proptest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    args.format = getattr(args, "format", "text")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

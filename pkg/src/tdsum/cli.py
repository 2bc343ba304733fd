"""Command-line front end.

Exit codes: 0 yes/holds, 1 no/fails, 2 unknown, 3 and above errors.
"""
from __future__ import annotations

import argparse
import enum
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import bridges, dsa
from .expansion import ExplorationTrace, decide_tds01, greedy_explore, tds01_instance
from .numerics import DiscountFactor, LassoWord, format_rational, parse_rational
from .omega.solve import solve_cgtds, solve_cgtds_f, verify_certificate
from .problem import (
    DegenerateAlphabet,
    GtdsInstance,
    WeightAlphabet,
    instance_from_json,
    instance_to_json,
    normalize,
    reduce_tds_to_tds01,
)
from .verdict import Answer, Reason, Verdict

EXIT = {Answer.YES: 0, Answer.NO: 1, Answer.UNKNOWN: 2}
EXIT_ERROR = 3


class CliError(Exception):
    pass


# -- serialization -------------------------------------------------------------


def to_plain(x: Any) -> Any:
    """JSON-ready copy with rationals as exact strings."""
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, LassoWord):
        return certificate_json(x)
    if isinstance(x, ExplorationTrace):
        return x.dump().splitlines()
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [to_plain(v) for v in x]
        return sorted(items, key=str) if isinstance(x, (set, frozenset)) else items
    return str(x)


def certificate_json(w: LassoWord, value: Fraction | None = None) -> dict:
    out = {"prefix": [str(a) for a in w.prefix], "period": [str(a) for a in w.period], "text": w.render()}
    if value is not None:
        out["value"] = format_rational(value)
    return out


def certificate_from_json(data: dict | None) -> LassoWord | None:
    if data is None:
        return None
    return LassoWord(tuple(data["prefix"]), tuple(data["period"]))


def parse_report(text: str) -> tuple[Answer, LassoWord | None]:
    """Verdict and certificate back from an emitted JSON report."""
    data = json.loads(text)
    return Answer(data["verdict"]), certificate_from_json(data.get("certificate"))


def emit(report: dict, fmt: str, certificate_only: bool = False) -> str:
    if certificate_only:
        cert = report.get("certificate")
        return cert["text"] if cert else "none"
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False)
    lines = []
    for key, val in report.items():
        if key == "trace":
            lines.append("trace:")
            lines.extend("  " + line for line in val)
        elif key == "certificate":
            lines.append(f"certificate: {val['text']}")
            if "value" in val:
                lines.append(f"value: {val['value']}")
        elif isinstance(val, (dict, list)):
            lines.append(f"{key}: {json.dumps(val, ensure_ascii=False)}")
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


# -- loading -------------------------------------------------------------------


def load_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: cannot read file: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def load_instance(path: str) -> GtdsInstance:
    data = load_json(path)
    try:
        return instance_from_json(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{path}: invalid instance: {exc}") from None


def load_dsa(path: str) -> dsa.Dsa:
    data = load_json(path)
    if isinstance(data, dict) and "automaton" in data:
        data = data["automaton"]  # output of `tdsum dsa gadget`
    try:
        return dsa.Dsa.from_json(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{path}: invalid automaton: {exc}") from None


# -- solve ---------------------------------------------------------------------


def _solve_tds(inst: GtdsInstance, budget_steps) -> tuple[Verdict, ExplorationTrace | None]:
    (la, a), (lb, b) = inst.alphabet.entries
    lam = inst.lam
    t0 = inst.target / lam.value**inst.start_exponent  # sum from λ^0
    try:
        red = reduce_tds_to_tds01(lam, t0, a, b)
    except DegenerateAlphabet as exc:
        if exc.solvable:
            return Verdict(Answer.YES, Reason.DEGENERATE, LassoWord((), (la,))), None
        return Verdict(Answer.NO, Reason.DEGENERATE, details={"message": str(exc)}), None
    v = decide_tds01(lam, red.target, budget_steps)
    trace = v.details.get("trace")
    if v.certificate is None:
        return v, trace
    rename = {"0": la, "1": lb}
    w = v.certificate
    cert = LassoWord(tuple(rename[x] for x in w.prefix), tuple(rename[x] for x in w.period))
    return Verdict(v.answer, v.reason, cert, {**v.details, "tds01_target": red.target}), trace


def solve_instance(inst: GtdsInstance, budget_steps=None, budget_states=None) -> tuple[Verdict, ExplorationTrace | None]:
    kind = inst.kind
    if kind == "tds":
        return _solve_tds(inst, budget_steps)
    if kind == "tds01":
        v = decide_tds01(inst.lam, inst.target, budget_steps)
        return v, v.details.get("trace")
    if inst.is_finite:
        return solve_cgtds_f(inst, budget_states), None
    return solve_cgtds(inst, budget_steps, budget_states), None


def _greedy_trace(inst: GtdsInstance, steps: int) -> ExplorationTrace | None:
    if inst.is_finite:
        return None
    if inst.kind == "tds":
        (_, a), (_, b) = inst.alphabet.entries
        if a == b:
            return None
        t0 = inst.target / inst.lam.value**inst.start_exponent
        inst = tds01_instance(inst.lam, reduce_tds_to_tds01(inst.lam, t0, a, b).target)
    nf, _ = normalize(inst)
    return greedy_explore(nf, steps)


def solve_report(inst: GtdsInstance, args) -> dict:
    start = time.perf_counter()
    v, trace = solve_instance(inst, args.budget_steps, args.budget_states)
    elapsed = time.perf_counter() - start
    report: dict = {"command": "solve", "instance": instance_to_json(inst)}
    report["verdict"] = v.answer.value
    report["reason"] = v.reason.value
    if v.certificate is not None:
        verify_certificate(inst, v.certificate)
        report["certificate"] = certificate_json(v.certificate, inst.value(v.certificate))
        # verify_certificate has already checked membership
        report["certificate"]["constraint_check"] = True if inst.constraint is not None else None
    details = {k: val for k, val in v.details.items() if k != "trace"}
    if details:
        report["details"] = to_plain(details)
    report["budgets"] = {"steps": args.budget_steps, "states": args.budget_states}
    if args.trace:
        if trace is None:
            d = inst.target.denominator
            trace = _greedy_trace(inst, args.budget_steps or max(4 * d, 64))
        if trace is not None:
            report["trace"] = trace.dump().splitlines()
    if getattr(args, "timing", False):
        report["timing_seconds"] = round(elapsed, 6)
    return report


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    report = solve_report(inst, args)
    print(emit(report, args.format, args.certificate_only))
    return EXIT[Answer(report["verdict"])]


def _batch_one(path: Path, args) -> tuple[str, int]:
    try:
        report = solve_report(load_instance(str(path)), args)
    except CliError as exc:
        return f"error: {exc}", EXIT_ERROR
    return emit(report, args.format, args.certificate_only), EXIT[Answer(report["verdict"])]


def cmd_batch(args) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        raise CliError(f"{root}: not a directory")
    files = sorted(root.glob("*.json"))
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda p: _batch_one(p, args), files))
    code = 0
    for text, rc in results:
        print(text)
        code = max(code, rc)
    return code


# -- dsa -----------------------------------------------------------------------


def _word_json(word) -> dict:
    return {"letters": [str(a) for a in word], "text": LassoWord(tuple(word)).render()}


def cmd_dsa(args) -> int:
    sub = args.dsa_command
    report: dict = {"command": f"dsa {sub}"}
    if sub == "gadget":
        lam = DiscountFactor.of(args.lam)
        g = dsa.tds_to_universality_gadget(lam, parse_rational(args.target))
        report["automaton"] = g.to_json()
        report["note"] = "not <0-universal iff some w in {a=0,b=1}^ω has Σ_{i≥0} λ^i w_i = target"
        print(emit(report, args.format))
        return 0
    try:
        if sub == "exact-value":
            A = load_dsa(args.automaton)
            v = dsa.exact_value(A, parse_rational(args.target), args.budget_states)
            report.update(verdict=v.answer.value, reason=v.reason.value)
            if v.certificate is not None:
                w = v.certificate.prefix
                value = dsa.word_value(A, w)
                if value != parse_rational(args.target):
                    raise AssertionError("exact-value witness does not re-verify")
                report["witness"] = {**_word_json(w), "value": format_rational(value)}
            code = EXIT[v.answer]
        elif sub == "universality":
            A = load_dsa(args.automaton)
            u = dsa.universality_finite(A, parse_rational(args.target), args.strict)
            report["verdict"] = "holds" if u.holds else "fails"
            if u.sup is not None:
                report["sup"] = format_rational(u.sup)
                report["sup_attained"] = u.attained
            if u.counterexample is not None:
                report["counterexample"] = {
                    **_word_json(u.counterexample),
                    "value": format_rational(dsa.word_value(A, u.counterexample)),
                }
            code = 0 if u.holds else 1
        elif sub == "inclusion":
            A, B = load_dsa(args.automaton), load_dsa(args.other)
            inc = dsa.inclusion_finite(A, B, args.strict)
            report["verdict"] = "holds" if inc.holds else "fails"
            if inc.counterexample is not None:
                w = inc.counterexample
                report["counterexample"] = {
                    **_word_json(w),
                    "value_a": format_rational(dsa.word_value(A, w)),
                    "value_b": format_rational(dsa.word_value(B, w)),
                }
            if inc.a_only is not None:
                report["domain_mismatch_a_only"] = _word_json(inc.a_only)
            if inc.b_only is not None:
                report["domain_mismatch_b_only"] = _word_json(inc.b_only)
            code = 0 if inc.holds else 1
        elif sub == "semi-universality":
            A = load_dsa(args.automaton)
            r = dsa.semi_universality_infinite(A, parse_rational(args.target), args.strict, args.budget_steps)
            report["verdict"] = {Answer.YES: "holds", Answer.NO: "fails", Answer.UNKNOWN: "unknown"}[r.answer]
            if r.witness is not None:
                report["witness"] = certificate_json(r.witness)
            if r.details:
                report["details"] = to_plain(r.details)
            code = EXIT[r.answer]
        else:  # pragma: no cover - argparse guards this
            raise CliError(f"unknown dsa command {sub}")
    except dsa.NotFunctional as exc:
        raise CliError(f"refused: {exc}") from None
    except dsa.NoAcceptingRun as exc:
        raise CliError(str(exc)) from None
    print(emit(report, args.format))
    return code


# -- expand, pam, cantor ---------------------------------------------------------


def cmd_expand(args) -> int:
    lam = DiscountFactor.of(args.lam)
    weights = [parse_rational(w) for w in args.weights.split(",")]
    alphabet = WeightAlphabet(tuple((format_rational(w), w) for w in weights))
    inst = GtdsInstance(lam, parse_rational(args.target), alphabet, start_exponent=args.start_exponent)
    nf, _ = normalize(inst)
    trace = greedy_explore(nf, args.steps)
    assert trace.verify()
    report = {
        "command": "expand",
        "lambda": format_rational(lam.value),
        "target": format_rational(inst.target),
        "digits": [str(a) for a in trace.letters],
        "gaps": [format_rational(g) for g in trace.gaps],
        "outcome": str(trace.outcome),
    }
    lasso = trace.lasso()
    if lasso is not None:
        report["lasso"] = certificate_json(lasso, inst.value(lasso))
    if args.format == "json":
        print(emit(report, "json"))
    else:
        print(trace.dump())
        if lasso is not None:
            print(f"lasso: {lasso.render()}")
    return {"Repeat": 0, "TooBig": 1}.get(trace.outcome.kind, 2)


def cmd_pam(args) -> int:
    lam = DiscountFactor.of(args.lam)
    t = parse_rational(args.target)
    report: dict = {"command": "pam", "lambda": format_rational(lam.value), "target": format_rational(t)}
    f = bridges.build_pam_from_tds01(lam, t)
    if f is None:
        report["status"] = "short-circuit"
        report["note"] = "target outside [0, λ/(1−λ)]: the 0/1 instance has no solution"
        print(emit(report, args.format))
        return 0
    orbit = bridges.tds01_via_pam(lam, t, args.budget_steps or 100_000)
    report["pieces"] = f.to_json()
    report["status"] = orbit.status
    report["steps"] = orbit.steps
    report["orbit_head"] = [format_rational(x) for x in orbit.points[:20]]
    print(emit(report, args.format))
    return {"reached": 0, "diverged": 1}.get(orbit.status, 2)


def cmd_cantor(args) -> int:
    t = parse_rational(args.t)
    v = bridges.cantor_membership(args.k, t, args.budget_steps)
    report = {
        "command": "cantor",
        "k": args.k,
        "t": format_rational(t),
        "verdict": {Answer.YES: "member", Answer.NO: "not-member", Answer.UNKNOWN: "unknown"}[v.answer],
        "reason": v.reason.value,
    }
    if v.certificate is not None:
        report["certificate"] = certificate_json(v.certificate)
    print(emit(report, args.format))
    return EXIT[v.answer]


# -- parser ----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget-steps", type=int, default=None, help="exploration step budget")
    p.add_argument("--budget-states", type=int, default=None, help="automaton state budget")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdsum", description="Exact target discounted-sum solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    _common(p)
    p.add_argument("--trace", action="store_true", help="include the greedy gap trace")
    p.add_argument("--certificate-only", action="store_true")
    p.add_argument("--timing", action="store_true", help="report wall-clock time")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("batch", help="solve every *.json file of a directory")
    p.add_argument("directory")
    _common(p)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--certificate-only", action="store_true")
    p.add_argument("--jobs", type=int, default=4)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("dsa", help="discounted-sum automaton queries")
    dsub = p.add_subparsers(dest="dsa_command", required=True)
    for name in ("exact-value", "universality", "semi-universality"):
        q = dsub.add_parser(name)
        q.add_argument("automaton")
        q.add_argument("--target", required=True)
        _common(q)
        if name != "exact-value":
            q.add_argument("--strict", action="store_true", default=name == "semi-universality")
            q.add_argument("--non-strict", dest="strict", action="store_false")
    q = dsub.add_parser("inclusion")
    q.add_argument("automaton")
    q.add_argument("other")
    q.add_argument("--strict", action="store_true")
    _common(q)
    q = dsub.add_parser("gadget")
    q.add_argument("--lambda", dest="lam", required=True)
    q.add_argument("--target", required=True)
    _common(q)
    p.set_defaults(func=cmd_dsa)

    p = sub.add_parser("expand", help="greedy expansion trace")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--weights", default="0,1")
    p.add_argument("--start-exponent", type=int, choices=(0, 1), default=1)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("pam", help="orbit of the piecewise-affine map")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--target", required=True)
    _common(p)
    p.set_defaults(func=cmd_pam)

    p = sub.add_parser("cantor", help="middle-kth Cantor set membership")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", required=True)
    _common(p)
    p.set_defaults(func=cmd_cantor)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2, which is reserved for unknown verdicts
        return EXIT_ERROR if exc.code else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR + 1


if __name__ == "__main__":
    sys.exit(main())

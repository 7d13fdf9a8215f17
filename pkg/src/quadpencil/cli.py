"""Command-line front end; every subcommand prints one JSON document."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import sympy

from . import harness
from .exact import DimensionError, PolynomialDomainError, fraction_str
from .finite import BudgetExceeded, DegenerateReduction, count_points, enumerate_r_planes, finite_field, reduce_form, verify_ff_propositions
from .localglobal import DegenerateFormError, Place, global_witt_index, local_invariants, local_witt_index
from .pencil import (
    Pencil,
    PencilPreconditionError,
    curve_point_search,
    discriminant_curve,
    is_smooth,
    member_with_global_witt,
    member_with_local_witt,
    odd_degree_point_detector,
    real_half_hyperbolic_member,
    stratify,
)
from .qform import QuadraticForm

EXIT_OK, EXIT_CAMPAIGN_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


def _load_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", file=path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON: {e.msg}", file=path, line=e.lineno, column=e.colno, position=e.pos)


def _form_from(data) -> QuadraticForm:
    if not isinstance(data, dict):
        raise InputError("a form must be a JSON object")
    if "diagonal" in data:
        return QuadraticForm.diagonal([Fraction(str(x)) for x in data["diagonal"]])
    if "gram" not in data:
        raise InputError("a form needs a 'gram' matrix or a 'diagonal' list")
    return QuadraticForm.from_json(data)


def _load_form(path: str) -> QuadraticForm:
    data = _load_json(path)
    try:
        return _form_from(data)
    except (ValueError, TypeError, ZeroDivisionError, KeyError) as e:
        raise InputError(f"invalid form: {e}", file=path)


def _load_pencil(path: str) -> Pencil:
    data = _load_json(path)
    if not isinstance(data, dict) or "f" not in data or "g" not in data:
        raise InputError("a pencil must be an object with 'f' and 'g'", file=path)
    try:
        from .pencil import build_pencil

        p = build_pencil(_form_from(data["f"]), _form_from(data["g"]))
    except (ValueError, TypeError, ZeroDivisionError, KeyError) as e:
        raise InputError(f"invalid pencil: {e}", file=path)
    if "n" in data and data["n"] != p.n:
        raise InputError(f"declared n={data['n']} but the forms have {p.n + 1} variables", file=path)
    return p


def _place(text: str) -> Place:
    try:
        return Place.parse(text)
    except ValueError as e:
        raise InputError(str(e))


def _det_form_json(p: Pencil) -> dict:
    return {
        "coefficients": [fraction_str(c) for c in p.det_coeffs],
        "integral": [str(c) for c in p.det_polynomial().coeffs],
        "convention": "coefficients[i] multiplies lambda^(n+1-i) * mu^i",
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> tuple[dict, int]:
    p = _load_pencil(args.pencil)
    sm = is_smooth(p)
    out = {"n": p.n, "det_form": _det_form_json(p), "smooth": sm.smooth, "diagnosis": sm.diagnosis}
    if not p.det_is_zero():
        out["stratification"] = stratify(p).to_json()
        for sign in (1, -1):
            out[f"curve_{'plus' if sign > 0 else 'minus'}"] = discriminant_curve(p, sign).to_json()
    else:
        out["stratification"] = {"det_identically_zero": True}
    if sm:
        par, sig = real_half_hyperbolic_member(p)
        out["real_member"] = {"parameter": par.to_json(), "signature": list(sig.as_tuple())}
    return out, EXIT_OK


def cmd_local(args) -> tuple[dict, int]:
    q = _load_form(args.form)
    v = _place(args.place)
    try:
        inv = local_invariants(q, v)
        w = local_witt_index(q, v)
    except DegenerateFormError as e:
        raise InputError(str(e))
    return {"invariants": inv.to_json(), "witt": w.index, "anisotropic_dim": w.anisotropic_dim}, EXIT_OK


def cmd_witt(args) -> tuple[dict, int]:
    q = _load_form(args.form)
    try:
        if args.place:
            v = _place(args.place)
            w = local_witt_index(q, v)
            return {"place": str(v), "witt": w.index, "anisotropic_dim": w.anisotropic_dim}, EXIT_OK
        return global_witt_index(q).to_json(), EXIT_OK
    except DegenerateFormError as e:
        raise InputError(str(e))


def cmd_member_search(args) -> tuple[dict, int]:
    p = _load_pencil(args.pencil)
    if args.r < 0:
        raise InputError("--r must be nonnegative")
    if args.place:
        v = _place(args.place)
        res = member_with_local_witt(p, v, args.r, args.bound)
        out = {"place": str(v), "r": args.r, "bound": args.bound}
        if res is not None:
            out.update(found=True, parameter=res[0].to_json(), witt=res[1].index)
    else:
        res = member_with_global_witt(p, args.r, args.bound)
        out = {"place": "global", "r": args.r, "bound": args.bound}
        if res is not None:
            out.update(found=True, parameter=res[0].to_json(), witt=res[1].to_json())
    if res is None:
        out.update(found=False, outcome=harness.NOT_FOUND)
    return out, EXIT_OK


def cmd_curve(args) -> tuple[dict, int]:
    p = _load_pencil(args.pencil)
    try:
        m = discriminant_curve(p, args.sign)
    except PencilPreconditionError as e:
        raise InputError(str(e))
    out = {"model": m.to_json()}
    if args.points:
        out["points"] = curve_point_search(m, args.bound).to_json()
    if args.odd_degree:
        out["odd_degree"] = odd_degree_point_detector(m).to_json()
    return out, EXIT_OK


def _field_from_q(q: int):
    f = sympy.factorint(q)
    if len(f) != 1:
        raise InputError(f"q={q} is not a prime power")
    (p, m), = f.items()
    if p == 2:
        raise InputError("only odd characteristic is supported")
    return finite_field(p, m)


def cmd_ff(args) -> tuple[dict, int]:
    p = _load_pencil(args.pencil)
    F = _field_from_q(args.q)
    try:
        f, g = reduce_form(p.f, F), reduce_form(p.g, F)
    except DegenerateReduction as e:
        raise InputError(str(e))
    out: dict = {"q": F.q, "modulus": list(F.modulus)}
    try:
        if args.count_points:
            out["points"] = count_points(f, g, F, args.budget)
        if args.planes is not None:
            out["planes"] = enumerate_r_planes([f, g], args.planes, args.budget, keep=args.keep).to_json()
        if args.propositions:
            out["propositions"] = verify_ff_propositions(p, F, args.budget).to_json()
    except BudgetExceeded as e:
        out["budget_exceeded"] = str(e)
    return out, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    places = tuple(args.places.split(",")) if args.places else None
    spec = harness.CampaignSpec(args.theorem, args.n, args.samples, args.coeff_bound, args.height_bound, places, args.seed)
    try:
        spec.resolved()
    except (harness.CampaignError, ValueError) as e:
        raise InputError(str(e))
    report = harness.verify(spec, jobs=args.jobs)
    return report.to_json(timings=not args.no_timings), EXIT_CAMPAIGN_FAILED if report.failed else EXIT_OK


def cmd_generate(args) -> tuple[dict, int]:
    try:
        p = harness.generate_smooth_pencil(args.n, args.coeff_bound, args.seed, args.constraint or (), index=args.index)
    except ValueError as e:
        raise InputError(str(e))
    return p.to_json(), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadpencil", description="Pencils of quadrics over QQ, its completions and finite fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", help="determinant form, smoothness, singular members, real member")
    s.add_argument("pencil")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("local", help="local invariants and Witt index at one place")
    s.add_argument("--place", required=True)
    s.add_argument("form")
    s.set_defaults(func=cmd_local)

    s = sub.add_parser("witt", help="Witt index over QQ (or at one place)")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--global", dest="global_", action="store_true")
    g.add_argument("--place")
    s.add_argument("form")
    s.set_defaults(func=cmd_witt)

    s = sub.add_parser("member-search", help="member containing r hyperbolic planes")
    s.add_argument("--place", help="omit for a global search")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--bound", type=int, default=30)
    s.add_argument("pencil")
    s.set_defaults(func=cmd_member_search)

    s = sub.add_parser("curve", help="discriminant curve y^2 = sign * det")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)
    s.add_argument("--points", action="store_true")
    s.add_argument("--odd-degree", action="store_true")
    s.add_argument("--bound", type=int, default=20)
    s.add_argument("pencil")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("ff", help="finite-field reduction checks")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--count-points", action="store_true")
    s.add_argument("--planes", type=int, metavar="R")
    s.add_argument("--propositions", action="store_true")
    s.add_argument("--keep", type=int, default=0, help="number of subspace bases to print")
    s.add_argument("--budget", type=int, default=10**8)
    s.add_argument("pencil")
    s.set_defaults(func=cmd_ff)

    s = sub.add_parser("verify", help="run a verification campaign")
    s.add_argument("--theorem", required=True, choices=sorted(harness.REGISTRY))
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int)
    s.add_argument("--coeff-bound", type=int)
    s.add_argument("--height-bound", type=int)
    s.add_argument("--places", help="comma separated, e.g. real,2,3")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--no-timings", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("generate", help="random smooth pencil")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--coeff-bound", type=int, default=5)
    s.add_argument("--constraint", action="append", choices=("has-rational-point", "rank3-member"))
    s.set_defaults(func=cmd_generate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        out, code = args.func(args)
    except InputError as e:
        print(json.dumps({"error": str(e), **e.details}))
        return EXIT_INPUT
    except (DimensionError, PolynomialDomainError, PencilPreconditionError) as e:
        print(json.dumps({"error": str(e)}))
        return EXIT_INPUT
    print(json.dumps(out, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Pencils ``lam*f + mu*g`` of quadratic forms.

The determinant binary form ``F(lam, mu) = det(lam*f + mu*g)`` is stored
through its dehomogenization ``P(t) = F(1, t) = det(f + t*g)``;
``coeffs[i]`` is the coefficient of ``lam**(n+1-i) * mu**i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact import (
    IntPolynomial,
    IsolatingInterval,
    as_fraction,
    det_exact,
    exact_divide,
    factor_of_degree,
    fraction_str,
    is_rational_square,
    isolate_real_roots,
    kronecker_factor_upto,
    lcm_of_denominators,
    prime_factors,
    rational_roots,
    rational_sqrt,
    squarefree_part_poly,
)
from .localglobal import (
    REAL,
    GlobalWittResult,
    Place,
    WittIndexResult,
    as_place,
    global_witt_index,
    is_local_square,
    local_witt_index,
)
from .qform import QuadraticForm, RealSignature


class PencilPreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True, order=True)
class MemberParameter:
    """A point ``(lam : mu)`` of P^1(QQ) as coprime integers, ``lam > 0`` or ``(0 : 1)``."""

    lam: int
    mu: int

    def __init__(self, lam, mu):
        lam, mu = as_fraction(lam), as_fraction(mu)
        if lam == 0 and mu == 0:
            raise ValueError("(0 : 0) is not a point of P^1")
        l = math.lcm(lam.denominator, mu.denominator)
        a, b = int(lam * l), int(mu * l)
        g = math.gcd(a, b)
        a, b = a // g, b // g
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        object.__setattr__(self, "lam", a)
        object.__setattr__(self, "mu", b)

    @classmethod
    def from_t(cls, t) -> "MemberParameter":
        """The member ``f + t*g``."""
        return cls(1, t)

    @property
    def t(self) -> Fraction | None:
        return None if self.lam == 0 else Fraction(self.mu, self.lam)

    @property
    def height(self) -> int:
        return max(abs(self.lam), abs(self.mu))

    def __str__(self):
        return f"({self.lam}:{self.mu})"

    def to_json(self) -> dict:
        return {"lambda": str(self.lam), "mu": str(self.mu)}

    @classmethod
    def from_json(cls, d) -> "MemberParameter":
        return cls(Fraction(d["lambda"]), Fraction(d["mu"]))


def parameters_by_height(bound: int) -> Iterator[MemberParameter]:
    """Every point of P^1(QQ) of height <= bound, by increasing height then lexicographically."""
    for h in range(1, bound + 1):
        pts = set()
        for b in range(-h, h + 1):
            if math.gcd(h, b) == 1:
                pts.add((h, b))
        for a in range(0, h):
            for b in (h, -h):
                if math.gcd(a, h) == 1:
                    pts.add(tuple(_normalize(a, b)))
        for a, b in sorted(pts):
            yield MemberParameter(a, b)


def _normalize(a: int, b: int) -> tuple[int, int]:
    p = MemberParameter(a, b)
    return p.lam, p.mu


# ---------------------------------------------------------------------------
# pencils


def _interpolate_fractions(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> list[Fraction]:
    n = len(xs)
    acc = [Fraction(0)] * n
    for i in range(n):
        if ys[i] == 0:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        for k, c in enumerate(basis):
            acc[k] += c * ys[i] / denom
    return acc


@dataclass(frozen=True)
class Pencil:
    f: QuadraticForm
    g: QuadraticForm
    det_coeffs: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        """Ambient projective dimension; the forms have n+1 variables."""
        return self.f.dim - 1

    def member(self, t: MemberParameter) -> QuadraticForm:
        return self.f.combine(t.lam, self.g, t.mu)

    def det_at(self, t: MemberParameter) -> Fraction:
        d = self.n + 1
        return sum((c * t.lam ** (d - i) * t.mu**i for i, c in enumerate(self.det_coeffs)), Fraction(0))

    def det_polynomial(self) -> IntPolynomial:
        """Positive integer multiple of ``P(t) = det(f + t*g)`` with content removed (sign kept)."""
        p = IntPolynomial.from_rationals(self.det_coeffs)
        c = p.content()
        return IntPolynomial(x // c for x in p.coeffs) if c else p

    def reversed_polynomial(self) -> IntPolynomial:
        """``det(s*f + g)`` in the other chart, same normalization."""
        full = list(self.det_coeffs) + [Fraction(0)] * (self.n + 2 - len(self.det_coeffs))
        p = IntPolynomial.from_rationals(reversed(full))
        c = p.content()
        return IntPolynomial(x // c for x in p.coeffs) if c else p

    def det_is_zero(self) -> bool:
        return all(c == 0 for c in self.det_coeffs)

    def swap(self) -> "Pencil":
        return build_pencil(self.g, self.f)

    def to_json(self) -> dict:
        return {"n": self.n, "f": self.f.to_json(), "g": self.g.to_json()}

    @classmethod
    def from_json(cls, data) -> "Pencil":
        p = build_pencil(QuadraticForm.from_json(data["f"]), QuadraticForm.from_json(data["g"]))
        if "n" in data and data["n"] != p.n:
            raise ValueError(f"declared n={data['n']} but forms have {p.f.dim} variables")
        return p


def build_pencil(f: QuadraticForm, g: QuadraticForm) -> Pencil:
    """Pencil with its determinant form, interpolated from ``n+2`` exact determinants."""
    if f.dim != g.dim:
        raise ValueError("f and g must have the same number of variables")
    d = f.dim
    xs = [Fraction(k) for k in range(d + 1)]
    ys = [det_exact(f.combine(1, g, x).gram) for x in xs]
    coeffs = _interpolate_fractions(xs, ys)
    check = Fraction(d + 1)
    lhs = sum((c * check**i for i, c in enumerate(coeffs)), Fraction(0))
    if lhs != det_exact(f.combine(1, g, check).gram):
        raise AssertionError("determinant interpolation failed its spot check")
    return Pencil(f, g, tuple(coeffs))


# ---------------------------------------------------------------------------
# smoothness and stratification


@dataclass(frozen=True)
class SmoothnessReport:
    smooth: bool
    diagnosis: str  # smooth | identically-zero | degree-drop | repeated-root

    def __bool__(self):
        return self.smooth


def is_smooth(p: Pencil) -> SmoothnessReport:
    """Reid's criterion: ``det(lam*f + mu*g)`` is nonzero with only simple roots on P^1."""
    if p.det_is_zero():
        return SmoothnessReport(False, "identically-zero")
    P = p.det_polynomial()
    Q = p.reversed_polynomial()
    # multiplicity of (0:1) resp. (1:0) as a root of the binary form
    if p.n + 1 - P.degree >= 2 or p.n + 1 - Q.degree >= 2:
        return SmoothnessReport(False, "degree-drop")
    sq_p = squarefree_part_poly(P).degree == P.degree
    sq_q = squarefree_part_poly(Q).degree == Q.degree
    if not (sq_p and sq_q):
        return SmoothnessReport(False, "repeated-root")
    return SmoothnessReport(True, "smooth")


@dataclass(frozen=True)
class StratumEntry:
    parameter: MemberParameter | None
    rank: int | None
    multiplicity: int = 1
    interval: IsolatingInterval | None = None

    def to_json(self) -> dict:
        out: dict = {"multiplicity": self.multiplicity}
        if self.parameter is not None:
            out["parameter"] = self.parameter.to_json()
            out["rank"] = self.rank
        else:
            out["irrational"] = True
            out["interval"] = [fraction_str(self.interval.lo), fraction_str(self.interval.hi)]
        return out


@dataclass(frozen=True)
class StratificationReport:
    entries: tuple[StratumEntry, ...]
    irrational_factor_degrees: tuple[int, ...]
    unresolved_degree: int
    det_zero: bool = False

    @property
    def rational_members(self) -> tuple[StratumEntry, ...]:
        return tuple(e for e in self.entries if e.parameter is not None)

    def to_json(self) -> dict:
        return {
            "det_identically_zero": self.det_zero,
            "members": [e.to_json() for e in self.entries],
            "irrational_factor_degrees": list(self.irrational_factor_degrees),
            "unresolved_degree": self.unresolved_degree,
        }


def _root_multiplicity(P: IntPolynomial, r: Fraction) -> int:
    lin = IntPolynomial([-r.numerator, r.denominator])
    m = 0
    while True:
        q = exact_divide(P, lin)
        if q is None:
            return m
        P = q
        m += 1


def stratify(p: Pencil) -> StratificationReport:
    """Singular members: rational roots with ranks, irrational roots by factor degree and isolating interval."""
    if p.det_is_zero():
        return StratificationReport((), (), 0, det_zero=True)
    P = p.det_polynomial().primitive()
    entries = []
    drop = p.n + 1 - P.degree
    if drop:
        par = MemberParameter(0, 1)
        entries.append(StratumEntry(par, p.member(par).rank(), drop))
    rest = P
    for r in rational_roots(P):
        par = MemberParameter.from_t(r)
        m = _root_multiplicity(P, r)
        entries.append(StratumEntry(par, p.member(par).rank(), m))
        lin = IntPolynomial([-r.numerator, r.denominator])
        for _ in range(m):
            rest = exact_divide(rest, lin)
    rest = rest.primitive()
    degrees: list[int] = []
    unresolved = 0
    if rest.degree >= 1:
        sqf = squarefree_part_poly(rest)
        mult = rest.degree // sqf.degree if sqf.degree else 1
        for iv in isolate_real_roots(sqf):
            entries.append(StratumEntry(None, None, mult, iv))
        work = sqf
        while work.degree >= 2:
            h = kronecker_factor_upto(work, 3)
            if h is None:
                break
            degrees.append(h.degree)
            work = exact_divide(work, h).primitive()
        if work.degree >= 1:
            if work.degree <= 7:
                degrees.append(work.degree)
            else:
                unresolved = work.degree
    return StratificationReport(tuple(entries), tuple(sorted(degrees)), unresolved)


# ---------------------------------------------------------------------------
# real members (Mordell)


def real_sample_parameters(p: Pencil) -> list[MemberParameter]:
    """One rational parameter in each arc of P^1(R) cut out by the real singular members."""
    P = p.det_polynomial()
    ivs = isolate_real_roots(squarefree_part_poly(P)) if P.degree >= 1 else []
    if not ivs:
        return [MemberParameter(1, 0)]
    samples = [ivs[0].lo - 1]
    for a, b in zip(ivs, ivs[1:]):
        samples.append((a.hi + b.lo) / 2 if a.hi < b.lo else a.hi)
    samples.append(ivs[-1].hi + 1)
    out = []
    for s in samples:
        # sample points are never roots: interval endpoints avoid roots by construction
        assert P.eval_homogeneous(s.numerator, s.denominator) != 0
        out.append(MemberParameter.from_t(s))
    return out


def real_half_hyperbolic_member(p: Pencil) -> tuple[MemberParameter, RealSignature]:
    """A nonsingular real member of signature 0 or ±1 (contains ``[(n+1)/2]`` hyperbolic planes over R)."""
    if not is_smooth(p):
        raise PencilPreconditionError("Mordell's walk needs a smooth pencil")
    scanned = []
    for par in real_sample_parameters(p):
        sig = p.member(par).signature()
        scanned.append((str(par), sig.as_tuple()))
        if sig.zeros == 0 and abs(sig.positives - sig.negatives) <= 1:
            return par, sig
    raise AssertionError(f"no member of signature 0 or 1 found; pencil={p.to_json()} scanned={scanned}")


# ---------------------------------------------------------------------------
# p-adic members


def _rational_root_parameter(p: Pencil) -> MemberParameter | None:
    P = p.det_polynomial()
    roots = rational_roots(P) if P.degree >= 1 else []
    if roots:
        return MemberParameter.from_t(roots[0])
    if P.degree < p.n + 1:
        return MemberParameter(0, 1)
    return None


def padic_nonsquare_det_member(p: Pencil, prime, max_power: int = 64) -> MemberParameter:
    """A member ``f + lam*g`` whose determinant is nonzero and not a square in QQ_p.

    Walks away from a rational root ``t0`` of the determinant along
    ``t0 + s*p**k``: near a simple root the valuation of ``P`` grows by one
    per step in ``k``, so an odd valuation is reached.
    """
    v = as_place(prime)
    if v.is_real:
        raise PencilPreconditionError("a finite place is required")
    sm = is_smooth(p)
    if not sm:
        raise PencilPreconditionError(f"determinant form is not squarefree ({sm.diagnosis})")
    root = _rational_root_parameter(p)
    if root is None:
        raise PencilPreconditionError("the determinant form has no rational root")
    q = v.prime
    steps = [s for k in range(1, q + 1) for s in (k, -k)]
    for k in range(max_power):
        for s in steps:
            shift = s * q**k
            if root.lam == 0:
                cand = MemberParameter(shift, 1)
            else:
                cand = MemberParameter.from_t(root.t + shift)
            d = p.det_at(cand)
            if d != 0 and not is_local_square(d, v):
                return cand
    raise AssertionError("no nonsquare determinant found near a simple root")


def _members_by_height(p: Pencil, bound: int) -> Iterator[tuple[MemberParameter, QuadraticForm]]:
    for par in parameters_by_height(bound):
        if p.det_at(par) == 0:
            continue
        yield par, p.member(par)


def member_with_local_witt(p: Pencil, v, r: int, search_bound: int) -> tuple[MemberParameter, WittIndexResult] | None:
    """First nonsingular member (by height) whose Witt index over QQ_v is at least ``r``.

    ``None`` means nothing was found up to the bound, not that no such member exists.
    """
    v = as_place(v)
    if r > (p.n + 1) // 2:
        return None
    for par, m in _members_by_height(p, search_bound):
        w = local_witt_index(m, v)
        if w.index >= r:
            return par, w
    return None


def member_with_global_witt(p: Pencil, r: int, search_bound: int) -> tuple[MemberParameter, GlobalWittResult] | None:
    """First nonsingular member (by height) containing ``r`` hyperbolic planes over QQ."""
    if r > (p.n + 1) // 2:
        return None
    for par, m in _members_by_height(p, search_bound):
        # cheap necessary conditions before factoring the diagonal entries
        if local_witt_index(m, REAL).index < r:
            continue
        if local_witt_index(m, Place(2)).index < r:
            continue
        g = global_witt_index(m)
        if g.index >= r:
            return par, g
    return None


# ---------------------------------------------------------------------------
# discriminant curves


@dataclass(frozen=True)
class HyperellipticModel:
    """``y^2 = poly(t)``, an integral model of ``y^2 = sign * det(f + t*g)`` with squarefree content."""

    sign: int
    poly: IntPolynomial
    squarefree: bool

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def genus(self) -> int | None:
        return (self.degree - 1) // 2 if self.squarefree else None

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "poly": [str(c) for c in self.poly.coeffs],
            "degree": self.degree,
            "genus": self.genus,
            "squarefree": self.squarefree,
        }


def _square_part(n: int) -> int:
    """Largest s with s**2 dividing n."""
    import sympy

    s = 1
    for q, e in sympy.factorint(abs(n)).items():
        s *= q ** (e // 2)
    return s


def discriminant_curve(p: Pencil, sign: int) -> HyperellipticModel:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if p.det_is_zero():
        raise PencilPreconditionError("determinant form is identically zero")
    l = lcm_of_denominators(p.det_coeffs)
    ints = [int(sign * c * l * l) for c in p.det_coeffs]
    poly = IntPolynomial(ints)
    s = _square_part(poly.content())
    poly = IntPolynomial(c // (s * s) for c in poly.coeffs)
    return HyperellipticModel(sign, poly, squarefree_part_poly(poly).degree == poly.degree)


@dataclass(frozen=True)
class CurvePoints:
    affine: tuple[tuple[Fraction, Fraction], ...]
    ramification: tuple[Fraction, ...]
    at_infinity: int

    def to_json(self) -> dict:
        return {
            "affine": [[fraction_str(t), fraction_str(y)] for t, y in self.affine],
            "ramification": [fraction_str(t) for t in self.ramification],
            "points_at_infinity": self.at_infinity,
        }


def curve_point_search(m: HyperellipticModel, height_bound: int) -> CurvePoints:
    """Rational points ``(t, y)`` with ``t = a/b``, ``|a|, b <= height_bound``."""
    P = m.poly
    found = []
    for b in range(1, height_bound + 1):
        for a in range(-height_bound, height_bound + 1):
            if math.gcd(a, b) != 1:
                continue
            t = Fraction(a, b)
            y2 = P(t)
            y = rational_sqrt(y2) if y2 >= 0 else None
            if y is None:
                continue
            found.append((t, y))
            if y != 0:
                found.append((t, -y))
    found.sort()
    ram = tuple(rational_roots(P)) if P.degree >= 1 else ()
    if m.degree % 2:
        inf = 1
    else:
        inf = 2 if is_rational_square(Fraction(P.leading)) else 0
    return CurvePoints(tuple(found), ram, inf)


@dataclass(frozen=True)
class OddDegreeVerdict:
    status: str  # "yes" or "unknown"
    reason: str
    witness: object = None

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, Fraction):
            w = fraction_str(w)
        elif isinstance(w, IntPolynomial):
            w = [str(c) for c in w.coeffs]
        return {"status": self.status, "reason": self.reason, "witness": w}


def odd_degree_point_detector(m: HyperellipticModel) -> OddDegreeVerdict:
    """Look for a closed point of odd degree; never concludes that none exists."""
    if m.degree % 2:
        return OddDegreeVerdict("yes", "odd degree model: rational point at infinity")
    P = m.poly
    roots = rational_roots(P)
    if roots:
        return OddDegreeVerdict("yes", "rational ramification point", roots[0])
    sqf = squarefree_part_poly(P)
    if sqf.degree > 3:
        h = factor_of_degree(sqf, 3)
        if h is not None:
            return OddDegreeVerdict("yes", "cubic factor: ramification point of degree 3", h)
    return OddDegreeVerdict("unknown", "no odd-degree factor of degree <= 3 and even degree")

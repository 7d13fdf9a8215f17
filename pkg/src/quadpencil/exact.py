"""Exact rational and integer-polynomial arithmetic.

Scalars are :class:`fractions.Fraction`; polynomials over ZZ are
:class:`IntPolynomial` with coefficients stored lowest degree first.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

Rational = Fraction

#: Largest polynomial degree accepted by the root-finding and factor routines.
DEGREE_CAP = 16


class DimensionError(ValueError):
    pass


class PolynomialDomainError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/4"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


@lru_cache(maxsize=65536)
def prime_factors(n: int) -> tuple[int, ...]:
    """Sorted distinct primes dividing ``|n|`` (empty for 0 and ±1)."""
    n = abs(n)
    if n < 2:
        return ()
    return tuple(sorted(sympy.factorint(n)))


@lru_cache(maxsize=65536)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(sympy.divisors(abs(n)))


def squarefree_part(n: int) -> int:
    """The squarefree integer in the same rational square class as ``n != 0``."""
    if n == 0:
        raise ValueError("zero has no square class")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    a, b = x.numerator, x.denominator
    return math.isqrt(a) ** 2 == a and math.isqrt(b) ** 2 == b


def rational_sqrt(x: Fraction) -> Fraction | None:
    if not is_rational_square(x):
        return None
    return Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator))


# ---------------------------------------------------------------------------
# determinants and linear algebra


def _bareiss(m: list[list[int]]) -> int:
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            a = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (pivot * rowi[j] - a * rowk[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def det_exact(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Each row is first scaled by the lcm of its denominators so the
    elimination runs entirely over the integers.
    """
    rows = [[as_fraction(x) for x in row] for row in matrix]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise DimensionError("determinant needs a non-empty square matrix")
    scale = 1
    ints = []
    for r in rows:
        l = lcm_of_denominators(r)
        scale *= l
        ints.append([int(x * l) for x in r])
    return Fraction(_bareiss(ints), scale)


def rank_exact(matrix: Sequence[Sequence]) -> int:
    return len(rref(matrix)[1])


def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over QQ and the list of pivot columns."""
    m = [[as_fraction(x) for x in row] for row in matrix]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                a = m[i][c]
                m[i] = [x - a * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel ``{x : M x = 0}``."""
    if not matrix:
        if ncols is None:
            raise DimensionError("empty matrix needs an explicit column count")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(matrix)
    ncols = len(red[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*a)]


def primitive_integer_vector(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector, first nonzero entry positive."""
    fr = [as_fraction(x) for x in v]
    l = lcm_of_denominators(fr)
    ints = [int(x * l) for x in fr]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


# ---------------------------------------------------------------------------
# polynomials


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPolynomial:
    """Dense univariate polynomial over ZZ, ``coeffs[i]`` multiplies ``t**i``."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable, lead: int = 1) -> "IntPolynomial":
        """Primitive integer polynomial vanishing at the given rationals."""
        p = cls([lead])
        for r in roots:
            r = as_fraction(r)
            p = p * cls([-r.numerator, r.denominator])
        return p

    @classmethod
    def from_rationals(cls, coeffs: Iterable) -> "IntPolynomial":
        """Clear denominators; the result is a positive multiple of the input."""
        fr = [as_fraction(c) for c in coeffs]
        l = lcm_of_denominators(fr)
        return cls(int(c * l) for c in fr)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        g = self.content()
        if self.leading < 0:
            g = -g
        return IntPolynomial(c // g for c in self.coeffs)

    def __call__(self, x):
        acc = 0 if isinstance(x, int) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_homogeneous(self, num: int, den: int) -> int:
        """``den**deg * p(num/den)``, an integer with the same sign as ``p(num/den)`` when den > 0."""
        d = self.degree
        return sum(c * num**i * den ** (d - i) for i, c in enumerate(self.coeffs))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    def __neg__(self):
        return IntPolynomial(-c for c in self.coeffs)

    def __add__(self, other: "IntPolynomial"):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    def __sub__(self, other: "IntPolynomial"):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                coef = str(c) if (abs(c) != 1 or i == 0) else ("-" if c < 0 else "")
                terms.append(f"{coef}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def _check_cap(p: IntPolynomial) -> None:
    if p.is_zero():
        raise PolynomialDomainError("the zero polynomial is not allowed here")
    if p.degree > DEGREE_CAP:
        raise PolynomialDomainError(f"degree {p.degree} exceeds the cap of {DEGREE_CAP}")


def pseudo_divmod(a: IntPolynomial, b: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
    """``|lc(b)|**(deg a - deg b + 1) * a = q*b + r`` with ``deg r < deg b``.

    Using the absolute value of the leading coefficient keeps ``r`` a
    positive multiple of the true remainder, which Sturm chains rely on.
    """
    if b.is_zero():
        raise ZeroDivisionError("pseudo-division by zero polynomial")
    db = b.degree
    lc = b.leading
    r = list(a.coeffs)
    if len(r) - 1 < db:
        return IntPolynomial(()), a
    delta = len(r) - 1 - db
    q = [0] * (delta + 1)
    alc = abs(lc)
    sgn = 1 if lc > 0 else -1
    for k in range(delta, -1, -1):
        # scale everything by |lc| then cancel the top coefficient
        coef = r[db + k] if db + k < len(r) else 0
        r = [x * alc for x in r]
        q = [x * alc for x in q]
        q[k] += coef * sgn
        for j, bc in enumerate(b.coeffs):
            r[j + k] -= coef * sgn * bc
        r = r[: db + k] if db + k > 0 else []
    return IntPolynomial(q), IntPolynomial(r)


def exact_divide(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial | None:
    """``a / b`` if ``b`` divides ``a`` exactly in ZZ[t], else None."""
    if b.is_zero():
        raise ZeroDivisionError
    r = list(a.coeffs)
    db = b.degree
    if len(r) - 1 < db:
        return IntPolynomial(()) if a.is_zero() else None
    q = [0] * (len(r) - db)
    lc = b.leading
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db]
        if c % lc:
            return None
        qc = c // lc
        q[k] = qc
        if qc:
            for j, bc in enumerate(b.coeffs):
                r[j + k] -= qc * bc
    if any(r):
        return None
    return IntPolynomial(q)


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over QQ[t] (positive leading coefficient)."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        _, r = pseudo_divmod(a, b)
        a, b = b, r.primitive()
    return a.primitive()


def is_squarefree(p: IntPolynomial) -> bool:
    """True iff ``gcd(p, p')`` is constant."""
    _check_cap(p)
    if p.degree <= 1:
        return True
    return poly_gcd(p, p.derivative()).degree == 0


def squarefree_part_poly(p: IntPolynomial) -> IntPolynomial:
    _check_cap(p)
    if p.degree <= 1:
        return p.primitive()
    g = poly_gcd(p, p.derivative())
    out = exact_divide(p.primitive(), g)
    assert out is not None
    return out.primitive()


def rational_roots(p: IntPolynomial) -> list[Fraction]:
    """All rational roots of ``p``, sorted ascending, each verified by exact evaluation."""
    _check_cap(p)
    p = p.primitive()
    roots: list[Fraction] = []
    # split off t**k
    k = 0
    while p.coeffs[k] == 0:
        k += 1
    if k:
        roots.append(Fraction(0))
        p = IntPolynomial(p.coeffs[k:])
    if p.degree >= 1:
        const, lead = p.coeffs[0], p.leading
        seen = set()
        for a in _divisors(const):
            for b in _divisors(lead):
                for s in (1, -1):
                    r = Fraction(s * a, b)
                    if r in seen:
                        continue
                    seen.add(r)
                    if p.eval_homogeneous(r.numerator, r.denominator) == 0:
                        roots.append(r)
    return sorted(roots)


# ---------------------------------------------------------------------------
# real roots


def sturm_sequence(p: IntPolynomial) -> list[IntPolynomial]:
    """Sturm chain built from primitive-part pseudo-remainders."""
    seq = [p, p.derivative()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        _, r = pseudo_divmod(seq[-2], seq[-1])
        if r.is_zero():
            break
        g = r.content()
        seq.append(IntPolynomial(-c // g for c in r.coeffs))
    return seq


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(signs: Iterable[int]) -> int:
    nz = [s for s in signs if s]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def sign_variations(seq: Sequence[IntPolynomial], x: Fraction) -> int:
    return _variations(_sign(q.eval_homogeneous(x.numerator, x.denominator)) for q in seq)


def variations_at_infinity(seq: Sequence[IntPolynomial], positive: bool) -> int:
    signs = []
    for q in seq:
        s = _sign(q.leading)
        if not positive and q.degree % 2:
            s = -s
        signs.append(s)
    return _variations(signs)


def count_real_roots(p: IntPolynomial) -> int:
    seq = sturm_sequence(p)
    return variations_at_infinity(seq, False) - variations_at_infinity(seq, True)


def root_bound(p: IntPolynomial) -> int:
    """Integer Cauchy bound: every real root lies strictly inside (-B, B)."""
    lead = abs(p.leading)
    m = max((abs(c) for c in p.coeffs[:-1]), default=0)
    return 2 + -(-m // lead)


@dataclass(frozen=True)
class IsolatingInterval:
    """Open interval ``(lo, hi)`` holding exactly one real root; endpoints are not roots."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo < x < self.hi


def _clear_point(p: IntPolynomial, lo: Fraction, hi: Fraction) -> Fraction:
    """A rational strictly inside (lo, hi) that is not a root of p."""
    m = (lo + hi) / 2
    step = (hi - lo) / 4
    while p.eval_homogeneous(m.numerator, m.denominator) == 0:
        m = m - step
        step /= 2
    return m


def isolate_real_roots(p: IntPolynomial) -> list[IsolatingInterval]:
    """Disjoint ordered isolating intervals, one per real root of a squarefree ``p``."""
    _check_cap(p)
    if not is_squarefree(p):
        raise PolynomialDomainError("real root isolation needs a squarefree polynomial")
    if p.degree == 0:
        return []
    seq = sturm_sequence(p)
    total = variations_at_infinity(seq, False) - variations_at_infinity(seq, True)
    b = Fraction(root_bound(p))
    out: list[IsolatingInterval] = []
    stack = [(-b, b, sign_variations(seq, -b) - sign_variations(seq, b))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(IsolatingInterval(lo, hi))
            continue
        m = _clear_point(p, lo, hi)
        vm = sign_variations(seq, m)
        stack.append((m, hi, vm - sign_variations(seq, hi)))
        stack.append((lo, m, sign_variations(seq, lo) - vm))
    out.sort(key=lambda iv: iv.lo)
    assert len(out) == total, "Sturm count disagrees with isolation"
    return out


def refine_interval(p: IntPolynomial, iv: IsolatingInterval, width) -> IsolatingInterval:
    """Bisect ``iv`` (a valid isolating interval for p) until narrower than ``width``."""
    width = as_fraction(width)
    lo, hi = iv.lo, iv.hi
    slo = _sign(p.eval_homogeneous(lo.numerator, lo.denominator))
    while hi - lo >= width:
        m = (lo + hi) / 2
        sm = _sign(p.eval_homogeneous(m.numerator, m.denominator))
        if sm == 0:
            d = (hi - lo) / 8
            return IsolatingInterval(m - min(d, width / 4), m + min(d, width / 4))
        if sm == slo:
            lo = m
        else:
            hi = m
    return IsolatingInterval(lo, hi)


# ---------------------------------------------------------------------------
# Kronecker factor search


_KRONECKER_POINTS = (0, 1, -1, 2, -2, 3, -3, 4, -4, 5)


def _interpolate(points: Sequence[int], values: Sequence[int]) -> IntPolynomial | None:
    """Integer polynomial of degree < len(points) through the data, if integral."""
    n = len(points)
    acc = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(zip(points, values)):
        if yi == 0:
            continue
        basis = [Fraction(1)]
        denom = 1
        for j, xj in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, c in enumerate(basis):
            acc[k] += c * yi / denom
    if any(c.denominator != 1 for c in acc):
        return None
    return IntPolynomial(int(c) for c in acc)


def factor_of_degree(p: IntPolynomial, d: int) -> IntPolynomial | None:
    """Search for an integer factor of degree exactly ``d`` (p has no rational roots)."""
    if d > p.degree // 2 and d != p.degree:
        # a factor of degree d exists iff a cofactor of degree deg-d does
        co = factor_of_degree(p, p.degree - d) if p.degree - d >= 1 else None
        if co is None:
            return None
        out = exact_divide(p, co)
        return out.primitive() if out is not None else None
    if d == p.degree:
        return p.primitive()
    # choose d+1 sample points with the fewest divisor combinations
    samples = [(x, p(x)) for x in _KRONECKER_POINTS]
    samples = [s for s in samples if s[1] != 0]
    samples.sort(key=lambda s: (len(_divisors(s[1])), _KRONECKER_POINTS.index(s[0])))
    chosen = samples[: d + 1]
    extra = samples[d + 1:]
    pts = [s[0] for s in chosen]
    choices = []
    for i, (_, val) in enumerate(chosen):
        divs = _divisors(val)
        # h and -h are interchangeable: fix the sign at the first sample point
        choices.append(divs if i == 0 else divs + tuple(-x for x in divs))
    for vals in itertools.product(*choices):
        h = _interpolate(pts, vals)
        if h is None or h.degree != d:
            continue
        if any(h(x) == 0 or v % h(x) for x, v in extra):
            continue
        if exact_divide(p, h) is not None:
            return h.primitive()
    return None


def kronecker_factor_upto(p: IntPolynomial, d: int) -> IntPolynomial | None:
    """A nontrivial integer factor of degree between 1 and ``d`` (``d <= 3``), if one exists.

    Linear factors come from the rational root test; higher degrees use
    Kronecker interpolation over divisor tuples at small sample points.
    """
    _check_cap(p)
    if not 1 <= d <= 3:
        raise ValueError("Kronecker search is limited to 1 <= d <= 3")
    p = p.primitive()
    if p.degree < 2:
        return None
    roots = rational_roots(p)
    if roots:
        r = roots[0]
        return IntPolynomial([-r.numerator, r.denominator])
    for k in range(2, d + 1):
        if k >= p.degree:
            break
        h = factor_of_degree(p, k)
        if h is not None:
            return h
    return None

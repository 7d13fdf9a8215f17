"""Local and global invariants of quadratic forms over QQ.

Hilbert symbols use the classical closed formulas; the Hasse invariant
is ``prod_{i<j} (a_i, a_j)_v`` over a diagonalization.  Witt indices over
``QQ_p`` are read off (rank, determinant class, Hasse invariant) by
splitting hyperbolic planes one at a time; the global index is the
minimum of the local ones (Hasse's subform theorem).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

from .exact import as_fraction, is_rational_square, prime_factors
from .qform import Diagonalization, QuadraticForm, RealSignature


class DegenerateFormError(ValueError):
    pass


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True, order=True)
class Place:
    """A place of QQ; ``prime is None`` is the real place."""

    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None:
            if not isinstance(self.prime, int) or not sympy.isprime(self.prime):
                raise ValueError(f"{self.prime!r} is not a prime")

    @classmethod
    def real(cls) -> "Place":
        return cls(None)

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(int(p))

    @classmethod
    def parse(cls, text) -> "Place":
        if isinstance(text, Place):
            return text
        if isinstance(text, int):
            return cls.finite(text)
        t = str(text).strip().lower()
        if t in ("real", "inf", "infinity", "oo", "r"):
            return cls.real()
        return cls.finite(int(t))

    @property
    def is_real(self) -> bool:
        return self.prime is None

    def __str__(self):
        return "real" if self.prime is None else str(self.prime)

    def sort_key(self):
        return (0, 0) if self.prime is None else (1, self.prime)


REAL = Place.real()


def as_place(v) -> Place:
    return Place.parse(v)


# ---------------------------------------------------------------------------
# valuations and square classes


def valuation(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _split(x: Fraction, p: int) -> tuple[int, int]:
    """``x = p**v * u`` with u a p-adic unit; returns ``(v, n)`` where the integer n ≡ u in square class mod p (mod 8 if p = 2)."""
    n, d = x.numerator, x.denominator
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    # n/d ≡ n*d modulo squares of units
    return v, n * d


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def least_nonresidue(p: int) -> int:
    u = 2
    while legendre(u, p) != -1:
        u += 1
    return u


_UNIT_LABEL_2 = {1: 1, 3: -5, 5: 5, 7: -1}


@dataclass(frozen=True)
class SquareClass:
    """Canonical label of ``QQ_v^* / (QQ_v^*)^2``.

    Labels: real ±1; odd p one of ``1, u, p, u*p`` (u the least quadratic
    nonresidue); p = 2 one of ``±1, ±2, ±5, ±10``.
    """

    place: Place
    label: int

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if other.place != self.place:
            raise ValueError("square classes at different places")
        return square_class(Fraction(self.label * other.label), self.place)

    @property
    def is_square(self) -> bool:
        return self.label == 1

    def __str__(self):
        return str(self.label)


def square_class(a, v) -> SquareClass:
    a = as_fraction(a)
    v = as_place(v)
    if a == 0:
        raise ValueError("zero has no square class")
    if v.is_real:
        return SquareClass(v, 1 if a > 0 else -1)
    p = v.prime
    e, n = _split(a, p)
    if p == 2:
        lab = _UNIT_LABEL_2[n % 8]
        return SquareClass(v, lab * (2 if e % 2 else 1))
    lab = 1 if legendre(n, p) == 1 else least_nonresidue(p)
    return SquareClass(v, lab * (p if e % 2 else 1))


def is_local_square(a, v) -> bool:
    return square_class(a, v).is_square


# ---------------------------------------------------------------------------
# Hilbert symbols


def hilbert_symbol(a, b, v) -> int:
    """``(a, b)_v``: +1 iff ``z^2 = a x^2 + b y^2`` has a nontrivial solution over QQ_v."""
    a, b = as_fraction(a), as_fraction(b)
    v = as_place(v)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    if v.is_real:
        return -1 if (a < 0 and b < 0) else 1
    p = v.prime
    alpha, u = _split(a, p)
    beta, w = _split(b, p)
    if p == 2:
        u %= 8
        w %= 8
        eps_u = ((u - 1) // 2) % 2
        eps_w = ((w - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_w = ((w * w - 1) // 8) % 2
        e = (eps_u * eps_w + alpha * om_w + beta * om_u) % 2
        return -1 if e else 1
    s = 1
    if (alpha * beta * ((p - 1) // 2)) % 2:
        s = -s
    if beta % 2:
        s *= legendre(u, p)
    if alpha % 2:
        s *= legendre(w, p)
    return s


def hasse_invariant(entries, v) -> int:
    """``prod_{i<j} (a_i, a_j)_v`` for a nondegenerate diagonal presentation."""
    if isinstance(entries, Diagonalization):
        entries = entries.entries
    elif isinstance(entries, QuadraticForm):
        entries = entries.diagonalize().entries
    a = [as_fraction(x) for x in entries]
    if any(x == 0 for x in a):
        raise DegenerateFormError("Hasse invariant needs a nondegenerate form")
    v = as_place(v)
    s = 1
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            s *= hilbert_symbol(a[i], a[j], v)
    return s


def _product(entries: Iterable[Fraction]) -> Fraction:
    d = Fraction(1)
    for x in entries:
        d *= x
    return d


# ---------------------------------------------------------------------------
# local invariants and Witt indices


@dataclass(frozen=True)
class LocalInvariants:
    place: Place
    rank: int
    det_class: SquareClass
    hasse: int
    signature: RealSignature | None = None

    def to_json(self) -> dict:
        out = {"place": str(self.place), "rank": self.rank, "det_class": self.det_class.label, "hasse": self.hasse}
        if self.signature is not None:
            out["signature"] = list(self.signature.as_tuple())
        return out


@dataclass(frozen=True)
class WittIndexResult:
    index: int
    anisotropic_dim: int

    @property
    def rank(self) -> int:
        return 2 * self.index + self.anisotropic_dim


def _nondegenerate_entries(q) -> tuple[Fraction, ...]:
    if isinstance(q, QuadraticForm):
        e = q.diagonalize().entries
    elif isinstance(q, Diagonalization):
        e = q.entries
    else:
        e = tuple(as_fraction(x) for x in q)
    if any(x == 0 for x in e):
        raise DegenerateFormError("form is degenerate")
    return e


def local_invariants(q, v) -> LocalInvariants:
    e = _nondegenerate_entries(q)
    v = as_place(v)
    sig = None
    if v.is_real:
        pos = sum(1 for x in e if x > 0)
        sig = RealSignature(pos, len(e) - pos, 0)
    return LocalInvariants(v, len(e), square_class(_product(e), v), hasse_invariant(e, v), sig)


def _padic_isotropic(n: int, d: Fraction, eps: int, v: Place) -> bool:
    """Isotropy over QQ_p of a nondegenerate form with invariants (n, d, eps)."""
    if n <= 1:
        return False
    if n == 2:
        return is_local_square(-d, v)
    if n == 3:
        return eps == hilbert_symbol(-1, -d, v)
    if n == 4:
        return (not is_local_square(d, v)) or eps == hilbert_symbol(-1, -1, v)
    return True


def witt_index_from_invariants(n: int, d, eps: int, v) -> WittIndexResult:
    """Split off hyperbolic planes while the invariants say the form is isotropic.

    For ``q = H + q'`` the residual invariants are ``d' = -d`` and
    ``eps' = eps * (-1, -d)_v``.
    """
    v = as_place(v)
    if v.is_real:
        raise ValueError("use the signature at the real place")
    d = as_fraction(d)
    index = 0
    while _padic_isotropic(n, d, eps, v):
        eps = eps * hilbert_symbol(-1, -d, v)
        d = -d
        n -= 2
        index += 1
    return WittIndexResult(index, n)


def local_witt_index(q, v) -> WittIndexResult:
    """Witt index of a nondegenerate form over the completion QQ_v."""
    e = _nondegenerate_entries(q)
    v = as_place(v)
    if v.is_real:
        pos = sum(1 for x in e if x > 0)
        neg = len(e) - pos
        return WittIndexResult(min(pos, neg), abs(pos - neg))
    return witt_index_from_invariants(len(e), _product(e), hasse_invariant(e, v), v)


def local_isotropic(q, v) -> bool:
    return local_witt_index(q, v).index >= 1


def critical_places(q) -> list[Place]:
    """Real place, 2, and odd primes dividing a numerator or denominator of a diagonal entry."""
    e = _nondegenerate_entries(q)
    primes = {2}
    for x in e:
        primes.update(prime_factors(x.numerator))
        primes.update(prime_factors(x.denominator))
    return [REAL] + [Place.finite(p) for p in sorted(primes)]


def good_place_index(rank: int, det: Fraction) -> int:
    m, odd = divmod(rank, 2)
    if odd:
        return m
    return m if is_rational_square((-1) ** m * det) else m - 1


@dataclass(frozen=True)
class GlobalWittResult:
    index: int
    anisotropic_dim: int
    per_place: dict = field(default_factory=dict)
    good_place_index: int = 0

    def to_json(self) -> dict:
        return {
            "witt": self.index,
            "anisotropic_dim": self.anisotropic_dim,
            "good_places": self.good_place_index,
            "places": [
                {"place": str(v), "witt": r.index, "anisotropic_dim": r.anisotropic_dim}
                for v, r in sorted(self.per_place.items(), key=lambda kv: kv[0].sort_key())
            ],
        }


def global_witt_index(q) -> GlobalWittResult:
    """Witt index over QQ as the minimum of the local indices at all places."""
    e = _nondegenerate_entries(q)
    n = len(e)
    per = {v: local_witt_index(e, v) for v in critical_places(e)}
    good = good_place_index(n, _product(e))
    idx = min([good] + [r.index for r in per.values()])
    return GlobalWittResult(idx, n - 2 * idx, per, good)


@dataclass(frozen=True)
class ContainsReport:
    r: int
    verdict: bool
    per_place: dict
    good_places: bool

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "global": self.verdict,
            "good_places": self.good_places,
            "places": {str(v): ok for v, ok in sorted(self.per_place.items(), key=lambda kv: kv[0].sort_key())},
        }


def contains_rH_report(q, r: int) -> ContainsReport:
    """Does ``q`` contain ``r`` hyperbolic planes, place by place and over QQ."""
    e = _nondegenerate_entries(q)
    if not 0 <= r <= len(e) // 2:
        raise ValueError(f"r must lie in [0, {len(e) // 2}]")
    g = global_witt_index(e)
    per = {v: res.index >= r for v, res in g.per_place.items()}
    good = g.good_place_index >= r
    verdict = g.index >= r
    assert verdict == (good and all(per.values()))
    return ContainsReport(r, verdict, per, good)


# ---------------------------------------------------------------------------
# Brauer classes and Albert forms


@dataclass(frozen=True)
class BrauerClassTwoTorsion:
    """2-torsion Brauer class of QQ stored as the places where the local invariant is -1."""

    ramified: tuple[Place, ...]

    def sign(self, v) -> int:
        return -1 if as_place(v) in self.ramified else 1

    @property
    def is_zero(self) -> bool:
        return not self.ramified

    def __add__(self, other: "BrauerClassTwoTorsion") -> "BrauerClassTwoTorsion":
        s = set(self.ramified) ^ set(other.ramified)
        return BrauerClassTwoTorsion(tuple(sorted(s, key=Place.sort_key)))

    def to_json(self) -> dict:
        return {"ramified": [str(v) for v in self.ramified]}


def _places_of(*xs: Fraction) -> list[Place]:
    primes = {2}
    for x in xs:
        primes.update(prime_factors(x.numerator))
        primes.update(prime_factors(x.denominator))
    return [REAL] + [Place.finite(p) for p in sorted(primes)]


def quaternion_class(a, b) -> BrauerClassTwoTorsion:
    a, b = as_fraction(a), as_fraction(b)
    ram = tuple(v for v in _places_of(a, b) if hilbert_symbol(a, b, v) == -1)
    if len(ram) % 2:
        raise AssertionError(f"reciprocity violated for ({a}, {b})")
    return BrauerClassTwoTorsion(ram)


@dataclass(frozen=True)
class AlbertReport:
    form: QuadraticForm
    clifford: BrauerClassTwoTorsion
    totally_hyperbolic: bool
    isotropic: bool

    def to_json(self) -> dict:
        return {
            "form": self.form.to_json(),
            "clifford": self.clifford.to_json(),
            "totally_hyperbolic": self.totally_hyperbolic,
            "isotropic": self.isotropic,
        }


def albert_form(a, b, c, d) -> QuadraticForm:
    """``<-a, -b, ab, c, d, -cd>``: pure quaternions of (a,b) minus those of (c,d); determinant -1."""
    a, b, c, d = (as_fraction(x) for x in (a, b, c, d))
    return QuadraticForm.diagonal([-a, -b, a * b, c, d, -c * d])


def clifford_albert(a, b, c, d) -> AlbertReport:
    """Clifford invariant ``(a,b) + (c,d)`` of the Albert form and its hyperbolicity.

    Over QQ index equals exponent for Brauer classes, so the index of a
    biquaternion class always divides 2 and every Albert form is
    isotropic; both verdicts are cross-checked against the Witt index.
    """
    vals = [as_fraction(x) for x in (a, b, c, d)]
    if any(x == 0 for x in vals):
        raise ValueError("Albert form entries must be nonzero")
    cls = quaternion_class(vals[0], vals[1]) + quaternion_class(vals[2], vals[3])
    phi = albert_form(*vals)
    witt = global_witt_index(phi).index
    hyperbolic = cls.is_zero
    if hyperbolic != (witt == 3):
        raise AssertionError("Clifford invariant disagrees with the Witt index")
    if witt < 1:
        raise AssertionError("Albert form over QQ found anisotropic")
    return AlbertReport(phi, cls, hyperbolic, True)


def albert_completion(q5: QuadraticForm) -> QuadraticForm:
    """``q5 + <-det(q5)>``, a rank-6 form of determinant class -1."""
    if q5.dim != 5 or q5.rank() != 5:
        raise DegenerateFormError("albert_completion needs a nondegenerate form in 5 variables")
    return q5.direct_sum(QuadraticForm.diagonal([-q5.det()]))


def represents(q, c, v) -> bool:
    """Does the nondegenerate form ``q`` represent ``c != 0`` over QQ_v?"""
    e = _nondegenerate_entries(q)
    return local_witt_index(tuple(e) + (-as_fraction(c),), v).index >= 1

"""Height-bounded exact searches over QQ.

Heights are max-norms of primitive integer coordinate vectors.  Every
search returns ``None`` (or an empty list) when nothing is found within
the bound; that never means nothing exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
import sympy
from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic_normal

from .exact import (
    as_fraction,
    fraction_str,
    lcm_of_denominators,
    nullspace,
    prime_factors,
    primitive_integer_vector,
    rational_sqrt,
    squarefree_part,
)
from .localglobal import REAL, Place, global_witt_index, local_witt_index
from .qform import QuadraticForm, restrict

_INT64_SAFE = 2**62
_CHUNK = 1 << 20


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    coords: tuple[int, ...]

    def __init__(self, coords: Sequence):
        object.__setattr__(self, "coords", primitive_integer_vector(coords))

    @property
    def height(self) -> int:
        return max(abs(x) for x in self.coords)

    def to_json(self) -> dict:
        return {"type": "rational", "coords": [str(x) for x in self.coords]}


# ---------------------------------------------------------------------------
# arithmetic in QQ[x]/(x^2 + b x + c)


def _qa_mul(u, v, b, c):
    # (u0 + u1 x)(v0 + v1 x) with x^2 = -b x - c
    s0 = u[0] * v[0]
    s1 = u[0] * v[1] + u[1] * v[0]
    s2 = u[1] * v[1]
    return (s0 - c * s2, s1 - b * s2)


@dataclass(frozen=True)
class QuadraticPoint:
    """The point ``const + x*lin`` where ``x`` is a root of ``x^2 + b*x + c``."""

    b: Fraction
    c: Fraction
    const: tuple[Fraction, ...]
    lin: tuple[Fraction, ...]

    @property
    def discriminant(self) -> Fraction:
        return self.b * self.b - 4 * self.c

    @property
    def is_split(self) -> bool:
        return rational_sqrt(self.discriminant) is not None

    def evaluate(self, q: QuadraticForm) -> tuple[Fraction, Fraction]:
        """``q`` at the point, as ``(c0, c1)`` meaning ``c0 + c1*x`` reduced modulo the minimal polynomial."""
        pts = list(zip(self.const, self.lin))
        acc0, acc1 = Fraction(0), Fraction(0)
        for i, row in enumerate(q.gram):
            # row_i . p  (linear in x)
            r0 = sum((gij * pj[0] for gij, pj in zip(row, pts) if gij), Fraction(0))
            r1 = sum((gij * pj[1] for gij, pj in zip(row, pts) if gij), Fraction(0))
            t0, t1 = _qa_mul(pts[i], (r0, r1), self.b, self.c)
            acc0 += t0
            acc1 += t1
        return acc0, acc1

    def verify(self, f: QuadraticForm, g: QuadraticForm) -> bool:
        return self.evaluate(f) == (0, 0) and self.evaluate(g) == (0, 0)

    def to_json(self) -> dict:
        return {
            "type": "quadratic",
            "min_poly": [fraction_str(self.c), fraction_str(self.b), "1"],
            "coords": [[fraction_str(a), fraction_str(l)] for a, l in zip(self.const, self.lin)],
        }


@dataclass(frozen=True)
class LineIntersection:
    """Outcome of intersecting a line of one quadric with the rest of the pencil."""

    kind: str  # rational | quadratic | line
    points: tuple[ProjectivePoint, ...] = ()
    quadratic: QuadraticPoint | None = None
    line: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def to_json(self) -> dict:
        if self.kind == "quadratic":
            return self.quadratic.to_json()
        if self.kind == "line":
            return {"type": "line", "coords": [[str(x) for x in v] for v in self.line]}
        return {"type": "rational", "coords": [[str(x) for x in p.coords] for p in self.points]}


# ---------------------------------------------------------------------------
# integer evaluation helpers


def _integer_gram(q: QuadraticForm) -> list[list[int]]:
    l = lcm_of_denominators(x for row in q.gram for x in row)
    return [[int(x * l) for x in row] for row in q.gram]


def _eval_batch(m: list[list[int]], xs: np.ndarray) -> np.ndarray:
    """``x^T M x`` for each row of ``xs``; int64 when provably safe, Python ints otherwise."""
    n = len(m)
    bound = int(np.abs(xs).max()) if xs.size else 0
    worst = sum(abs(v) for row in m for v in row) * bound * bound
    if worst < _INT64_SAFE:
        mm = np.array(m, dtype=np.int64)
        return np.einsum("ki,ij,kj->k", xs, mm, xs)
    obj = xs.astype(object)
    mm = np.array(m, dtype=object)
    return ((obj @ mm) * obj).sum(axis=1)


def _box(dim: int, bound: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    r = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([r] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _normalized_blocks(dim: int, bound: int) -> Iterator[np.ndarray]:
    """All nonzero vectors in ``[-bound, bound]^dim`` with first nonzero entry positive, lexicographically, in chunks."""
    for lead in range(dim):
        tail = dim - lead - 1
        # split the tail so one chunk stays small
        split = 0
        while split < tail and (2 * bound + 1) ** (tail - split) > _CHUNK:
            split += 1
        rest = _box(tail - split, bound)
        for first in range(1, bound + 1):
            prefixes = _box(split, bound) if split else np.zeros((1, 0), dtype=np.int64)
            for pre in prefixes:
                block = np.zeros((rest.shape[0], dim), dtype=np.int64)
                block[:, lead] = first
                block[:, lead + 1 : lead + 1 + split] = pre
                block[:, lead + 1 + split :] = rest
                yield block


def _primitive_mask(xs: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(xs), axis=1) == 1


# ---------------------------------------------------------------------------
# searches


def point_search(f: QuadraticForm, g: QuadraticForm, height_bound: int) -> list[ProjectivePoint]:
    """All points of ``{f = g = 0}`` of height at most ``height_bound``, sorted lexicographically."""
    if f.dim != g.dim:
        raise ValueError("forms must have the same number of variables")
    mf, mg = _integer_gram(f), _integer_gram(g)
    found = []
    for block in _normalized_blocks(f.dim, height_bound):
        block = block[_primitive_mask(block)]
        vf = _eval_batch(mf, block)
        cand = block[vf == 0]
        if cand.size == 0:
            continue
        vg = _eval_batch(mg, cand)
        for row in cand[vg == 0]:
            found.append(tuple(int(x) for x in row))
    return [ProjectivePoint(x) for x in sorted(found)]


def _shell(dim: int, h: int) -> np.ndarray:
    """Primitive normalized vectors of height exactly ``h`` in lexicographic order."""
    parts = []
    for block in _normalized_blocks(dim, h):
        block = block[(np.abs(block).max(axis=1) == h) & _primitive_mask(block)]
        if block.size:
            parts.append(block)
    if not parts:
        return np.zeros((0, dim), dtype=np.int64)
    out = np.concatenate(parts)
    order = np.lexsort(out.T[::-1])
    return out[order]


def _height_isotropic(q: QuadraticForm, bound: int) -> tuple[int, ...] | None:
    m = _integer_gram(q)
    for h in range(1, bound + 1):
        sh = _shell(q.dim, h)
        hits = np.nonzero(_eval_batch(m, sh) == 0)[0]
        if hits.size:
            return tuple(int(x) for x in sh[hits[0]])
    return None


def _squarefree_scaling(a: Fraction) -> tuple[int, Fraction]:
    """``a = d * s^2`` with ``d`` a squarefree integer; returns ``(d, s)``."""
    n = a.numerator * a.denominator
    d = squarefree_part(n)
    s2 = a / d
    s = rational_sqrt(s2)
    assert s is not None
    return d, s


def _mitm_diagonal(entries: Sequence[int], bound: int) -> tuple[int, ...] | None:
    """Nonzero ``y`` with ``sum d_i y_i^2 = 0`` and ``|y_i| <= bound``; smallest height, then lexicographic."""
    n = len(entries)
    k = n // 2
    left = _box(k, bound)
    right = _box(n - k, bound)
    dl = np.array(entries[:k], dtype=object if bound**2 * sum(map(abs, entries)) >= _INT64_SAFE else np.int64)
    dr = np.array(entries[k:], dtype=dl.dtype)
    vl = (left.astype(dl.dtype) ** 2 * dl).sum(axis=1) if k else np.zeros(1, dtype=dl.dtype)
    vr = (right.astype(dr.dtype) ** 2 * dr).sum(axis=1)
    vl = np.asarray(vl, dtype=np.int64) if dl.dtype != object else vl
    vr = np.asarray(vr, dtype=np.int64) if dr.dtype != object else vr
    order = np.argsort(vr, kind="stable")
    svr = vr[order]
    lo = np.searchsorted(svr, -vl, side="left")
    hi = np.searchsorted(svr, -vl, side="right")
    best = None
    for i in np.nonzero(hi > lo)[0]:
        yl = left[i]
        for j in order[lo[i] : hi[i]]:
            yr = right[j]
            if not yl.any() and not yr.any():
                continue
            y = tuple(int(x) for x in np.concatenate([yl, yr]))
            key = (max(abs(x) for x in y), primitive_integer_vector(y))
            if best is None or key < best[0]:
                best = (key, y)
    return None if best is None else best[1][0:n]


def _via_diagonal(q: QuadraticForm, solver) -> tuple[int, ...] | None:
    """Diagonalize, rescale entries to squarefree integers, solve, map back."""
    dg = q.diagonalize()
    cols = [[dg.transform[i][j] for i in range(q.dim)] for j in range(q.dim)]
    for a, col in zip(dg.entries, cols):
        if a == 0:
            return primitive_integer_vector(col)
    ds, ss = zip(*(_squarefree_scaling(a) for a in dg.entries))
    y = solver(list(ds))
    if y is None:
        return None
    coeffs = [Fraction(yi) / s for yi, s in zip(y, ss)]
    x = [sum((c * col[i] for c, col in zip(coeffs, cols)), Fraction(0)) for i in range(q.dim)]
    return primitive_integer_vector(x)


_TERNARY_VARS = sympy.symbols("x0:3", integer=True)


def _ternary_zero(a: int, b: int, c: int) -> list[Fraction] | None:
    """Nontrivial zero of ``a x^2 + b y^2 + c z^2`` (nonzero integers), or ``None`` if anisotropic."""
    coef = [a, b, c]
    scale = [Fraction(1)] * 3

    def squarefree(i):
        d = squarefree_part(coef[i])
        scale[i] /= math.isqrt(coef[i] // d)
        coef[i] = d

    for i in range(3):
        squarefree(i)
    # sympy's solver wants pairwise coprime coefficients:
    # g(a'x^2 + b'y^2) + c z^2 = 0 becomes a'x^2 + b'y^2 + g c w^2 = 0 with z = g w
    changed = True
    while changed:
        changed = False
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            g = math.gcd(coef[i], coef[j])
            if g > 1:
                coef[i] //= g
                coef[j] //= g
                coef[k] *= g
                scale[k] *= g
                squarefree(k)
                changed = True
    sol = diop_ternary_quadratic_normal(sum(cf * x**2 for cf, x in zip(coef, _TERNARY_VARS)))
    if sol[0] is None:
        return None
    out = [Fraction(int(v)) * s for v, s in zip(sol, scale)]
    if a * out[0] ** 2 + b * out[1] ** 2 + c * out[2] ** 2 != 0 or not any(out):
        raise AssertionError(f"ternary solver returned a non-solution for {(a, b, c)}")
    return out


def _locally_isotropic_everywhere(entries: list[int], places: list[Place]) -> bool:
    return all(local_witt_index(entries, v).index >= 1 for v in places)


def _auxiliary_value(head: list[int], rest: list[int], prime_limit: int) -> int | None:
    """``t`` with ``head + <-t>`` and ``rest + <t>`` both isotropic over QQ.

    Candidates are ``t = s*m`` with ``s`` a signed product of the primes
    dividing ``2 * prod(d)`` and ``m`` either 1 or a new prime.  Only the
    places dividing ``2 * prod(d) * m`` and the real place can obstruct,
    since a unimodular form of rank >= 3 at an odd prime is isotropic.
    """
    bad = sorted({2}.union(*(prime_factors(abs(x)) for x in head + rest)))
    divisors = [1]
    for p in bad:
        divisors += [x * p for x in divisors]
    signed = sorted((x * e for x in divisors for e in (1, -1)), key=lambda x: (abs(x), x < 0))
    base_places = [REAL] + [Place(p) for p in bad]
    for m in [1] + [p for p in sympy.primerange(3, prime_limit) if p not in bad]:
        places = base_places + ([Place(m)] if m > 1 else [])
        for s in signed:
            t = s * m
            if _locally_isotropic_everywhere(head + [-t], places) and _locally_isotropic_everywhere(rest + [t], places):
                return t
    return None


def _diagonal_zero(d: list[int], prime_limit: int = 20000) -> list[Fraction] | None:
    """Zero of ``sum d_i x_i^2`` for squarefree nonzero integers ``d_i``.

    Rank 2 and 3 are solved directly.  Above that the form is split as
    ``<d0, d1> + rest`` and an auxiliary ``t`` is chosen so that
    ``<d0, d1, -t>`` and ``rest + <t>`` are both isotropic (decided by the
    local-global invariants); the two smaller zeros are then glued.
    """
    n = len(d)
    if n < 2:
        return None
    if n == 2:
        r = rational_sqrt(Fraction(-d[1], d[0]))
        return None if r is None else [r, Fraction(1)]
    if n == 3:
        return _ternary_zero(*d)
    if global_witt_index(d).index == 0:
        return None
    head = _diagonal_zero(d[:2])
    if head is not None:
        return head + [Fraction(0)] * (n - 2)
    rest = d[2:]
    if global_witt_index(rest).index >= 1:
        return [Fraction(0), Fraction(0)] + _diagonal_zero(rest, prime_limit)
    t = _auxiliary_value(d[:2], rest, prime_limit)
    if t is None:
        return None
    x = _ternary_zero(d[0], d[1], -t)
    y = _diagonal_zero(rest + [t], prime_limit)
    # rest alone is anisotropic, so y[-1] != 0; <d0, d1> is anisotropic, so x[2] != 0
    z, w = x[2], y[-1]
    return [x[0] * w, x[1] * w] + [yi * z for yi in y[:-1]]


def _auto_height(dim: int, bound: int) -> int:
    # keep the height scan below roughly 10^5 vectors
    h = 1
    while h < bound and (2 * h + 3) ** dim <= 2 * 10**5:
        h += 1
    return h


def isotropic_vector(q: QuadraticForm, height_bound: int, strategy: str = "height") -> ProjectivePoint | None:
    """A nonzero ``v`` with ``q(v) = 0``.

    ``strategy="height"`` scans primitive vectors by height (so the result
    has height <= bound); ``"mitm"`` diagonalizes and runs a
    meet-in-the-middle search on the diagonal coordinates, which reaches
    much larger heights in the original coordinates; ``"descent"``
    diagonalizes and solves exactly, ignoring the bound, returning
    ``None`` only for anisotropic forms; ``"auto"`` tries a cheap height
    scan before falling back to descent.
    """
    if strategy == "height":
        v = _height_isotropic(q, height_bound)
    elif strategy == "mitm":
        v = _via_diagonal(q, lambda d: _mitm_diagonal(d, height_bound))
    elif strategy == "descent":
        v = _via_diagonal(q, _diagonal_zero)
    elif strategy == "auto":
        v = _height_isotropic(q, _auto_height(q.dim, height_bound))
        if v is None:
            v = _via_diagonal(q, _diagonal_zero)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if v is None:
        return None
    assert q.evaluate(v) == 0
    return ProjectivePoint(v)


def isotropic_subspace(q: QuadraticForm, k: int, height_bound: int, strategy: str = "height") -> list[ProjectivePoint] | None:
    """``k`` independent vectors spanning a totally isotropic subspace.

    Greedy: take an isotropic ``u``, pass to a complement of ``u`` inside
    ``u``-perp and recurse.
    """
    basis = [[Fraction(int(i == j)) for j in range(q.dim)] for i in range(q.dim)]
    cur = q
    out: list[ProjectivePoint] = []
    for _ in range(k):
        if cur.dim == 0:
            return None
        w = isotropic_vector(cur, height_bound, strategy)
        if w is None:
            return None
        u = [sum((wi * b[j] for wi, b in zip(w.coords, basis)), Fraction(0)) for j in range(q.dim)]
        out.append(ProjectivePoint(u))
        if len(out) == k:
            break
        gw = [sum((row[j] * w.coords[j] for j in range(cur.dim)), Fraction(0)) for row in cur.gram]
        # kernel basis vectors are indexed by free columns, so w expands with its free coordinates
        pivot = next((j for j, x in enumerate(gw) if x != 0), None)
        free = [c for c in range(cur.dim) if c != pivot]
        perp = nullspace([gw], cur.dim)
        drop = next(i for i, c in enumerate(free) if w.coords[c] != 0)
        kept = [list(primitive_integer_vector(v)) for i, v in enumerate(perp) if i != drop]
        if not kept:
            return None
        basis = [[sum((v[i] * basis[i][j] for i in range(cur.dim)), Fraction(0)) for j in range(q.dim)] for v in kept]
        cur = restrict(q, basis, check=False)
    for i, u in enumerate(out):
        assert q.evaluate(u.coords) == 0
        for v in out[:i]:
            assert q.bilinear(u.coords, v.coords) == 0
    return out


def isotropic_plane(q: QuadraticForm, height_bound: int, strategy: str = "height") -> tuple[ProjectivePoint, ProjectivePoint] | None:
    res = isotropic_subspace(q, 2, height_bound, strategy)
    return None if res is None else (res[0], res[1])


def quadratic_point_from_line(f: QuadraticForm, g: QuadraticForm, u: Sequence, v: Sequence, member=None) -> LineIntersection:
    """Intersect the line ``span(u, v)`` lying on a member of the pencil with the rest of ``{f = g = 0}``.

    ``member`` is the ``(lam, mu)`` of the quadric containing the line, when
    known; the complementary form is then ``g`` (or ``f`` for ``(0 : 1)``).
    Otherwise whichever of ``f``, ``g`` does not vanish on the line is used.
    """
    u = [as_fraction(x) for x in u]
    v = [as_fraction(x) for x in v]

    def vanishes(h):
        return h.evaluate(u) == 0 and h.evaluate(v) == 0 and h.bilinear(u, v) == 0

    if member is not None and getattr(member, "lam", 1) == 0:
        order = (f, g)
    else:
        order = (g, f)
    h = next((x for x in order if not vanishes(x)), None)
    if h is None:
        return LineIntersection("line", line=(primitive_integer_vector(u), primitive_integer_vector(v)))
    a, b, c = h.evaluate(u), 2 * h.bilinear(u, v), h.evaluate(v)
    pts: list[ProjectivePoint] = []
    if a == 0:
        pts.append(ProjectivePoint(u))
        if b != 0:
            pts.append(ProjectivePoint([c * x - b * y for x, y in zip(u, v)]))
    else:
        bb, cc = b / a, c / a
        disc = bb * bb - 4 * cc
        r = rational_sqrt(disc)
        if r is None:
            qp = QuadraticPoint(bb, cc, tuple(v), tuple(u))
            if not qp.verify(f, g):
                raise AssertionError("quadratic point failed exact verification")
            return LineIntersection("quadratic", quadratic=qp)
        for s in sorted({(-bb + r) / 2, (-bb - r) / 2}):
            pts.append(ProjectivePoint([s * x + y for x, y in zip(u, v)]))
    pts = sorted(set(pts))
    for p in pts:
        if f.evaluate(p.coords) != 0 or g.evaluate(p.coords) != 0:
            raise AssertionError("rational point failed exact verification")
    return LineIntersection("rational", points=tuple(pts))

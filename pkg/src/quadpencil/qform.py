"""Quadratic forms over QQ given by symmetric Gram matrices.

Convention: ``q(x) = x^T G x``, so the monomial ``c*x_i*x_j`` (i != j)
contributes ``c/2`` to both ``G[i][j]`` and ``G[j][i]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import (
    DimensionError,
    as_fraction,
    det_exact,
    fraction_str,
    rank_exact,
)


@dataclass(frozen=True)
class RealSignature:
    positives: int
    negatives: int
    zeros: int

    @property
    def dim(self) -> int:
        return self.positives + self.negatives + self.zeros

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.positives, self.negatives, self.zeros)


@dataclass(frozen=True)
class Diagonalization:
    """``transform^T * gram * transform == diag(entries)``; columns of ``transform`` are the new basis."""

    entries: tuple[Fraction, ...]
    transform: tuple[tuple[Fraction, ...], ...]

    @property
    def rank(self) -> int:
        return sum(1 for a in self.entries if a != 0)

    @property
    def nonzero_entries(self) -> tuple[Fraction, ...]:
        return tuple(a for a in self.entries if a != 0)


@dataclass(frozen=True)
class QuadraticForm:
    gram: tuple[tuple[Fraction, ...], ...]

    def __init__(self, gram: Sequence[Sequence]):
        g = tuple(tuple(as_fraction(x) for x in row) for row in gram)
        n = len(g)
        if n == 0:
            raise DimensionError("a quadratic form needs at least one variable")
        if any(len(row) != n for row in g):
            raise DimensionError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "_cache", {})

    # -- constructors -------------------------------------------------------

    @classmethod
    def diagonal(cls, entries: Iterable) -> "QuadraticForm":
        e = [as_fraction(x) for x in entries]
        n = len(e)
        return cls([[e[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, dim: int) -> "QuadraticForm":
        return cls([[0] * dim for _ in range(dim)])

    @classmethod
    def from_monomials(cls, dim: int, coeffs: Mapping[tuple[int, int], object]) -> "QuadraticForm":
        """Build from ``{(i, j): c}`` meaning ``c * x_i * x_j``; cross terms are halved."""
        g = [[Fraction(0)] * dim for _ in range(dim)]
        for (i, j), c in coeffs.items():
            c = as_fraction(c)
            if not (0 <= i < dim and 0 <= j < dim):
                raise DimensionError(f"monomial x{i}*x{j} outside {dim} variables")
            if i == j:
                g[i][i] += c
            else:
                g[i][j] += c / 2
                g[j][i] += c / 2
        return cls(g)

    @classmethod
    def from_coefficient_list(cls, dim: int, coeffs: Sequence) -> "QuadraticForm":
        """Coefficients of ``x_i*x_j`` for ``i <= j`` in lexicographic order of (i, j)."""
        pairs = [(i, j) for i in range(dim) for j in range(i, dim)]
        if len(coeffs) != len(pairs):
            raise DimensionError(f"expected {len(pairs)} monomial coefficients, got {len(coeffs)}")
        return cls.from_monomials(dim, dict(zip(pairs, coeffs)))

    # -- basic data ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.gram)

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(fraction_str(x) for x in r) + "]" for r in self.gram)
        return f"QuadraticForm([{rows}])"

    def is_diagonal(self) -> bool:
        return all(self.gram[i][j] == 0 for i in range(self.dim) for j in range(self.dim) if i != j)

    def det(self) -> Fraction:
        c = self._cache
        if "det" not in c:
            c["det"] = det_exact(self.gram)
        return c["det"]

    def rank(self) -> int:
        c = self._cache
        if "rank" not in c:
            c["rank"] = rank_exact(self.gram)
        return c["rank"]

    def is_nondegenerate(self) -> bool:
        return self.det() != 0

    def evaluate(self, v: Sequence) -> Fraction:
        return self.bilinear(v, v)

    def bilinear(self, u: Sequence, v: Sequence) -> Fraction:
        if len(u) != self.dim or len(v) != self.dim:
            raise DimensionError(f"vectors must have length {self.dim}")
        u = [as_fraction(x) for x in u]
        v = [as_fraction(x) for x in v]
        total = Fraction(0)
        for i, ui in enumerate(u):
            if ui:
                row = self.gram[i]
                total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj), Fraction(0))
        return total

    # -- algebra ------------------------------------------------------------

    def scale(self, c) -> "QuadraticForm":
        c = as_fraction(c)
        return QuadraticForm([[c * x for x in row] for row in self.gram])

    def __add__(self, other: "QuadraticForm") -> "QuadraticForm":
        if other.dim != self.dim:
            raise DimensionError("forms must have the same number of variables")
        return QuadraticForm([[a + b for a, b in zip(r, s)] for r, s in zip(self.gram, other.gram)])

    def combine(self, lam, other: "QuadraticForm", mu) -> "QuadraticForm":
        """``lam*self + mu*other``."""
        lam, mu = as_fraction(lam), as_fraction(mu)
        if other.dim != self.dim:
            raise DimensionError("forms must have the same number of variables")
        return QuadraticForm([[lam * a + mu * b for a, b in zip(r, s)] for r, s in zip(self.gram, other.gram)])

    def transform(self, u: Sequence[Sequence]) -> "QuadraticForm":
        """Gram matrix ``U^T G U``; columns of ``u`` give the new basis."""
        cols = [[as_fraction(u[i][j]) for i in range(len(u))] for j in range(len(u[0]))]
        return restrict(self, cols, check=False)

    def direct_sum(self, other: "QuadraticForm") -> "QuadraticForm":
        n, m = self.dim, other.dim
        g = [[Fraction(0)] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                g[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                g[n + i][n + j] = other.gram[i][j]
        return QuadraticForm(g)

    def diagonalize(self) -> Diagonalization:
        c = self._cache
        if "diag" not in c:
            c["diag"] = diagonalize(self)
        return c["diag"]

    def signature(self) -> RealSignature:
        return signature(self)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"dim": self.dim, "gram": [[fraction_str(x) for x in row] for row in self.gram]}

    @classmethod
    def from_json(cls, data) -> "QuadraticForm":
        if isinstance(data, str):
            data = json.loads(data)
        gram = data["gram"]
        q = cls([[Fraction(str(x)) for x in row] for row in gram])
        if "dim" in data and data["dim"] != q.dim:
            raise DimensionError(f"declared dim {data['dim']} does not match Gram size {q.dim}")
        return q


def diagonalize(q: QuadraticForm) -> Diagonalization:
    """Symmetric Gauss congruence diagonalization.

    Pivot rule: first nonzero diagonal entry among the remaining indices,
    otherwise the first nonzero off-diagonal pair ``(i, j)`` which is
    turned into a diagonal pivot by ``e_i <- e_i + e_j``.
    """
    n = q.dim
    a = [list(row) for row in q.gram]
    u = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    def add_col(dst, src, c):
        # basis change e_dst <- e_dst + c*e_src, applied as a congruence
        for row in a:
            row[dst] += c * row[src]
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        for row in u:
            row[dst] += c * row[src]

    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            add_col(i, j, Fraction(1))
            piv = i
        if piv != k:
            swap(piv, k)
        p = a[k][k]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                add_col(j, k, -a[k][j] / p)
    entries = tuple(a[i][i] for i in range(n))
    return Diagonalization(entries, tuple(tuple(r) for r in u))


def signature(q: QuadraticForm) -> RealSignature:
    e = q.diagonalize().entries
    return RealSignature(sum(1 for x in e if x > 0), sum(1 for x in e if x < 0), sum(1 for x in e if x == 0))


def evaluate(q: QuadraticForm, v: Sequence) -> Fraction:
    return q.evaluate(v)


def restrict(q: QuadraticForm, basis: Sequence[Sequence], check: bool = True) -> QuadraticForm:
    """Gram matrix of ``q`` on ``span(basis)`` written in the given basis."""
    vecs = [[as_fraction(x) for x in b] for b in basis]
    if not vecs or len(vecs) > q.dim:
        raise DimensionError("basis must contain between 1 and dim vectors")
    if any(len(b) != q.dim for b in vecs):
        raise DimensionError(f"basis vectors must have length {q.dim}")
    if check and rank_exact(vecs) != len(vecs):
        raise DimensionError("basis vectors are linearly dependent")
    gv = [[sum((q.gram[i][j] * b[j] for j in range(q.dim) if b[j]), Fraction(0)) for i in range(q.dim)] for b in vecs]
    return QuadraticForm([[sum((x * y for x, y in zip(bi, gj)), Fraction(0)) for gj in gv] for bi in vecs])


def hyperbolic_plane() -> QuadraticForm:
    return QuadraticForm.diagonal([1, -1])

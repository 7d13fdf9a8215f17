"""Brute-force arithmetic geometry over finite fields of odd order.

Elements of ``F_q`` (``q = p^m``) are integers ``0 <= e < q`` read as
base-``p`` digit vectors, i.e. coefficient lists of polynomials modulo the
lexicographically least monic irreducible of degree ``m``.  Addition and
multiplication go through precomputed ``q x q`` tables so that whole
numpy arrays of elements can be combined by fancy indexing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import sympy

from .exact import as_fraction
from .localglobal import WittIndexResult
from .qform import QuadraticForm

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


class DegenerateReduction(ValueError):
    pass


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    m = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # mod is monic
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for j in range(m + 1):
                prod[k - m + j] = (prod[k - m + j] - c * mod[j]) % p
    return (prod + [0] * m)[:m]


def _is_irreducible(coeffs: list[int], p: int) -> bool:
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
    return poly.is_irreducible


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``m`` over ``F_p``, least in lexicographic order of ``(c_0, ..., c_{m-1})``."""
    if m == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=m):
        coeffs = list(low) + [1]
        if coeffs[0] == 0:
            continue
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")


class FiniteField:
    """``F_{p^m}`` with ``p`` odd."""

    def __init__(self, p: int, m: int = 1):
        if p == 2 or not sympy.isprime(p):
            raise ValueError("p must be an odd prime")
        if m < 1:
            raise ValueError("extension degree must be positive")
        self.p, self.m = p, m
        self.q = q = p**m
        self.modulus = least_irreducible(p, m)
        digits = np.array([[(e // p**i) % p for i in range(m)] for e in range(q)], dtype=np.int64)
        weights = p ** np.arange(m, dtype=np.int64)
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        # multiplication via discrete logs of a primitive element
        gen, log, exp = self._find_generator(digits)
        mul = np.zeros((q, q), dtype=np.int64)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        self.mul = mul
        inv = np.zeros(q, dtype=np.int64)
        inv[nz] = exp[(-log[nz]) % (q - 1)]
        self.inv = inv
        self.generator = gen
        self.is_square = np.zeros(q, dtype=bool)
        self.is_square[0] = True
        self.is_square[nz] = log[nz] % 2 == 0

    def _find_generator(self, digits):
        p, m, q = self.p, self.m, self.q
        mod = list(self.modulus)
        for cand in range(1, q):
            powers = np.zeros(q - 1, dtype=np.int64)
            cur = [1] + [0] * (m - 1)
            poly = [int(d) for d in digits[cand]]
            seen = set()
            ok = True
            for k in range(q - 1):
                e = sum(c * p**i for i, c in enumerate(cur))
                if e in seen:
                    ok = False
                    break
                seen.add(e)
                powers[k] = e
                cur = _poly_mulmod(cur, poly, mod, p) if m > 1 else [(cur[0] * poly[0]) % p]
            if ok:
                log = np.zeros(q, dtype=np.int64)
                log[powers] = np.arange(q - 1)
                return cand, log, powers
        raise AssertionError("no primitive element")

    def __repr__(self):
        return f"FiniteField({self.p}, {self.m})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self):
        return hash((self.p, self.m))

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime field."""
        return n % self.p

    def from_rational(self, x) -> int:
        x = as_fraction(x)
        if x.denominator % self.p == 0:
            raise DegenerateReduction(f"{x} has a denominator divisible by {self.p}")
        return int(self.mul[x.numerator % self.p, self.inv[x.denominator % self.p]])

    def power(self, a: int, k: int) -> int:
        out = 1
        base = a
        while k:
            if k & 1:
                out = int(self.mul[out, base])
            base = int(self.mul[base, base])
            k >>= 1
        return out

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)


@lru_cache(maxsize=32)
def finite_field(p: int, m: int = 1) -> FiniteField:
    return FiniteField(p, m)


# ---------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class FFForm:
    field: FiniteField
    gram: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.gram)

    def __post_init__(self):
        n = len(self.gram)
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("Gram matrix must be symmetric")

    def combine(self, lam: int, other: "FFForm", mu: int) -> "FFForm":
        F = self.field
        return FFForm(
            F,
            tuple(
                tuple(int(F.add[F.mul[lam, a], F.mul[mu, b]]) for a, b in zip(r, s))
                for r, s in zip(self.gram, other.gram)
            ),
        )

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        """``x^T G x`` for each row of ``xs``."""
        F = self.field
        n = self.dim
        acc = np.zeros(xs.shape[0], dtype=np.int64)
        for i in range(n):
            # row_i . x
            lin = np.zeros(xs.shape[0], dtype=np.int64)
            for j in range(n):
                gij = self.gram[i][j]
                if gij:
                    lin = F.add[lin, F.mul[gij, xs[:, j]]]
            acc = F.add[acc, F.mul[xs[:, i], lin]]
        return acc

    def linear_functional(self, v: Sequence[int]) -> list[int]:
        """Coefficients of ``x -> B(v, x)`` with ``B`` the Gram bilinear form."""
        F = self.field
        out = []
        for j in range(self.dim):
            acc = 0
            for i in range(self.dim):
                if v[i] and self.gram[i][j]:
                    acc = int(F.add[acc, F.mul[v[i], self.gram[i][j]]])
            out.append(acc)
        return out

    def evaluate(self, v: Sequence[int]) -> int:
        return int(self.evaluate_batch(np.array([v], dtype=np.int64))[0])

    def to_json(self) -> dict:
        return {"q": self.field.q, "gram": [list(r) for r in self.gram]}


def reduce_form(q: QuadraticForm, F: FiniteField) -> FFForm:
    return FFForm(F, tuple(tuple(F.from_rational(x) for x in row) for row in q.gram))


def ff_det(form: FFForm) -> int:
    F = form.field
    a = [list(r) for r in form.gram]
    n = len(a)
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = int(F.neg[det])
        det = int(F.mul[det, a[k][k]])
        inv = int(F.inv[a[k][k]])
        for i in range(k + 1, n):
            if a[i][k]:
                c = int(F.mul[a[i][k], inv])
                a[i] = [int(F.add[x, F.neg[F.mul[c, y]]]) for x, y in zip(a[i], a[k])]
    return det


def ff_witt_index(form: FFForm) -> WittIndexResult:
    """Closed form: rank ``2m+1`` gives ``m``; rank ``2m`` gives ``m`` iff ``(-1)^m det`` is a square, else ``m-1``."""
    F = form.field
    d = ff_det(form)
    if d == 0:
        raise DegenerateReduction("form is degenerate over the residue field")
    n = form.dim
    if n % 2:
        idx = n // 2
    else:
        m = n // 2
        sgn = 1 if m % 2 == 0 else int(F.neg[1])
        idx = m if F.is_square[F.mul[sgn, d]] else m - 1
    return WittIndexResult(idx, n - 2 * idx)


# ---------------------------------------------------------------------------
# enumeration


def projective_representatives(F: FiniteField, dim: int) -> np.ndarray:
    """One representative per point of ``P^{dim-1}(F_q)``: first nonzero coordinate equal to 1."""
    blocks = []
    q = F.q
    for lead in range(dim):
        tail = dim - lead - 1
        grid = np.indices((q,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((grid.shape[0], dim), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = grid
        blocks.append(block)
    return np.concatenate(blocks)


def count_points(f: FFForm, g: FFForm | None, F: FiniteField | None = None, budget: int = DEFAULT_BUDGET) -> int:
    """``#X(F_q)`` for ``X = {f = g = 0}`` in ``P^{n}``; ``g=None`` counts points on one quadric."""
    F = F or f.field
    n1 = f.dim
    total = (F.q**n1 - 1) // (F.q - 1)
    if total * n1 * n1 > budget:
        raise BudgetExceeded(f"{total} points times {n1 * n1} terms exceeds budget {budget}")
    pts = projective_representatives(F, n1)
    mask = f.evaluate_batch(pts) == 0
    if g is not None:
        mask &= g.evaluate_batch(pts) == 0
    return int(mask.sum())


def count_points_naive(f: FFForm, g: FFForm | None) -> int:
    """Straight double loop over affine vectors, counting nonzero zeros divided by ``q-1``."""
    F = f.field
    q, n = F.q, f.dim

    def ev(form, x):
        acc = 0
        for i in range(n):
            for j in range(n):
                acc = int(F.add[acc, F.mul[form.gram[i][j], F.mul[x[i], x[j]]]])
        return acc

    hits = 0
    for x in itertools.product(range(q), repeat=n):
        if not any(x):
            continue
        if ev(f, x) == 0 and (g is None or ev(g, x) == 0):
            hits += 1
    return hits // (q - 1)


def _solve_affine(F: FiniteField, rows: list[list[int]], rhs: list[int], nvars: int):
    """Solutions of ``rows @ x = rhs`` over ``F_q``: a particular solution and a kernel basis, or ``None``."""
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = int(F.inv[a[r][c]])
        a[r] = [int(F.mul[inv, x]) for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                k = a[i][c]
                a[i] = [int(F.add[x, F.neg[F.mul[k, y]]]) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    if any(row[nvars] for row in a[r:]):
        return None
    part = [0] * nvars
    for row, c in zip(a, pivots):
        part[c] = row[nvars]
    basis = []
    for fc in (c for c in range(nvars) if c not in pivots):
        v = [0] * nvars
        v[fc] = 1
        for row, c in zip(a, pivots):
            v[c] = int(F.neg[row[fc]])
        basis.append(v)
    return part, basis


def _affine_span(F: FiniteField, part: list[int], basis: list[list[int]]) -> np.ndarray:
    k = len(basis)
    coeffs = np.indices((F.q,) * k).reshape(k, -1).T if k else np.zeros((1, 0), dtype=np.int64)
    out = np.tile(np.array(part, dtype=np.int64), (coeffs.shape[0], 1))
    for i, b in enumerate(basis):
        for j, bj in enumerate(b):
            if bj:
                out[:, j] = F.add[out[:, j], F.mul[bj, coeffs[:, i]]]
    return out


@dataclass
class PlaneCount:
    r: int
    count: int
    work: int
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"r": self.r, "count": self.count, "work": self.work, "witnesses": [[list(map(int, row)) for row in w] for w in self.witnesses]}


def enumerate_r_planes(forms: Sequence[FFForm], r: int, budget: int = DEFAULT_BUDGET, keep: int = 0) -> PlaneCount:
    """Projective ``r``-planes on which every form in ``forms`` vanishes.

    Subspaces are enumerated through reduced row echelon bases.  For a
    fixed pivot set the free coordinates of each row are known, and the
    orthogonality conditions against the rows already chosen are linear,
    so each new row ranges over an affine solution space that is then
    filtered by the quadratic conditions.  ``work`` counts candidate
    vectors evaluated; exceeding ``budget`` raises ``BudgetExceeded``.
    """
    if not forms:
        raise ValueError("need at least one form")
    F = forms[0].field
    n1 = forms[0].dim
    k = r + 1
    if k > n1 or r < 0:
        raise ValueError("r-plane does not fit in the ambient space")
    work = 0
    count = 0
    witnesses = []
    for pivots in itertools.combinations(range(n1), k):
        pset = set(pivots)
        free_cols = [[c for c in range(p + 1, n1) if c not in pset] for p in pivots]
        # rows with fewer free entries first: smaller candidate sets early
        order = sorted(range(k), key=lambda i: len(free_cols[i]))
        stack = [((), 0)]
        while stack:
            chosen, depth = stack.pop()
            if depth == k:
                count += 1
                if len(witnesses) < keep:
                    rows = dict(zip(order, chosen))
                    witnesses.append([rows[i] for i in range(k)])
                continue
            i = order[depth]
            fc = free_cols[i]
            # linear constraints B_h(row, prev) = 0 on the free entries
            eqs, rhs = [], []
            for prev in chosen:
                for h in forms:
                    lin = h.linear_functional(prev)
                    eqs.append([lin[c] for c in fc])
                    rhs.append(int(F.neg[lin[pivots[i]]]))
            sol = _solve_affine(F, eqs, rhs, len(fc))
            if sol is None:
                continue
            part, basis = sol
            work += F.q ** len(basis)
            if work > budget:
                raise BudgetExceeded(f"plane enumeration exceeded budget {budget}")
            free_vals = _affine_span(F, part, basis)
            cand = np.zeros((free_vals.shape[0], n1), dtype=np.int64)
            cand[:, pivots[i]] = 1
            if fc:
                cand[:, fc] = free_vals
            mask = np.ones(cand.shape[0], dtype=bool)
            for h in forms:
                mask &= h.evaluate_batch(cand) == 0
            for row in cand[mask][::-1]:
                stack.append((chosen + (tuple(int(x) for x in row),), depth + 1))
    return PlaneCount(r, count, work, witnesses)


def max_isotropic_dimension(form: FFForm, budget: int = DEFAULT_BUDGET) -> int:
    """Largest ``k`` with a totally isotropic ``k``-dimensional subspace, by direct enumeration."""
    best = 0
    for k in range(1, form.dim + 1):
        if enumerate_r_planes([form], k - 1, budget).count == 0:
            break
        best = k
    return best


# ---------------------------------------------------------------------------
# pencils over finite fields


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod_p(a: list[int], b: list[int], p: int) -> list[int]:
    a = _poly_trim([x % p for x in a])
    b = _poly_trim([x % p for x in b])
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = (a[-1] * inv) % p
        shift = len(a) - len(b)
        for j, y in enumerate(b):
            a[shift + j] = (a[shift + j] - c * y) % p
        _poly_trim(a)
    return a


def _poly_gcd_p(a: list[int], b: list[int], p: int) -> list[int]:
    a = _poly_trim([x % p for x in a])
    b = _poly_trim([x % p for x in b])
    while b:
        a, b = b, _poly_mod_p(a, b, p)
    return a


def binary_form_squarefree_mod_p(coeffs: Sequence[int], p: int) -> bool:
    """Whether ``sum c_i lam^(d-i) mu^i`` (``d = len(coeffs)-1``) is nonzero and squarefree over ``F_p``."""
    c = [x % p for x in coeffs]
    d = len(c) - 1
    poly = _poly_trim(list(c))
    if not poly:
        return False
    if d - (len(poly) - 1) >= 2:
        return False
    deriv = [(i * x) % p for i, x in enumerate(poly)][1:]
    if not _poly_trim(list(deriv)):
        return len(poly) == 1
    return len(_poly_gcd_p(poly, deriv, p)) == 1


def reduction_is_smooth(pencil, p: int) -> bool:
    """Good reduction at ``p``: forms integral at ``p`` and the reduced determinant form squarefree."""
    for q in (pencil.f, pencil.g):
        if any(x.denominator % p == 0 for row in q.gram for x in row):
            return False
    coeffs = []
    for c in pencil.det_coeffs:
        c = as_fraction(c)
        if c.denominator % p == 0:
            return False
        coeffs.append(c.numerator * pow(c.denominator, -1, p) % p)
    coeffs += [0] * (pencil.n + 2 - len(coeffs))
    return binary_form_squarefree_mod_p(coeffs, p)


def p1_points(F: FiniteField) -> list[tuple[int, int]]:
    return [(0, 1)] + [(1, t) for t in range(F.q)]


# Witt index floor for nondegenerate members, by ambient dimension n
_WITT_FLOOR = {3: 1, 4: 2, 5: 2, 6: 3, 7: 3}


@dataclass
class FFPropositionReport:
    q: int
    n: int
    smooth: bool
    checks: dict
    skipped: str | None = None

    @property
    def ok(self) -> bool:
        return self.skipped is None and all(v["holds"] for v in self.checks.values())

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n, "smooth_reduction": self.smooth, "checks": self.checks, "skipped": self.skipped}


def verify_ff_propositions(pencil, F: FiniteField, budget: int = DEFAULT_BUDGET) -> FFPropositionReport:
    """Finite-field statements for a smooth reduction of ``pencil`` over ``F``."""
    n = pencil.n
    if not reduction_is_smooth(pencil, F.p):
        return FFPropositionReport(F.q, n, False, {}, skipped="reduction is not smooth")
    f, g = reduce_form(pencil.f, F), reduce_form(pencil.g, F)
    checks: dict = {}
    witts = []
    for lam, mu in p1_points(F):
        m = f.combine(lam, g, mu)
        if ff_det(m) == 0:
            continue
        witts.append(((lam, mu), ff_witt_index(m).index))
    floor = _WITT_FLOOR.get(n)
    if floor is not None:
        low = min(w for _, w in witts)
        checks["member_witt_floor"] = {"floor": floor, "min_found": low, "members": len(witts), "holds": low >= floor}
    if n >= 4 and (F.q ** (n + 1)) * (n + 1) ** 2 <= budget:
        pts = count_points(f, g, F, budget)
        checks["has_point"] = {"points": pts, "holds": pts > 0}
    if n == 5 and F.q > 30:
        hyp = next(((lam, mu) for (lam, mu), w in witts if w == 3), None)
        checks["hyperbolic_member"] = {"member": list(hyp) if hyp else None, "holds": hyp is not None}
    return FFPropositionReport(F.q, n, True, checks)

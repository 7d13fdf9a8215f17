"""Brute-force ground truth for p-adic isotropy of diagonal forms.

The search looks for a primitive vector ``x mod p^k`` with
``q(x) ≡ 0 (mod p^k)`` where ``k = 2T + 1`` and
``T = v_p(2) + max v_p(a_i)``.  A primitive zero mod ``p^k`` has a
coordinate ``x_j`` that is a unit, hence ``v_p(2 a_j x_j) <= T`` and the
one-variable Hensel lemma lifts it; conversely any primitive p-adic zero
reduces to such a vector.  Nothing here uses Hilbert symbols.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import as_fraction


def _integral_squarefree_entries(entries: Sequence, p: int) -> list[int]:
    """Rescale each entry by a rational square so it is an integer with p-valuation 0 or 1."""
    out = []
    for a in entries:
        a = as_fraction(a)
        if a == 0:
            raise ValueError("oracle needs a nondegenerate diagonal form")
        n = a.numerator * a.denominator
        while n % (p * p) == 0:
            n //= p * p
        out.append(n)
    # a common factor p can be divided out of the whole form
    if all(n % p == 0 for n in out):
        out = [n // p for n in out]
    return out


def hensel_precision(entries: Sequence[int], p: int) -> int:
    v2 = 1 if p == 2 else 0
    t = v2 + max(1 if n % p == 0 else 0 for n in entries)
    return 2 * t + 1


def padic_isotropic_bruteforce(entries: Sequence, p: int, extra_precision: int = 0) -> bool:
    """Decide isotropy over QQ_p of ``<a_1, ..., a_n>`` by exhaustive lifting search."""
    a = _integral_squarefree_entries(entries, p)
    n = len(a)
    if n == 1:
        return False
    k = hensel_precision(a, p) + extra_precision
    coeffs = np.array(a, dtype=np.int64)
    digits = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)

    # level 1: nonzero residues mod p (primitivity)
    vals = (digits**2 * coeffs).sum(axis=1)
    keep = np.nonzero(vals % p == 0)[0]
    stack = [(digits[i], 1) for i in reversed(keep) if i != 0]
    while stack:
        x, level = stack.pop()
        if level >= k:
            return True
        step = p**level
        mod = step * p
        cand = x + step * digits
        qv = (cand**2 * coeffs).sum(axis=1)
        for i in reversed(np.nonzero(qv % mod == 0)[0]):
            stack.append((cand[i] % mod, level + 1))
    return False


def isotropic_mod_search(entries: Sequence[int], p: int, k: int) -> list[tuple[int, ...]]:
    """All primitive solutions of ``q(x) ≡ 0 mod p^k`` (small cases only; used in tests)."""
    n = len(entries)
    mod = p**k
    out = []
    for x in itertools.product(range(mod), repeat=n):
        if all(c % p == 0 for c in x):
            continue
        if sum(ai * xi * xi for ai, xi in zip(entries, x)) % mod == 0:
            out.append(x)
    return out


def hilbert_symbol_bruteforce(a: int, b: int, p: int) -> int:
    """``(a,b)_p`` via isotropy of ``<1, -a, -b>`` from the lifting search."""
    return 1 if padic_isotropic_bruteforce([Fraction(1), Fraction(-a), Fraction(-b)], p) else -1

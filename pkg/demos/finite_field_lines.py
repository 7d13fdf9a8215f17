"""
Lines on a del Pezzo surface of degree four over finite fields
==============================================================

Count points and lines on a smooth intersection of two quadrics in P^4
over F_5 and F_25, and check the members' Witt indices.
"""

import time

from quadpencil import build_pencil
from quadpencil.finite import count_points, enumerate_r_planes, finite_field, reduce_form, verify_ff_propositions
from quadpencil.qform import QuadraticForm

p = build_pencil(QuadraticForm.diagonal([1] * 5), QuadraticForm.diagonal([0, 1, 2, 3, 4]))

for m in (1, 2):
    F = finite_field(5, m)
    f, g = reduce_form(p.f, F), reduce_form(p.g, F)
    t0 = time.perf_counter()
    pts = count_points(f, g)
    lines = enumerate_r_planes([f, g], 1, keep=2)
    print(f"q={F.q}: {pts} points, {lines.count} lines ({time.perf_counter() - t0:.2f}s)")
    print("  two of the lines:", lines.to_json()["witnesses"])

rep = verify_ff_propositions(p, finite_field(5))
print(rep.to_json())

"""
A quadratic point on an intersection of two quadrics in P^5
===========================================================

Find a member of the pencil containing two hyperbolic planes over QQ,
take a line on it and cut the line with the other quadric.
"""

from quadpencil import global_witt_index, isotropic_plane, member_with_global_witt, quadratic_point_from_line
from quadpencil.harness import generate_smooth_pencil

p = generate_smooth_pencil(5, 5, seed=2026)
print("f =", p.f.to_json()["gram"])
print("g =", p.g.to_json()["gram"])

par, witt = member_with_global_witt(p, 2, 50)
member = p.member(par)
print("member", par, "global Witt index", witt.index)
for entry in witt.to_json()["places"]:
    print("  ", entry)

# an explicit totally isotropic plane: a projective line on the member quadric
u, v = isotropic_plane(member, 30, strategy="auto")
print("line spanned by", u.coords, v.coords)
assert global_witt_index(member).index >= 2

hit = quadratic_point_from_line(p.f, p.g, u.coords, v.coords, par)
print(hit.kind, hit.to_json())
if hit.kind == "quadratic":
    # exact check in QQ[x]/(x^2 + b x + c)
    print("f, g at the point:", hit.quadratic.evaluate(p.f), hit.quadratic.evaluate(p.g))

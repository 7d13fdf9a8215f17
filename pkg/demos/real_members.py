"""
Real members of a pencil of quadrics
====================================

Walk once around the real projective line of a smooth pencil and watch
the signature of the member change at each singular member.
"""

from quadpencil import build_pencil, is_smooth, real_half_hyperbolic_member, stratify
from quadpencil.pencil import real_sample_parameters
from quadpencil.qform import QuadraticForm

f = QuadraticForm.diagonal([1, 1, 1, 1, 1])
g = QuadraticForm.diagonal([1, 2, 3, 4, 5])
p = build_pencil(f, g)
print("det(lam f + mu g) coefficients:", [str(c) for c in p.det_coeffs])
print("smooth:", is_smooth(p).smooth)

# the singular members are the roots of the determinant form
for e in stratify(p).entries:
    print("singular member", e.parameter, "rank", e.rank)

# one sample per arc between consecutive roots; the signature moves by one step each time
for par in real_sample_parameters(p):
    print(par, p.member(par).signature().as_tuple())

par, sig = real_half_hyperbolic_member(p)
print("first member with signature 0 or +-1:", par, sig.as_tuple())

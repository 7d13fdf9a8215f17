from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quadpencil.exact import IntPolynomial, det_exact
from quadpencil.harness import generate_smooth_pencil
from quadpencil.localglobal import REAL, global_witt_index, is_local_square, local_witt_index
from quadpencil.pencil import (
    HyperellipticModel,
    MemberParameter,
    PencilPreconditionError,
    build_pencil,
    curve_point_search,
    discriminant_curve,
    is_smooth,
    member_with_global_witt,
    member_with_local_witt,
    odd_degree_point_detector,
    padic_nonsquare_det_member,
    parameters_by_height,
    real_half_hyperbolic_member,
    real_sample_parameters,
    stratify,
)
from quadpencil.qform import QuadraticForm

D = QuadraticForm.diagonal
DIAG3 = build_pencil(D([1, 1, 1, 1]), D([1, 2, 3, 4]))
DIAG4 = build_pencil(D([1] * 5), D([1, 2, 3, 4, 5]))
XY = QuadraticForm([[0, Fraction(1, 2)], [Fraction(1, 2), 0]])
L, M = sympy.symbols("lam mu")


def sympy_det_coeffs(p):
    mat = sympy.Matrix(p.f.dim, p.f.dim, lambda i, j: L * sympy.Rational(str(p.f.gram[i][j])) + M * sympy.Rational(str(p.g.gram[i][j])))
    poly = sympy.Poly(sympy.expand(mat.det()), L, M)
    d = p.f.dim
    return [Fraction(str(poly.coeff_monomial(L ** (d - i) * M**i))) for i in range(d + 1)]


def test_member_parameter_normalization():
    assert MemberParameter(-2, 4) == MemberParameter(1, -2)
    assert MemberParameter(0, -5) == MemberParameter(0, 1)
    assert MemberParameter.from_t(Fraction(3, 4)) == MemberParameter(4, 3)
    with pytest.raises(ValueError):
        MemberParameter(0, 0)


def test_parameters_by_height_complete_and_ordered():
    pts = list(parameters_by_height(4))
    assert len(set(pts)) == len(pts)
    assert [p.height for p in pts] == sorted(p.height for p in pts)
    # all points of P^1(Q) of height <= 4, counted directly
    expect = {MemberParameter(a, b) for a in range(-4, 5) for b in range(-4, 5) if (a, b) != (0, 0)}
    assert set(pts) == expect


def test_det_form_examples():
    assert DIAG3.det_coeffs == (1, 10, 35, 50, 24)
    assert build_pencil(D([1, 1]), D([1, 1])).det_coeffs == (1, 2, 1)
    assert build_pencil(XY, D([1, -1])).det_coeffs == (Fraction(-1, 4), 0, -1)


def test_det_form_matches_symbolic_expansion():
    for seed in range(4):
        p = generate_smooth_pencil(3 + seed, 4, seed)
        assert list(p.det_coeffs) == sympy_det_coeffs(p)


def test_smoothness_examples():
    assert is_smooth(DIAG3)
    rep = is_smooth(build_pencil(D([1, 2, 3]), D([1, 2, 3])))
    assert not rep and rep.diagnosis == "repeated-root"
    assert is_smooth(build_pencil(D([1, 1, 0]), D([0, 1, 1])))
    # lam^2 * mu: the double root sits at (0 : 1)
    assert is_smooth(build_pencil(D([1, 1, 0]), D([0, 0, 1]))).diagnosis == "degree-drop"
    assert is_smooth(build_pencil(D([1, 0]), D([1, 0]))).diagnosis == "identically-zero"


def test_member_examples():
    assert DIAG3.member(MemberParameter(1, 0)) == DIAG3.f
    assert DIAG3.member(MemberParameter(0, 1)) == DIAG3.g
    assert DIAG3.member(MemberParameter(1, 1)) == D([2, 3, 4, 5])


def test_stratify_examples():
    s = stratify(DIAG3)
    assert sorted(e.parameter.t for e in s.rational_members) == [-1, Fraction(-1, 2), Fraction(-1, 3), Fraction(-1, 4)]
    assert all(e.rank == 3 for e in s.entries)
    s = stratify(DIAG4)
    assert len(s.rational_members) == 5 and all(e.rank == 4 for e in s.entries)
    p = build_pencil(D([1, 1, 1, 1]), D([1, 1, 3, 4]))
    assert not is_smooth(p)
    dbl = [e for e in stratify(p).entries if e.multiplicity == 2]
    assert len(dbl) == 1 and dbl[0].parameter == MemberParameter(1, -1) and dbl[0].rank == 2


def test_stratify_irrational_roots():
    p = build_pencil(QuadraticForm([[1, 0, 0], [0, 0, 1], [0, 1, 0]]), D([0, 1, 0]).combine(1, D([0, 0, 2]), 1))
    s = stratify(p)
    irr = [e for e in s.entries if e.parameter is None]
    P = p.det_polynomial()
    assert len(irr) == 2 and s.irrational_factor_degrees == (2,)
    for e in irr:
        assert P(e.interval.lo) * P(e.interval.hi) <= 0


def test_mordell_diagonal_examples():
    par, sig = real_half_hyperbolic_member(DIAG3)
    assert sig.zeros == 0 and abs(sig.positives - sig.negatives) == 0
    # on (-1/2, -1/3) the signs of 1+kt are (+,-,-,-)... checked pointwise
    assert DIAG3.member(MemberParameter.from_t(Fraction(-5, 12))).signature().as_tuple() == (2, 2, 0)
    assert DIAG3.member(MemberParameter.from_t(Fraction(-7, 24))).signature().as_tuple() == (3, 1, 0)
    par, sig = real_half_hyperbolic_member(DIAG4)
    assert sig.zeros == 0 and abs(sig.positives - sig.negatives) == 1
    p = build_pencil(D([1, -1, 1, -1]), D([1, 2, 3, 4]))
    par, sig = real_half_hyperbolic_member(p)
    assert sig.as_tuple() == (2, 2, 0)


def test_mordell_needs_smooth():
    with pytest.raises(PencilPreconditionError):
        real_half_hyperbolic_member(build_pencil(D([1, 1]), D([1, 1])))


def test_padic_nonsquare_examples():
    for prime in (2, 3, 5, 7):
        par = padic_nonsquare_det_member(DIAG3, prime)
        d = DIAG3.det_at(par)
        assert d != 0 and not is_local_square(d, prime)
    # P(t) = t: f singular, so (1:0) is a root
    p = build_pencil(D([0, 1]), D([1, 1]))
    par = padic_nonsquare_det_member(p, 3)
    assert not is_local_square(p.det_at(par), 3)
    with pytest.raises(PencilPreconditionError):
        padic_nonsquare_det_member(build_pencil(D([1, 1]), D([1, -1])).swap(), "real")


def test_padic_nonsquare_certifies_3H_in_rank_8():
    f, g = D([1, 1, 1, 1, 1, 1, 1, 1]), D([1, 2, 3, 4, 5, 6, 7, 8])
    p = build_pencil(f, g)
    for prime in (2, 3, 5, 7):
        m = p.member(padic_nonsquare_det_member(p, prime))
        assert m.rank() == 8 and local_witt_index(m, prime).index >= 3


def test_member_with_local_witt_examples():
    res = member_with_local_witt(DIAG3, 5, 2, 20)
    assert res is not None and local_witt_index(DIAG3.member(res[0]), 5).index >= 2
    par, w = member_with_local_witt(DIAG3, 3, 0, 5)
    assert par == next(iter(parameters_by_height(1)))
    pd = build_pencil(D([1, 1, 1]), D([1, 2, 3]))
    assert member_with_local_witt(pd, REAL, 1, 10) is not None  # indefinite members exist
    pos = build_pencil(D([1, 1, 1]), QuadraticForm([[2, 1, 0], [1, 2, 0], [0, 0, 1]]))
    # members with lam, mu of the same sign are definite; the others decide
    res = member_with_local_witt(pos, REAL, 1, 10)
    assert res is None or local_witt_index(pos.member(res[0]), REAL).index == 1


def test_definite_pencil_has_no_real_hyperbolic_member():
    # both forms positive definite and proportional directions excluded: every member with lam*mu>0 is definite
    p = build_pencil(D([1, 1, 1]), D([1, 1, 1]).combine(1, D([1, 2, 3]), 1))
    for par in parameters_by_height(6):
        if par.lam * par.mu > 0:
            assert local_witt_index(p.member(par), REAL).index == 0


def test_member_with_global_witt_examples():
    p = build_pencil(D([1, -1, 1, -1, 1, -1]), D([1, 2, 3, 4, 5, 6]))
    par, g = member_with_global_witt(p, 2, 5)
    assert g.index >= 2 and global_witt_index(p.member(par)).index >= 2
    assert member_with_global_witt(p, 4, 5) is None


def test_discriminant_curve_examples():
    m = discriminant_curve(DIAG3, 1)
    # chart f + t*g: (1+t)(1+2t)(1+3t)(1+4t)
    assert m.poly == IntPolynomial.from_roots([-1, Fraction(-1, 2), Fraction(-1, 3), Fraction(-1, 4)], 1) and m.genus == 1
    assert discriminant_curve(DIAG3.swap(), 1).poly == IntPolynomial.from_roots([-1, -2, -3, -4])
    m = discriminant_curve(DIAG4, -1)
    assert m.degree == 5 and m.genus == 2
    assert discriminant_curve(build_pencil(D([1, 2, 3]), D([1, 2, 3])), 1).squarefree is False


def test_curve_point_search_examples():
    pts = curve_point_search(HyperellipticModel(1, IntPolynomial([0, -1, 0, 1]), True), 5)
    assert {(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0))} <= set(pts.affine)
    assert set(pts.ramification) == {0, 1, -1} and pts.at_infinity == 1
    pts = curve_point_search(HyperellipticModel(1, IntPolynomial([1, 0, 0, 0, 1]), True), 5)
    assert (Fraction(0), Fraction(1)) in pts.affine and (Fraction(0), Fraction(-1)) in pts.affine
    assert pts.at_infinity == 2


def test_curve_point_search_matches_naive_scan():
    m = discriminant_curve(DIAG3, 1)
    pts = curve_point_search(m, 12)
    naive = set()
    for b in range(1, 13):
        for a in range(-12, 13):
            if sympy.gcd(a, b) != 1:
                continue
            t = Fraction(a, b)
            y2 = m.poly(t)
            if y2 >= 0:
                r = sympy.sqrt(sympy.Rational(y2.numerator, y2.denominator))
                if r.is_rational:
                    for y in {Fraction(str(r)), -Fraction(str(r))}:
                        naive.add((t, y))
    assert set(pts.affine) == naive


def test_odd_degree_examples():
    assert odd_degree_point_detector(discriminant_curve(DIAG4, -1)).status == "yes"
    t = sympy.Symbol("t")
    m = HyperellipticModel(1, IntPolynomial(reversed(sympy.Poly((t + 1) * (t**4 + 2), t).all_coeffs())), True)
    assert odd_degree_point_detector(m).status == "yes"
    m = HyperellipticModel(1, IntPolynomial(reversed(sympy.Poly((t + 1) * (t**5 + 2), t).all_coeffs())), True)
    v = odd_degree_point_detector(m)
    assert v.status == "yes" and v.witness == -1
    m = HyperellipticModel(1, IntPolynomial(reversed(sympy.Poly((t**3 + 2) * (t**3 + 3), t).all_coeffs())), True)
    v = odd_degree_point_detector(m)
    assert v.status == "yes" and v.witness.degree == 3
    m = HyperellipticModel(1, IntPolynomial(reversed(sympy.Poly((t**2 + 1) * (t**4 + 1), t).all_coeffs())), True)
    assert odd_degree_point_detector(m).status == "unknown"


def test_pencil_json_round_trip():
    p = generate_smooth_pencil(4, 5, 11)
    assert build_pencil(QuadraticForm.from_json(p.to_json()["f"]), QuadraticForm.from_json(p.to_json()["g"])) == p
    from quadpencil.pencil import Pencil

    assert Pencil.from_json(p.to_json()) == p


seeds = st.integers(0, 10**6)


@settings(max_examples=25)
@given(seeds, st.integers(3, 6))
def test_det_form_evaluates_members(seed, n):
    p = generate_smooth_pencil(n, 5, seed)
    for par in list(parameters_by_height(3))[:10]:
        assert p.det_at(par) == det_exact(p.member(par).gram)


@settings(max_examples=20)
@given(seeds, st.integers(3, 5), st.data())
def test_smoothness_invariant_under_changes(seed, n, data):
    p = generate_smooth_pencil(n, 4, seed) if data.draw(st.booleans()) else build_pencil(*[generate_smooth_pencil(n, 4, seed).f] * 2)
    u = [[data.draw(st.integers(-2, 2)) for _ in range(n + 1)] for _ in range(n + 1)]
    a, b, c, d = (data.draw(st.integers(-3, 3)) for _ in range(4))
    if det_exact(u) == 0 or a * d - b * c == 0:
        return
    q = build_pencil(p.f.transform(u), p.g.transform(u))
    r = build_pencil(p.f.combine(a, p.g, b), p.f.combine(c, p.g, d))
    assert bool(is_smooth(q)) == bool(is_smooth(p)) == bool(is_smooth(r))


@settings(max_examples=25)
@given(seeds, st.integers(3, 7))
def test_signature_steps_across_simple_roots(seed, n):
    p = generate_smooth_pencil(n, 5, seed)
    sigs = [p.member(par).signature() for par in real_sample_parameters(p)]
    for s, t in zip(sigs, sigs[1:]):
        assert abs(s.positives - t.positives) == 1 and abs(s.negatives - t.negatives) == 1
    par, sig = real_half_hyperbolic_member(p)
    assert p.member(par).signature() == sig and abs(sig.positives - sig.negatives) <= 1

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgheight.errors import NVarsMismatch, PreconditionError
from avgheight.multipoly import (
    MPoly,
    content,
    dehomogenize,
    discriminant_wrt,
    dumps_poly,
    gcd_poly,
    homogenize,
    is_squarefree,
    loads_poly,
    mason_co_decompose,
    parse_poly,
    perfect_power_root,
    poly_from_json,
    poly_to_json,
    primitive_part,
    resultant_wrt,
    sqfr_part,
    squarefree_decomposition,
    verify_mason_instance,
)

T1, T2 = MPoly.var(2, 0), MPoly.var(2, 1)
S, T = T1, T2
ONE = MPoly.one(2)
DISC = 64 * S**6 - 432 * T**4


def polys(nvars=2, max_terms=4, max_deg=3, max_coeff=9):
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars)
    coeffs = st.integers(-max_coeff, max_coeff)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: MPoly(nvars, d))


nonzero = polys().filter(lambda f: not f.is_zero())
nonconst = polys().filter(lambda f: f.total_degree() > 0)


# -- arithmetic -----------------------------------------------------------------------------


def test_additive_inverse():
    assert (T1 + (-T1)).is_zero()
    assert (T1 - T1) == MPoly.zero(2)


def test_difference_of_squares():
    assert (T1 + T2) * (T1 - T2) == T1**2 - T2**2


def test_empty_power():
    assert (T1 + 1) ** 0 == ONE


def test_nvars_mismatch():
    with pytest.raises(NVarsMismatch):
        T1 + MPoly.var(3, 0)


def test_no_zero_coefficients_stored():
    f = MPoly(2, {(1, 0): 3, (0, 1): 0})
    assert dict(f.items()) == {(1, 0): 3}


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


# -- evaluation -----------------------------------------------------------------------------


def test_evaluate_disc():
    assert DISC.evaluate([1, 1]) == -368


def test_evaluate_fraction():
    assert (T1**2 * T2).evaluate([Fraction(1, 2), 3]) == Fraction(3, 4)


@given(polys())
def test_evaluate_at_zero_is_constant_term(f):
    assert f.evaluate([0, 0]) == dict(f.items()).get((0, 0), 0)


@given(polys(), polys(), st.integers(-5, 5), st.integers(-5, 5))
@settings(max_examples=50, deadline=None)
def test_evaluate_is_ring_homomorphism(a, b, x, y):
    assert (a * b).evaluate([x, y]) == a.evaluate([x, y]) * b.evaluate([x, y])
    assert (a + b).eval_int([x, y]) == a.eval_int([x, y]) + b.eval_int([x, y])


# -- content and gcd ------------------------------------------------------------------------


def test_content_examples():
    assert content(6 * T1**2 + 9 * T2) == 3
    assert content(DISC) == 16
    assert content(T1 + 1) == 1


@given(nonzero)
@settings(max_examples=200, deadline=None)
def test_content_times_primitive_part(f):
    g = primitive_part(f)
    assert content(f) > 0
    assert g * content(f) == f or g * (-content(f)) == f


def test_primitive_part_of_zero():
    with pytest.raises((PreconditionError, ValueError)):
        primitive_part(MPoly.zero(2))


def test_gcd_examples():
    assert gcd_poly(T1**2 - T2**2, T1 - T2) == T1 - T2
    f = 6 * T1**2 + 9 * T2
    assert gcd_poly(f, MPoly.zero(2)) == primitive_part(f)
    # distinct irreducibles: the resultant is nonzero and the gcd is constant
    a, b = T1**2 + T2 + 1, T1 * T2 - 3
    assert not resultant_wrt(a, b, 1).is_zero()
    assert gcd_poly(a, b).is_constant()


def _associates(f, g):
    return primitive_part(f) == primitive_part(g) or primitive_part(f) == -primitive_part(g)


@given(nonconst, nonconst, nonconst)
@settings(max_examples=40, deadline=None)
def test_gcd_scales_with_common_factor(a, b, g):
    lhs = gcd_poly(a * g, b * g)
    rhs = g * gcd_poly(a, b)
    assert _associates(lhs, rhs)


@given(nonzero, nonzero)
@settings(max_examples=40, deadline=None)
def test_gcd_divides_both(a, b):
    from avgheight.multipoly import div_exact

    g = gcd_poly(a, b)
    assert div_exact(a, g) is not None and div_exact(b, g) is not None


# -- squarefree decomposition ---------------------------------------------------------------


def test_sqf_constructed():
    dec = squarefree_decomposition((T1 - T2) ** 2 * (T1 + 1))
    assert dict((i, s) for s, i in dec.parts) == {1: T1 + 1, 2: T1 - T2}


def test_sqf_of_squarefree_input():
    f = 2 * T1**2 + 4 * T2
    dec = squarefree_decomposition(f)
    assert dec.parts == ((primitive_part(f), 1),)


def test_sqfr_of_homogenized_disc():
    T0, S3, T3 = MPoly.var(3, 0), MPoly.var(3, 1), MPoly.var(3, 2)
    core = 4 * S3**6 - 27 * T3**4 * T0**2
    f = 16 * T0**18 * core
    assert is_squarefree(core)
    assert _associates(sqfr_part(f), T0 * core)


@given(nonzero, nonzero)
@settings(max_examples=60, deadline=None)
def test_sqf_reconstruction_and_invariants(a, b):
    f = a * b * b
    dec = squarefree_decomposition(f)
    assert dec.expand(2) == f
    parts = [s for s, _ in dec.parts]
    for i, s in enumerate(parts):
        assert content(s) == 1
        for v in s.variables():
            # squarefree: any common factor with the v-partial is free of v
            assert gcd_poly(s, s.diff(v)).degree_in(v) <= 0
        for t in parts[i + 1:]:
            assert gcd_poly(s, t).is_constant()


def test_perfect_power_root():
    assert perfect_power_root((T1 + T2) ** 6, 3) == (T1 + T2) ** 2
    assert perfect_power_root(T1 + 1, 2) is None
    assert perfect_power_root(64 * (S + T) ** 12, 12) is None


# -- resultants and homogenization ----------------------------------------------------------


def test_resultant_linear_substitution():
    assert resultant_wrt(T2**2 - T1, T2 - 1, 1) == 1 - T1


def test_discriminant_quadratic():
    b, c, x = MPoly.var(3, 0), MPoly.var(3, 1), MPoly.var(3, 2)
    assert discriminant_wrt(x**2 + b * x + c, 2) == b**2 - 4 * c
    assert discriminant_wrt((x - b) ** 2 * (x + c), 2).is_zero()


def test_homogenize_examples():
    T0, S3, T3 = MPoly.var(3, 0), MPoly.var(3, 1), MPoly.var(3, 2)
    assert homogenize(DISC, 24) == 64 * S3**6 * T0**18 - 432 * T3**4 * T0**20
    assert homogenize(MPoly.const(2, 5), 3) == 5 * T0**3
    assert homogenize(T1**2 - 3 * T1 * T2, 2) == S3**2 - 3 * S3 * T3
    with pytest.raises(PreconditionError):
        homogenize(DISC, 5)


@given(polys())
def test_homogenize_roundtrip(f):
    D = max(f.total_degree(), 0) + 2
    h = homogenize(f, D)
    assert h.is_zero() or h.is_homogeneous()
    assert dehomogenize(h) == f


# -- Mason-Stothers -------------------------------------------------------------------------


def test_mason_verdicts():
    one, zero = ONE, MPoly.zero(2)
    assert verify_mason_instance(one, zero, one, 3, 3, 3).tag == "AllConstant"
    R = T1 + 1
    assert verify_mason_instance(3 * R**3, -2 * R**2, R, 2, 3, 6).tag == "NotCoprime"
    assert verify_mason_instance(T1, T2, T1 + T2, 3, 3, 3).tag == "IdentityFails"
    with pytest.raises(PreconditionError):
        verify_mason_instance(T1, T2, T1, 2, 2, 2)


def test_mason_co_decompose():
    R = T1 + 1
    assert mason_co_decompose(3 * R**3, -2 * R**2, R, 2, 3, 6) == (3, -2)
    assert mason_co_decompose(R**3, MPoly.zero(2), R, 2, 3, 6) == (1, 0)
    with pytest.raises(PreconditionError):
        mason_co_decompose(R, R, R, 2, 3, 4)


@given(st.integers(-6, 6).filter(bool), st.integers(-6, 6), nonconst)
@settings(max_examples=40, deadline=None)
def test_mason_roundtrip(a1, a2, R):
    # a1^2 R^6 + a2^3 R^6 = R^6 needs a1^2 + a2^3 = 1; rescale R to absorb the constant
    c = a1**2 + a2**3
    if c == 0:
        return
    P, Q = a1 * R**3, a2 * R**2
    lhs = P**2 + Q**3
    assert lhs == c * R**6
    if c == 1:
        assert mason_co_decompose(P, Q, R, 2, 3, 6) == (a1, a2)


@given(nonconst, nonconst)
@settings(max_examples=200, deadline=None)
def test_mason_sum_of_cubes_never_cube(P, Q):
    if not gcd_poly(P, Q).is_constant():
        return
    f = P**3 + Q**3
    if f.is_zero():
        return
    assert perfect_power_root(f, 3) is None


# -- serialization --------------------------------------------------------------------------


@given(polys())
def test_json_roundtrip(f):
    assert poly_from_json(poly_to_json(f), 2) == f
    g, names = loads_poly(dumps_poly(f, ["S", "T"]))
    assert g == f and names == ["S", "T"]


def test_big_coefficient_roundtrip():
    f = MPoly(1, {(3,): 10**40 + 7})
    assert poly_from_json(poly_to_json(f), 1) == f


def test_parse_poly():
    assert parse_poly("64*S^6 - 432*T^4", ["S", "T"]) == DISC
    assert parse_poly("(S+T)**2", ["S", "T"]) == S**2 + 2 * S * T + T**2
    assert parse_poly("-S^2", ["S", "T"]) == -(S**2)

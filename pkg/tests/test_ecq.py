import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgheight.ecq import (
    INFINITY,
    add_points,
    canonical_height,
    double_point,
    duplication_x,
    height_and_torsion,
    local_data,
    minimal_discriminant,
    mul_point,
    naive_x_height,
    neg_point,
    on_curve,
    qpoint,
    telescoping_constant,
    telescoping_height,
    torsion_test,
    up_bound_constants,
)
from avgheight.errors import PreconditionError
from avgheight.factor import factorize, valuation
from avgheight.family import SpecCurve, new_family, running_family
from avgheight.multipoly import MPoly
from avgheight.tate import c_invariants

# Cremona labels, a-invariants and minimal discriminants from the standard tables
TABLE = [
    ("11a1", (0, -1, 1, -10, -20), -161051),
    ("11a3", (0, -1, 1, 0, 0), -11),
    ("14a1", (1, 0, 1, 4, -6), -21952),
    ("15a1", (1, 1, 1, -10, -10), 50625),
    ("17a1", (1, -1, 1, -1, -14), -83521),
    ("19a1", (0, 1, 1, -9, -15), -6859),
    ("20a1", (0, 1, 0, 4, 4), -6400),
    ("37a1", (0, 0, 1, -1, 0), 37),
    ("389a1", (0, 1, 1, -2, 0), 389),
    ("5077a1", (0, 0, 1, -7, 6), 5077),
]


def curve(a4, a6):
    return SpecCurve.from_coefficients(a4, a6)


def _random_curve_point(rng, size=30):
    while True:
        x, y, A = rng.randint(-size, size), rng.randint(-size, size), rng.randint(-size, size)
        B = y * y - x**3 - A * x
        if 4 * A**3 + 27 * B * B != 0:
            return A, B, qpoint(x, y)


# -- group law ------------------------------------------------------------------------------


def test_identity_and_inverse():
    E = curve(0, 1)
    p = qpoint(0, 1)
    assert add_points(E, p, INFINITY) == p
    assert mul_point(E, -1, qpoint(2, 3)) == qpoint(2, -3)
    assert add_points(E, p, neg_point(p)) == INFINITY


def test_three_torsion_on_y2_x3_plus_1():
    E = curve(0, 1)
    assert double_point(E, qpoint(0, 1)) == qpoint(0, -1)
    assert mul_point(E, 3, qpoint(0, 1)) == INFINITY


def test_off_curve_rejected():
    with pytest.raises(PreconditionError):
        double_point(curve(0, 1), qpoint(1, 1))


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_group_axioms(seed):
    rng = random.Random(seed)
    A, B, p = _random_curve_point(rng)
    E = curve(A, B)
    q, r = mul_point(E, 2, p), mul_point(E, 3, p)
    assert add_points(E, p, q) == add_points(E, q, p)
    assert add_points(E, add_points(E, p, q), r) == add_points(E, p, add_points(E, q, r))
    assert add_points(E, p, neg_point(p)) == INFINITY
    assert on_curve(E, add_points(E, q, r))


@given(st.integers(0, 10**6))
@settings(max_examples=500, deadline=None)
def test_double_matches_duplication_formula(seed):
    A, B, p = _random_curve_point(random.Random(seed))
    E = curve(A, B)
    d = double_point(E, p)
    x = duplication_x(Fraction(A), Fraction(B), p.x)
    assert (d == INFINITY) if x is None else d.x == x


# -- naive and canonical heights ------------------------------------------------------------


def test_naive_height():
    assert naive_x_height(INFINITY) == 0.0
    assert naive_x_height(qpoint(Fraction(3, 7), 0)) == pytest.approx(math.log(7))
    assert naive_x_height(qpoint(-10, 0)) == pytest.approx(math.log(10))


def test_37a1_generator():
    # 0.0511114082399688 in the x-height convention
    E = curve(-1296, 11664)
    p = qpoint(0, 108)
    assert canonical_height(E, p, 1e-12).value == pytest.approx(0.0511114082399688 / 2, abs=1e-10)
    assert canonical_height(E, p, 1e-12, "x").value == pytest.approx(0.0511114082399688, abs=1e-10)


def test_height_of_1_1_on_x3_minus_x_plus_1():
    E = curve(-1, 1)
    hv = canonical_height(E, qpoint(1, 1), 1e-12)
    assert hv.value == pytest.approx(0.024904198648967323, abs=1e-10)
    assert hv.error_bound <= 1e-10
    oracle = telescoping_height(-1, 1, Fraction(1), 8)
    assert abs(hv.value - oracle) <= 4**-8 * telescoping_constant(-1, 1)


def test_torsion_height_is_exactly_zero():
    hv = canonical_height(curve(0, 1), qpoint(2, 3), 1e-9)
    assert (hv.value, hv.error_bound) == (0.0, 0.0)


def test_rational_model_scaling():
    # y^2 = x^3 + x/4 - 3/8 is made integral by u = 2
    E = curve(Fraction(1, 4), Fraction(-3, 8))
    assert (E.ell, E.A_int, E.B_int) == (2, 4, -24)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_quadraticity(seed):
    A, B, p = _random_curve_point(random.Random(seed))
    E = curve(A, B)
    tol = 1e-10
    h1 = canonical_height(E, p, tol).value
    for m in (2, 3):
        hm = canonical_height(E, mul_point(E, m, p), tol).value
        assert abs(hm - m * m * h1) <= (m * m + 1) * tol + 1e-12 * max(1.0, hm)


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_height_zero_iff_torsion(seed):
    A, B, p = _random_curve_point(random.Random(seed), 12)
    E = curve(A, B)
    hv = canonical_height(E, p, 1e-10)
    assert (hv.value <= 1e-10) == (torsion_test(E, p) is not None)


# -- torsion ------------------------------------------------------------------------------------


def test_torsion_examples():
    assert torsion_test(curve(0, 1), INFINITY) == 1
    assert torsion_test(curve(0, 4), qpoint(0, 2)) == 3
    assert torsion_test(curve(-1, 0), qpoint(0, 0)) == 2
    assert torsion_test(curve(-1, 1), qpoint(1, 1)) is None
    # 11a3 short model y^2 = x^3 - 432 x + 8208 has 5-torsion at (-12, 108)
    assert torsion_test(curve(-432, 8208), qpoint(-12, 108)) == 5
    hv, order = height_and_torsion(-432, 8208, qpoint(-12, 108))
    assert (hv.value, order) == (0.0, 5)


# -- minimal discriminant -----------------------------------------------------------------


@pytest.mark.parametrize(
    "a4,a6,expected",
    [(0, 16, -27), (-1, 0, 64), (0, 1, -432), (1, 0, -64), (-1, 1, -368), (0, -432, -19683)],
)
def test_minimal_discriminant_short_models(a4, a6, expected):
    E = curve(a4, a6)
    got = minimal_discriminant(E)
    assert got == expected
    _check_congruence(E, got)


@pytest.mark.parametrize("label,ainv,expected", TABLE, ids=[t[0] for t in TABLE])
def test_minimal_discriminant_tables(label, ainv, expected):
    c4, c6 = c_invariants(ainv)
    E = curve(-27 * c4, -54 * c6)
    got = minimal_discriminant(E)
    assert got == expected
    _check_congruence(E, got)


def _check_congruence(E, dmin):
    assert (dmin > 0) == (E.disc_int > 0)
    for p in factorize(E.disc_int).factors:
        vd, vm = valuation(E.disc_int, p), valuation(dmin, p)
        assert 0 <= vm <= vd and (vd - vm) % 12 == 0
    assert E.disc_int % dmin == 0


def test_minimal_discriminant_scaled_models():
    # scaling by u multiplies disc by u^12 and leaves the minimal discriminant alone
    for u in (2, 3, 5, 6):
        assert minimal_discriminant(curve(-1296 * u**4, 11664 * u**6)) == 37


def test_local_data_kodaira():
    assert local_data(curve(-1296, 11664), 37).kodaira == "I1"


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_mindisc_congruence(seed):
    rng = random.Random(seed)
    u = rng.choice([1, 2, 3, 4, 6, 10])
    while True:
        A, B = rng.randint(-200, 200), rng.randint(-200, 200)
        if 4 * A**3 + 27 * B * B:
            break
    E = curve(A * u**4, B * u**6)
    _check_congruence(E, minimal_discriminant(E))


# -- upper-bound constants --------------------------------------------------------------------


def test_up_constants_running_family():
    fam, P = running_family()
    c = up_bound_constants(fam, P)
    assert c.d_AB == 4 and c.c1 == 4
    assert c.N_AB == 8
    assert c.c2 == pytest.approx(math.log(32))
    assert c.d_psi == 1 and c.c3 == 0.0
    assert c.U_P == pytest.approx(max(1 + 4 / 3, math.log(32) / 3))


def test_up_constants_linear_edge():
    from avgheight.family import FamilyPoint, RatFunc

    S = MPoly.var(1, 0)
    fam = new_family(S, MPoly.zero(1))
    c = up_bound_constants(fam, FamilyPoint(RatFunc(MPoly.zero(1)), RatFunc(MPoly.zero(1))))
    # masses of -2A, A^2, 4A are 2, 1, 4; the constants 1 and 4 give the floor
    assert c.N_AB == 4
    assert c.d_AB == 2

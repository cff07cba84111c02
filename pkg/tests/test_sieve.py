import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgheight.errors import BudgetExceeded, PreconditionError
from avgheight.factor import factorize, is_prime
from avgheight.multipoly import MPoly
from avgheight.sieve import (
    count_kfree_values,
    count_Np,
    count_Np2,
    cufr,
    euler_product,
    fit_exponent,
    good_density,
    is_kfree,
    pfr,
    rho,
    rho_brute,
    sqfr,
    sum_invlog,
)

X1 = MPoly.var(1, 0)
S, T = MPoly.var(2, 0), MPoly.var(2, 1)
F_RUN = 4 * S**6 - 27 * T**4


# -- factorization ------------------------------------------------------------------------------


def test_factorize_examples():
    f = factorize(-12)
    assert (f.sign, f.factors) == (-1, {2: 2, 3: 1})
    f = factorize(1)
    assert (f.sign, f.factors) == (1, {})
    assert factorize(2**31 - 1).factors == {2**31 - 1: 1}
    assert is_prime(2**31 - 1)


def test_factorize_semiprime():
    p, q = 1000000007, 998244353
    assert factorize(p * q).factors == {q: 1, p: 1}


def test_factorize_zero():
    with pytest.raises(PreconditionError):
        factorize(0)


def test_factorize_budget():
    # a product of two 25-digit primes is beyond a 50 ms rho budget
    p, q = 1000000000000000000000007, 1000000000000000000000049
    assert is_prime(p) and is_prime(q)
    with pytest.raises(BudgetExceeded):
        factorize(p * q, budget_ms=50)


@given(st.integers(1, 2**64))
@settings(max_examples=300, deadline=None)
def test_factorize_roundtrip(m):
    f = factorize(m)
    assert f.value() == m
    assert all(is_prime(p) for p in f.factors)


# -- k-free and power-free parts ------------------------------------------------------------------


def test_is_kfree_examples():
    assert not is_kfree(12, 2)
    assert is_kfree(12, 3)
    assert is_kfree(0, 5)


def test_pfr_examples():
    assert pfr(12, 2) == 3
    assert pfr(72, 3) == 9
    assert pfr(-8, 3) == 1
    assert sqfr(50) == 2 and cufr(54) == 2
    with pytest.raises(PreconditionError):
        pfr(0, 2)


@given(st.integers(-5000, 5000).filter(bool), st.integers(2, 4))
@settings(max_examples=150, deadline=None)
def test_pfr_minimality(m, N):
    ell = pfr(m, N)
    q = abs(m) // ell
    assert abs(m) % ell == 0 and round(q ** (1 / N)) ** N == q
    for d in range(1, ell):
        if abs(m) % d == 0:
            r = abs(m) // d
            assert round(r ** (1 / N)) ** N != r


@given(st.integers(-10**6, 10**6).filter(bool), st.integers(2, 5))
@settings(max_examples=150, deadline=None)
def test_kfree_consistent_with_factorization(m, k):
    assert is_kfree(m, k) == all(e < k for e in factorize(m).factors.values())


# -- local densities ----------------------------------------------------------------------------


def test_rho_examples():
    assert rho(X1, 7) == 1
    assert rho(S * T, 5) == 9
    assert rho(F_RUN, 4) == rho_brute(F_RUN, 4)


def test_rho_prime_powers_match_brute_force():
    for m in (8, 9, 16, 25, 27, 49, 32):
        assert rho(F_RUN, m) == rho_brute(F_RUN, m)
        assert rho(S**2 - T**3, m) == rho_brute(S**2 - T**3, m)


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_rho_crt_multiplicativity(seed):
    rng = random.Random(seed)
    F = MPoly(2, {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-5, 5) for _ in range(3)})
    if F.is_zero():
        return
    m1, m2 = rng.choice([(2, 3), (3, 4), (4, 5), (5, 7), (8, 9), (7, 3)])
    assert rho(F, m1 * m2) == rho(F, m1) * rho(F, m2)


def test_euler_product_squarefree():
    partial, tail, _ = euler_product(X1, 2, 10**4)
    assert abs(partial - 6 / math.pi**2) < 1e-4
    assert tail > 0


def test_euler_product_degenerate():
    # 4 x^2 + 4 vanishes identically mod 4
    partial, _, factors = euler_product(4 * X1**2 + 4, 2, 50)
    assert factors[2] == 0.0 and partial == 0.0


def test_euler_product_monotone():
    prev = 1.0
    for P in (10, 100, 1000):
        partial, _, _ = euler_product(F_RUN, 5, P)
        assert 0 < partial <= prev
        prev = partial


# -- box counters ---------------------------------------------------------------------------------


def test_count_Np():
    assert count_Np(X1, 10, 3) == 7
    assert count_Np2(X1, 10, 3) == 3


def test_count_Np_bound_shape():
    B = 60
    ratios = [count_Np(F_RUN, B, p) / (B**2 / p + B) for p in (11, 13, 17, 19, 23, 29, 31)]
    assert max(ratios) < 20


def test_count_kfree_small():
    assert count_kfree_values(X1**2, 50, 2).satisfying == 3
    rep = count_kfree_values(X1, 30, 40)
    assert rep.satisfying == 61 and rep.total == 61
    assert rep.density == Fraction(1)


def test_count_kfree_exact_against_brute():
    B = 25
    rep = count_kfree_values(F_RUN, B, 5)
    brute = sum(
        1 for s in range(-B, B + 1) for t in range(-B, B + 1)
        if is_kfree(F_RUN.eval_int([s, t]), 5)
    )
    assert rep.satisfying == brute


def test_count_kfree_budget():
    with pytest.raises(BudgetExceeded):
        count_kfree_values(X1, 10**6, 2, cap=1000)


# -- Good_M ---------------------------------------------------------------------------------------


def test_good_density_small_brute():
    B, M, N = 12, 10, 2
    rep = good_density(F_RUN, B, M, N)
    good = zeros = 0
    for s in range(-B, B + 1):
        for t in range(-B, B + 1):
            v = F_RUN.eval_int([s, t])
            if v == 0:
                zeros += 1
            elif pfr(v, N) ** M > max(abs(s), abs(t)):
                good += 1
    assert rep.extra["zero_values"] == zeros
    assert rep.satisfying == good


def test_good_density_perfect_square_rejected():
    with pytest.raises(PreconditionError):
        good_density((S + T) ** 2, 10, 10, 2)


def test_good_density_nondecreasing_in_M():
    d = [good_density(F_RUN, 40, M, 2).density for M in (2.5, 4, 10)]
    assert d == sorted(d)


# -- inverse-log sums -----------------------------------------------------------------------------


def test_sum_invlog():
    assert sum_invlog(10, 1).total == pytest.approx(sum(2 / math.log(r) for r in range(2, 11)))
    assert sum_invlog(1, 2).total == 0.0
    ratios = [sum_invlog(B, 2).ratio for B in (10**2, 10**3, 10**4)]
    assert ratios[0] > ratios[1] > ratios[2]


def test_fit_exponent():
    xs = [10, 20, 40, 80]
    assert fit_exponent(xs, [3 * x**1.5 for x in xs]) == pytest.approx(1.5)

"""Deterministic integer factorization.

Trial division by small primes, a primality test, then Brent's variant of
Pollard rho with a fixed sequence of polynomial constants.  A wall-clock
budget turns pathological inputs into ``BudgetExceeded`` rather than hangs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import gmpy2

from .errors import BudgetExceeded, PreconditionError

TRIAL_BOUND = 4096
DEFAULT_BUDGET_MS = 60_000


def _small_primes(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, v in enumerate(sieve) if v]


SMALL_PRIMES = _small_primes(TRIAL_BOUND)
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 3.3e24, BPSW (gmpy2) above."""
    if n < 2:
        return False
    for p in SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    if n >= 3317044064679887385961981:
        return bool(gmpy2.is_bpsw_prp(n))
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: dict[int, int] = field(default_factory=dict)

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors.items():
            out *= p**e
        return out


def _brent(n: int, c: int, deadline: float) -> int | None:
    # Brent's cycle detection on x -> x^2 + c
    n = gmpy2.mpz(n)
    y, r, q, m = gmpy2.mpz(2), 1, gmpy2.mpz(1), 128
    g = gmpy2.mpz(1)
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gmpy2.gcd(q, n)
            k += m
        r *= 2
        if time.monotonic() > deadline:
            raise BudgetExceeded(f"factorization of a {int(n).bit_length()}-bit number timed out")
        if r > 1 << 26:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
            if g > 1:
                break
    return int(g) if g != n else None


def _split(n: int, deadline: float) -> list[int]:
    """Prime factors (with repetition) of ``n`` > 1 free of small primes."""
    if is_prime(n):
        return [n]
    r = gmpy2.iroot(n, 2)
    if r[1]:
        f = _split(int(r[0]), deadline)
        return f + f
    for c in range(1, 64):
        d = _brent(n, c, deadline)
        if d is not None and 1 < d < n:
            return _split(d, deadline) + _split(n // d, deadline)
    raise BudgetExceeded(f"Pollard rho failed on {n}")


@lru_cache(maxsize=65536)
def _factor_abs(n: int, budget_ms: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for p in SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        deadline = time.monotonic() + budget_ms / 1000
        for p in _split(n, deadline):
            out[p] = out.get(p, 0) + 1
    return tuple(sorted(out.items()))


def factorize(m: int, budget_ms: int = DEFAULT_BUDGET_MS) -> Factorization:
    """Complete factorization of a nonzero integer."""
    m = int(m)
    if m == 0:
        raise PreconditionError("cannot factor 0")
    return Factorization(1 if m > 0 else -1, dict(_factor_abs(abs(m), int(budget_ms))))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise PreconditionError("valuation of 0")
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])


def prime_divisors(n: int, budget_ms: int = DEFAULT_BUDGET_MS) -> list[int]:
    return sorted(factorize(n, budget_ms).factors)


def small_prime_table(bound: int) -> list[int]:
    if bound <= TRIAL_BOUND:
        import bisect

        return SMALL_PRIMES[: bisect.bisect_right(SMALL_PRIMES, bound)]
    return _small_primes(bound)

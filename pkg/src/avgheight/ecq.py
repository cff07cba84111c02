"""Elliptic curves over Q in short Weierstrass form.

Group law, naive x-height, torsion test, minimal discriminant and canonical
height.  Points live on the rational model ``y^2 = x^3 + a4 x + a6`` of a
``SpecCurve``; heights and torsion are computed on its integral model.

Height normalization: ``canonical_height`` returns the Neron-Tate height
``(1/2) lim 4^-n h_x([2^n] p)``.  Pass ``normalization="x"`` for the limit
without the factor 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, log

import gmpy2
from gmpy2 import mpfr

from .errors import PreconditionError
from .factor import DEFAULT_BUDGET_MS, factorize, valuation
from .tate import LocalData, b_invariants, c_invariants, local_minimal_short

# -- points and the group law --------------------------------------------------------


@dataclass(frozen=True)
class QPoint:
    """A rational point; ``x is None`` encodes the point at infinity."""

    x: Fraction | None = None
    y: Fraction | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        return "QPoint(Infinity)" if self.x is None else f"QPoint({self.x}, {self.y})"


INFINITY = QPoint()


def qpoint(x, y) -> QPoint:
    return QPoint(Fraction(x), Fraction(y))


def _coeffs(E) -> tuple[Fraction, Fraction]:
    return Fraction(E.a4), Fraction(E.a6)


def on_curve(E, p: QPoint) -> bool:
    if p.is_infinity:
        return True
    a4, a6 = _coeffs(E)
    return p.y * p.y == p.x**3 + a4 * p.x + a6


def _check(E, p: QPoint) -> None:
    if not on_curve(E, p):
        raise PreconditionError(f"{p} is not on y^2 = x^3 + {E.a4} x + {E.a6}")


def _add(a4, p: QPoint, q: QPoint) -> QPoint:
    if p.x is None:
        return q
    if q.x is None:
        return p
    if p.x == q.x:
        if p.y + q.y == 0:
            return INFINITY
        lam = (3 * p.x * p.x + a4) / (2 * p.y)
    else:
        lam = (q.y - p.y) / (q.x - p.x)
    x3 = lam * lam - p.x - q.x
    return QPoint(x3, lam * (p.x - x3) - p.y)


def _mul(a4, m: int, p: QPoint) -> QPoint:
    if m < 0:
        m, p = -m, neg_point(p)
    out, base = INFINITY, p
    while m:
        if m & 1:
            out = _add(a4, out, base)
        m >>= 1
        if m:
            base = _add(a4, base, base)
    return out


def neg_point(p: QPoint) -> QPoint:
    return p if p.is_infinity else QPoint(p.x, -p.y)


def add_points(E, p: QPoint, q: QPoint) -> QPoint:
    _check(E, p)
    _check(E, q)
    return _add(Fraction(E.a4), p, q)


def double_point(E, p: QPoint) -> QPoint:
    _check(E, p)
    return _add(Fraction(E.a4), p, p)


def mul_point(E, m: int, p: QPoint) -> QPoint:
    _check(E, p)
    return _mul(Fraction(E.a4), int(m), p)


def duplication_x(a4, a6, x: Fraction) -> Fraction | None:
    """x([2]p) from the quartic duplication formula; ``None`` when [2]p is infinity."""
    den = 4 * x**3 + 4 * a4 * x + 4 * a6
    if den == 0:
        return None
    return (x**4 - 2 * a4 * x * x - 8 * a6 * x + a4 * a4) / den


# -- heights -------------------------------------------------------------------------------


def naive_x_height(p: QPoint) -> float:
    """``log max(|u|, |v|)`` for ``x = u/v`` in lowest terms; 0 at infinity."""
    if p.is_infinity:
        return 0.0
    return _log_int(max(abs(p.x.numerator), p.x.denominator))


def _log_int(n: int) -> float:
    if n <= 0:
        raise ValueError("log of a nonpositive integer")
    if n.bit_length() < 1000:
        return math.log(n)
    return float(gmpy2.log(gmpy2.mpz(n)))


@dataclass(frozen=True)
class HeightValue:
    value: float
    error_bound: float


def to_integral(E, p: QPoint) -> QPoint:
    """Image of ``p`` on the integral model (scaling by ``ell^d``)."""
    if p.is_infinity:
        return p
    s = E.scale
    return QPoint(p.x * s * s, p.y * s**3)


def _torsion_integral(A: int, B: int, p: QPoint) -> int | None:
    # Nagell-Lutz plus Mazur on y^2 = x^3 + A x + B with A, B integers
    if p.is_infinity:
        return 1
    if p.x.denominator != 1 or p.y.denominator != 1:
        return None
    y = p.y.numerator
    if y == 0:
        return 2
    D = 4 * A**3 + 27 * B * B
    if D % (y * y):
        return None
    a4 = Fraction(A)
    q = p
    for m in range(2, 13):
        q = _add(a4, q, p)
        if q.is_infinity:
            return m
        if q.x.denominator != 1:
            return None
    return None


def torsion_test(E, p: QPoint) -> int | None:
    """Order of ``p`` if finite (at most 12 by Mazur), else ``None``."""
    _check(E, p)
    return _torsion_integral(E.A_int, E.B_int, to_integral(E, p))


# -- archimedean local height ----------------------------------------------------------


def _arch_masses(A: float, B: float, D: float) -> tuple[float, float]:
    """(log max mass of phi, psi), log K) for the rescaled curve, where D = 4A^3 + 27B^2."""
    a, b = abs(A), abs(B)
    m_up = max(1 + 2 * a + 8 * b + a * a, 4 + 4 * a + 4 * b)
    fX = 4 * abs(D) + 4 * a * a * b + 4 * a * abs(3 * A**3 + 22 * B * B) + 12 * b * abs(A**3 + 8 * B * B)
    gX = a * a * b + a * abs(5 * A**3 + 32 * B * B) + 2 * b * abs(13 * A**3 + 96 * B * B) + 3 * a * a * abs(A**3 + 8 * B * B)
    fZ = 12 + 16 * a
    gZ = 3 + 5 * a + 27 * b
    K = max(fX + gX, fZ + gZ)
    return m_up, K


def _arch_local(A: int, B: int, x: Fraction, tol: float) -> tuple[mpfr, float, int]:
    """Archimedean local height (x-normalization) on the integral model.

    Returns (value, error bound, number of series terms).
    """
    # rescale so that max(|A|^(1/4), |B|^(1/6)) = 1
    la = math.log(abs(A)) / 4 if A else -math.inf
    lb = math.log(abs(B)) / 6 if B else -math.inf
    lu = max(la, lb)
    Dint = 4 * A**3 + 27 * B * B
    # |D''| = |D| / u^12, used to size the working precision
    logD = _log_int(abs(Dint)) - 12 * lu
    prec = 80 + max(0, int(-logD / math.log(2)) * 2)
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        u2 = gmpy2.exp(mpfr(2) * mpfr(lu)) if lu != 0 else mpfr(1)
        if A:
            Ar = mpfr(A) / (u2 * u2)
        else:
            Ar = mpfr(0)
        Br = mpfr(B) / (u2 * u2 * u2) if B else mpfr(0)
        Dr = 4 * Ar**3 + 27 * Br * Br
        m_up, K = _arch_masses(float(Ar), float(Br), float(Dr))
        eps_hi = math.log(m_up)
        eps_lo = math.log(4) + logD - math.log(K)
        L = max(abs(eps_hi), abs(eps_lo))
        # tail after N terms is at most L 4^-N / 3
        N = 1
        while L * 4.0**-N / 3 > tol / 4:
            N += 1
        X = mpfr(x.numerator) / u2
        Z = mpfr(x.denominator)
        mx = max(abs(X), abs(Z))
        X, Z = X / mx, Z / mx
        total = gmpy2.log(mx) - gmpy2.log(mpfr(x.denominator))  # log max(|x''|, 1)
        w = mpfr(1)
        A2 = Ar * Ar
        for _ in range(N):
            w /= 4
            if Z == 0:
                break
            X2, Z2 = X * X, Z * Z
            XZ = X * Z
            Z3 = Z2 * Z
            phi = X2 * X2 - 2 * Ar * X2 * Z2 - 8 * Br * X * Z3 + A2 * Z2 * Z2
            psi = 4 * XZ * X2 + 4 * Ar * XZ * Z2 + 4 * Br * Z2 * Z2
            m = max(abs(phi), abs(psi))
            total += w * gmpy2.log(m)
            X, Z = phi / m, psi / m
        total += mpfr(lu) * 2
        err = L * 4.0**-N / 3 + float(2 ** (-(prec - 40))) * (N + 2) * (1 + abs(float(total)))
    return total, err, N


# -- non-archimedean local heights ------------------------------------------------------


def _nonarch_min(ld: LocalData) -> Fraction:
    """Local height / log p on a minimal model (x-normalization)."""
    p = ld.p
    a1, a2, a3, a4, a6 = ld.model
    x, y = ld.point
    N = ld.ord_disc

    def v(q: Fraction) -> float:
        if q == 0:
            return math.inf
        return valuation(q.numerator, p) - valuation(q.denominator, p)

    if v(x) < 0:
        return Fraction(-v(x))
    b2, b4, b6, b8 = b_invariants(ld.model)
    c4, _ = c_invariants(ld.model)
    vA = v(3 * x * x + 2 * a2 * x + a4 - a1 * y)
    vB = v(2 * y + a1 * x + a3)
    if vA <= 0 or vB <= 0:
        return Fraction(0)
    vC = v(3 * x**4 + b2 * x**3 + 3 * b4 * x * x + 3 * b6 * x + b8)
    if c4 % p:
        n = min(Fraction(vB), Fraction(N, 2))
        return -n * (N - n) / N
    if vC >= 3 * vB:
        return Fraction(-2 * vB, 3)
    return Fraction(-vC, 4)


def _singular_primes(A: int, B: int, x: Fraction, y: Fraction, budget_ms: int) -> list[int]:
    """Primes at which the p-integral point reduces to a singular point of the model."""
    e2 = x.denominator
    e = math.isqrt(e2)
    X = x.numerator
    Y = y.numerator
    g = gcd(2 * Y, 3 * X * X + A * e2 * e2)
    g = gcd(g, 16 * (4 * A**3 + 27 * B * B))
    g //= gcd(g, e2**3)
    while True:
        c = gcd(g, e)
        if c == 1:
            break
        g //= c
    if g == 1:
        return []
    return sorted(factorize(g, budget_ms).factors)


def _nonarch_total(A: int, B: int, x: Fraction, y: Fraction, budget_ms: int):
    """Sum of non-archimedean local heights on the integral model, as (value, primes used)."""
    total = mpfr(0)
    if x.denominator > 1:
        total += gmpy2.log(mpfr(x.denominator))
    used = []
    for p in _singular_primes(A, B, x, y, budget_ms):
        ld = local_minimal_short(A, B, p, (x, y))
        r = _nonarch_min(ld) - Fraction(ld.ord_disc_input - ld.ord_disc, 6)
        if r:
            total += mpfr(r.numerator) / r.denominator * gmpy2.log(mpfr(p))
        used.append(p)
    return total, used


def canonical_height(E, p: QPoint, tol: float = 1e-9, normalization: str = "nt",
                     budget_ms: int = DEFAULT_BUDGET_MS) -> HeightValue:
    """Canonical height of ``p`` with a rigorous bound on the archimedean truncation."""
    if normalization not in ("nt", "x"):
        raise ValueError("normalization must be 'nt' or 'x'")
    _check(E, p)
    return _canonical_height_integral(E.A_int, E.B_int, to_integral(E, p), tol, normalization, budget_ms)


def height_and_torsion(A: int, B: int, q: QPoint, tol: float = 1e-9, normalization: str = "nt",
                       budget_ms: int = DEFAULT_BUDGET_MS) -> tuple[HeightValue, int | None]:
    """Canonical height and torsion order of a point on an integral model."""
    t = _torsion_integral(A, B, q)
    if t is not None:
        return HeightValue(0.0, 0.0), t
    factor = 0.5 if normalization == "nt" else 1.0
    # work in the x-normalization with the tolerance rescaled
    lam_inf, err, _ = _arch_local(A, B, q.x, tol / factor)
    lam_fin, _ = _nonarch_total(A, B, q.x, q.y, budget_ms)
    hx = lam_inf + lam_fin
    value = float(hx) * factor
    return HeightValue(value, (err + 1e-15 * (1 + abs(float(hx)))) * factor), None


def _canonical_height_integral(A, B, q: QPoint, tol, normalization="nt",
                               budget_ms=DEFAULT_BUDGET_MS) -> HeightValue:
    return height_and_torsion(A, B, q, tol, normalization, budget_ms)[0]


def telescoping_height(A: int, B: int, x: Fraction, steps: int = 8, normalization: str = "nt") -> float:
    """``4^-steps h_x([2^steps] p)`` by exact doubling of the x-coordinate."""
    num, den = gmpy2.mpz(x.numerator), gmpy2.mpz(x.denominator)
    A, B = gmpy2.mpz(A), gmpy2.mpz(B)
    for _ in range(steps):
        n2, d2 = num * num, den * den
        phi = n2 * n2 - 2 * A * n2 * d2 - 8 * B * num * d2 * den + A * A * d2 * d2
        psi = 4 * den * (num * n2 + A * num * d2 + B * d2 * den)
        if psi == 0:
            return 0.0
        g = gmpy2.gcd(phi, psi)
        num, den = phi // g, psi // g
        if den < 0:
            num, den = -num, -den
    h = float(gmpy2.log(max(abs(num), den)))
    factor = 0.5 if normalization == "nt" else 1.0
    return factor * h / 4**steps


def telescoping_constant(A: int, B: int, normalization: str = "nt") -> float:
    """``C_E`` with ``|h_x - 4^-N h_x([2^N]p)| <= 4^-N C_E`` on an integral model."""
    a, b = abs(A), abs(B)
    m_up = max(1 + 2 * a + 8 * b + a * a, 4 + 4 * a + 4 * b)
    D = 4 * A**3 + 27 * B * B
    fX = 4 * abs(D) + 4 * a * a * b + 4 * a * abs(3 * A**3 + 22 * B * B) + 12 * b * abs(A**3 + 8 * B * B)
    gX = a * a * b + a * abs(5 * A**3 + 32 * B * B) + 2 * b * abs(13 * A**3 + 96 * B * B) + 3 * a * a * abs(A**3 + 8 * B * B)
    K = max(fX + gX, 12 + 16 * a + 3 + 5 * a + 27 * b)
    c = max(_log_int(K), _log_int(m_up)) / 3
    return c * (0.5 if normalization == "nt" else 1.0)


# -- minimal discriminant --------------------------------------------------------------------


def minimal_discriminant(E, budget_ms: int = DEFAULT_BUDGET_MS) -> int:
    """Global minimal discriminant, sign preserved."""
    A, B, disc = E.A_int, E.B_int, E.disc_int
    if disc == 0:
        raise PreconditionError("singular curve")
    out = 1 if disc > 0 else -1
    for p in factorize(disc, budget_ms).factors:
        out *= p ** local_minimal_short(A, B, p).ord_disc
    return out


def local_data(E, p: int) -> LocalData:
    return local_minimal_short(E.A_int, E.B_int, p)


# -- upper-bound constants ---------------------------------------------------------------


@dataclass(frozen=True)
class UpBoundConstants:
    N_AB: int
    d_AB: int
    c1: float
    c2: float
    d_psi: int
    c3: float
    U_P: float


def up_bound_constants(fam, P) -> UpBoundConstants:
    """Constants of the upper bound ``h^(P_w) <= U_P (1 + h(w))``.

    ``c1 h(w) + c2`` bounds ``h_x([2]p) - 4 h_x(p)`` and ``d_psi h(w) + c3``
    bounds ``h_x(P_w)``.  Summing the telescoping series gives
    ``h^ <= (d_psi + c1/3) h + (c3 + c2/3)``, whence ``U_P`` is the max of the two.
    """
    A, B = fam.A, fam.B
    polys = [A * -2, B * -8, A * A, A * 4, B * 4]
    N_AB = max([1, 4] + [f.coeff_mass() for f in polys])
    d_AB = fam.d_AB
    c1 = float(d_AB)
    c2 = log(4 * N_AB)
    d_psi = max(P.x.num.total_degree(), P.x.den.total_degree())
    c3 = log(max(P.x.num.coeff_mass(), P.x.den.coeff_mass(), 1))
    U = max(d_psi + c1 / 3, c3 + c2 / 3)
    return UpBoundConstants(N_AB, d_AB, c1, c2, d_psi, c3, U)


__all__ = [
    "QPoint",
    "INFINITY",
    "qpoint",
    "on_curve",
    "add_points",
    "double_point",
    "mul_point",
    "neg_point",
    "duplication_x",
    "naive_x_height",
    "HeightValue",
    "canonical_height",
    "height_and_torsion",
    "telescoping_height",
    "telescoping_constant",
    "minimal_discriminant",
    "torsion_test",
    "to_integral",
    "local_data",
    "UpBoundConstants",
    "up_bound_constants",
]

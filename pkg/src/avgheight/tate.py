"""Tate's algorithm at a single prime, with the point carried along.

Models are long Weierstrass 5-tuples ``(a1, a2, a3, a4, a6)`` of Python ints.
Only what the height and discriminant code needs is returned: the local
minimal model, the Kodaira symbol, and ``ord_p`` of the minimal discriminant.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .factor import valuation

Model = tuple[int, int, int, int, int]


def b_invariants(a: Model) -> tuple[int, int, int, int]:
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = a1 * a3 + 2 * a4
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(a: Model) -> tuple[int, int]:
    b2, b4, b6, _ = b_invariants(a)
    return b2 * b2 - 24 * b4, -(b2**3) + 36 * b2 * b4 - 216 * b6


def disc_of(a: Model) -> int:
    b2, b4, b6, b8 = b_invariants(a)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def _ord(n: int, p: int) -> float:
    return float("inf") if n == 0 else valuation(n, p)


def transform(a: Model, u: int, r: int, s: int, t: int) -> Model:
    """Coefficients after ``x = u^2 x' + r``, ``y = u^3 y' + s u^2 x' + t`` (exact division)."""
    a1, a2, a3, a4, a6 = a
    n1 = a1 + 2 * s
    n2 = a2 - s * a1 + 3 * r - s * s
    n3 = a3 + r * a1 + 2 * t
    n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    n6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
    out = []
    for c, k in ((n1, 1), (n2, 2), (n3, 3), (n4, 4), (n6, 6)):
        q, rem = divmod(c, u**k)
        assert rem == 0, "non-integral model after transformation"
        out.append(q)
    return tuple(out)


def transform_point(pt, u, r, s, t):
    if pt is None:
        return None
    x, y = pt
    xn = (x - r) / Fraction(u * u)
    yn = (y - s * (x - r) - t) / Fraction(u**3)
    return xn, yn


@dataclass(frozen=True)
class LocalData:
    p: int
    model: Model  # minimal at p
    kodaira: str
    ord_disc: int  # ord_p of the minimal discriminant
    ord_disc_input: int
    point: tuple[Fraction, Fraction] | None = None

    @property
    def scaling_exponent(self) -> int:
        return (self.ord_disc_input - self.ord_disc) // 12


def _poly_roots_mod(coeffs: list[int], p: int) -> list[int]:
    # coeffs from constant term upwards
    return [x for x in range(p) if sum(c * x**i for i, c in enumerate(coeffs)) % p == 0]


def _singular_point_mod(a: Model, p: int) -> tuple[int, int]:
    a1, a2, a3, a4, a6 = a
    for x in range(p):
        for y in range(p):
            f = y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6
            fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
            fy = 2 * y + a1 * x + a3
            if f % p == 0 and fx % p == 0 and fy % p == 0:
                return x, y
    raise AssertionError("no singular point although p divides the discriminant")


def tate(a: Model, p: int, point=None) -> LocalData:
    """Run Tate's algorithm at ``p`` on an integral model.

    Intended for small primes (root finding is by enumeration mod ``p``).
    ``point`` is an optional affine point ``(x, y)`` of Fractions that is
    mapped to the minimal model alongside the coefficients.
    """
    a = tuple(int(c) for c in a)
    vd_in = valuation(disc_of(a), p)
    pt = point
    while True:
        vd = valuation(disc_of(a), p)
        if vd == 0:
            return LocalData(p, a, "I0", 0, vd_in, pt)
        # move the singular point to (0, 0)
        r, t = _singular_point_mod(a, p)
        a = transform(a, 1, r, 0, t)
        pt = transform_point(pt, 1, r, 0, t)
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8 = b_invariants(a)
        c4, _ = c_invariants(a)
        if c4 % p:
            return LocalData(p, a, f"I{vd}", vd, vd_in, pt)
        if _ord(a6, p) < 2:
            return LocalData(p, a, "II", vd, vd_in, pt)
        if _ord(b8, p) < 3:
            return LocalData(p, a, "III", vd, vd_in, pt)
        if _ord(b6, p) < 3:
            return LocalData(p, a, "IV", vd, vd_in, pt)
        # make p | a1, a2 and p^2 | a3, a4 and p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            inv2 = pow(2, -1, p)
            s = (-a1 * inv2) % p
            t = (-a3 * inv2) % p * p
        a = transform(a, 1, 0, s, t)
        pt = transform_point(pt, 1, 0, s, t)
        a1, a2, a3, a4, a6 = a
        cubic = [a6 // p**3, a4 // p**2, a2 // p, 1]
        roots = _poly_roots_mod(cubic, p)
        # multiplicity structure of the cubic mod p
        d1 = [cubic[1], 2 * cubic[2], 3]
        # compare with (X - x)^3 directly; second derivatives vanish identically for p = 2, 3
        triple = [x for x in roots
                  if (cubic[2] + 3 * x) % p == 0 and (cubic[1] - 3 * x * x) % p == 0 and (cubic[0] + x**3) % p == 0]
        if triple:
            pass
        else:
            double = [x for x in roots if sum(c * x**i for i, c in enumerate(d1)) % p == 0]
            if double:
                return LocalData(p, a, f"I{vd - 6}*", vd, vd_in, pt)
            return LocalData(p, a, "I0*", vd, vd_in, pt)
        r = triple[0] * p
        a = transform(a, 1, r, 0, 0)
        pt = transform_point(pt, 1, r, 0, 0)
        a1, a2, a3, a4, a6 = a
        # quadratic Y^2 + (a3/p^2) Y - a6/p^4
        q1, q0 = a3 // p**2, -(a6 // p**4)
        qroots = _poly_roots_mod([q0, q1, 1], p)
        distinct = (q1 % 2 == 1) if p == 2 else ((q1 * q1 - 4 * q0) % p != 0)
        if distinct:
            return LocalData(p, a, "IV*", vd, vd_in, pt)
        t = qroots[0] * p * p
        a = transform(a, 1, 0, 0, t)
        pt = transform_point(pt, 1, 0, 0, t)
        a1, a2, a3, a4, a6 = a
        if _ord(a4, p) < 4:
            return LocalData(p, a, "III*", vd, vd_in, pt)
        if _ord(a6, p) < 6:
            return LocalData(p, a, "II*", vd, vd_in, pt)
        a = transform(a, p, 0, 0, 0)
        pt = transform_point(pt, p, 0, 0, 0)


def local_minimal_short(A: int, B: int, p: int, point=None) -> LocalData:
    """Minimal model at ``p`` of ``y^2 = x^3 + A x + B``.

    The obvious scaling by ``p^k`` with ``p^4k | A`` and ``p^6k | B`` is done
    first; for ``p >= 5`` that already gives the minimal model, while ``p = 2, 3``
    finish with Tate's algorithm.
    """
    disc = -16 * (4 * A**3 + 27 * B * B)
    vd = valuation(disc, p)
    k = min(valuation(c, p) // w for c, w in ((A, 4), (B, 6)) if c)
    if k:
        u = p**k
        A, B = A // u**4, B // u**6
        point = transform_point(point, u, 0, 0, 0)
    model = (0, 0, 0, A, B)
    if p in (2, 3):
        ld = tate(model, p, point)
        return LocalData(p, ld.model, ld.kodaira, ld.ord_disc, vd, ld.point)
    vmin = vd - 12 * k
    vc4 = _ord(A, p)
    if vmin == 0:
        kod = "I0"
    elif vc4 == 0:
        kod = f"I{vmin}"
    elif 3 * vc4 < vmin:
        kod = f"I{vmin - 6}*"
    else:
        kod = {2: "II", 3: "III", 4: "IV", 6: "I0*", 8: "IV*", 9: "III*", 10: "II*"}[vmin]
    return LocalData(p, model, kod, vmin, vd, point)

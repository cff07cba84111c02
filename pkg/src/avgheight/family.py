"""Elliptic curve families Y^2 = X^3 + A(T) X + B(T) over Q(T1..Tn).

Covers the discriminant, normalization and split checks, the twelfth-power
decomposition of the discriminant, its homogenization, and specialization of
the curve and of a family point at a rational parameter.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import PreconditionError, SingularSpecialization
from .multipoly import (
    MPoly,
    content,
    default_names,
    div_exact,
    gcd_poly,
    homogenize,
    normalize,
    perfect_power_root,
    poly_from_json,
    poly_to_json,
    primitive_part,
    sqfr_part,
    squarefree_decomposition,
)


# -- rational functions ----------------------------------------------------------


class RatFunc:
    """Reduced quotient ``num / den`` of integer polynomials.

    The denominator has positive leading coefficient and the common integer
    factor of the two contents is removed, so ``T/2`` is stored as is.
    """

    __slots__ = ("num", "den", "_hnum", "_hden", "_hdeg")

    def __init__(self, num: MPoly, den: MPoly | None = None):
        if den is None:
            den = MPoly.one(num.nvars)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.nvars != den.nvars:
            raise PreconditionError("numerator and denominator have different nvars")
        if num.is_zero():
            num, den = num, MPoly.one(num.nvars)
        else:
            g = gcd_poly(num, den)
            if not g.is_constant():
                num, den = div_exact(num, g), div_exact(den, g)
            c = gcd(content(num), content(den))
            if c > 1:
                num, den = num.scale_div(c), den.scale_div(c)
            if den.leading_coeff() < 0:
                num, den = -num, -den
        self.num = num
        self.den = den
        self._hnum = None

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, o):
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return RatFunc(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return RatFunc(self.num * o.num, self.den * o.den)

    def __pow__(self, k: int):
        return RatFunc(self.num**k, self.den**k)

    def degree(self) -> int:
        return max(self.num.total_degree(), self.den.total_degree())

    def evaluate(self, omega: Sequence) -> Fraction | None:
        """Value at ``omega``; ``None`` when the denominator vanishes there."""
        d = self.den.evaluate(omega)
        if d == 0:
            return None
        return self.num.evaluate(omega) / d

    def eval_homogeneous(self, nu: Sequence[int]) -> tuple[int, int]:
        """Integer pair ``(N, D)`` with value ``N/D`` at ``omega = nu[1:]/nu[0]`` (not reduced)."""
        if self._hnum is None:
            deg = self.degree()
            self._hdeg = deg
            self._hnum = homogenize(self.num, deg)
            self._hden = homogenize(self.den, deg)
        return self._hnum.eval_int(nu), self._hden.eval_int(nu)

    def to_json(self) -> dict:
        return {"num": poly_to_json(self.num), "den": poly_to_json(self.den)}

    def __repr__(self):
        if self.den == 1:
            return f"RatFunc({self.num.to_str()})"
        return f"RatFunc(({self.num.to_str()}) / ({self.den.to_str()}))"


# -- families ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurveFamily:
    nvars: int
    A: MPoly
    B: MPoly
    disc: MPoly
    d: int
    d_AB: int
    normalized: bool
    split_status: str  # "NonSplit" or "PossiblySplit"
    names: tuple[str, ...] = ()
    _hom: dict = field(default_factory=dict, repr=False, compare=False)

    def homogeneous_forms(self) -> tuple[MPoly, MPoly, MPoly]:
        """Homogenizations of A, B, disc to degrees 4d, 6d, 12d in a leading variable."""
        if not self._hom:
            self._hom["A"] = homogenize(self.A, 4 * self.d)
            self._hom["B"] = homogenize(self.B, 6 * self.d)
            self._hom["disc"] = homogenize(self.disc, 12 * self.d)
        return self._hom["A"], self._hom["B"], self._hom["disc"]


def discriminant(A: MPoly, B: MPoly) -> MPoly:
    return (A**3 * 4 + B**2 * 27) * -16


def _is_normalized(A: MPoly, B: MPoly) -> bool:
    # a nonconstant g with g^4 | A and g^6 | B exists iff some gcd of a part of
    # multiplicity >= 4 in A and one of multiplicity >= 6 in B is nonconstant
    if A.is_zero() and B.is_zero():
        return False
    if A.is_zero():
        return all(i < 6 for _, i in squarefree_decomposition(B).parts)
    if B.is_zero():
        return all(i < 4 for _, i in squarefree_decomposition(A).parts)
    pa = [s for s, i in squarefree_decomposition(A).parts if i >= 4]
    pb = [s for s, i in squarefree_decomposition(B).parts if i >= 6]
    return not any(not gcd_poly(s, t).is_constant() for s in pa for t in pb)


def _is_possibly_split(A: MPoly, B: MPoly) -> bool:
    # j = 1728 * 4A^3 / (4A^3 + 27B^2) is constant iff A = 0, B = 0, or A^3 is a
    # constant multiple of B^2
    if A.is_zero() or B.is_zero():
        return True
    a3, b2 = A**3, B**2
    e = b2.leading_exponent()
    if a3.leading_exponent() != e:
        return False
    return a3 * b2.leading_coeff() == b2 * a3.leading_coeff()


def new_family(A: MPoly, B: MPoly, names: Sequence[str] | None = None) -> CurveFamily:
    """Build the family ``Y^2 = X^3 + A X + B`` and run its structural checks."""
    if A.nvars != B.nvars:
        raise PreconditionError("A and B have different nvars")
    disc = discriminant(A, B)
    if disc.is_zero():
        raise PreconditionError("discriminant -16(4A^3 + 27B^2) vanishes identically")
    if A.is_constant() and B.is_constant():
        raise PreconditionError("A and B are both constant")
    dA, dB = A.total_degree(), B.total_degree()
    d = max(dA, dB, 1)
    d_AB = max(2 * dA, dB, 0)
    return CurveFamily(
        nvars=A.nvars,
        A=A,
        B=B,
        disc=disc,
        d=d,
        d_AB=d_AB,
        normalized=_is_normalized(A, B),
        split_status="PossiblySplit" if _is_possibly_split(A, B) else "NonSplit",
        names=tuple(names) if names else tuple(default_names(A.nvars)),
    )


@dataclass(frozen=True)
class FamilyPoint:
    x: RatFunc
    y: RatFunc


def family_point(fam: CurveFamily, x: RatFunc, y: RatFunc) -> FamilyPoint:
    """Check the Weierstrass identity exactly and wrap the point."""
    lhs = y * y
    rhs = x * x * x + RatFunc(fam.A) * x + RatFunc(fam.B)
    if lhs != rhs:
        raise PreconditionError("point does not satisfy y^2 = x^3 + A x + B")
    return FamilyPoint(x, y)


# -- twelfth-power decomposition -----------------------------------------------------


@dataclass(frozen=True)
class TwelfthPowerDecomp:
    alpha: int
    F: MPoly
    e: int
    a: int
    b: int


def twelfth_power_decomposition(fam: CurveFamily) -> TwelfthPowerDecomp:
    """Write ``disc = alpha * F^e`` with ``F`` primitive and not a perfect power."""
    dec = squarefree_decomposition(fam.disc)
    e = 0
    for _, i in dec.parts:
        e = gcd(e, i)
    F = MPoly.one(fam.nvars)
    for s, i in dec.parts:
        F = F * s ** (i // e)
    F = normalize(F)
    alpha = div_exact(fam.disc, F**e)
    assert alpha is not None and alpha.is_constant()
    a = e % 12 or 12
    b = (e - a) // 12
    return TwelfthPowerDecomp(alpha.constant_value(), F, e, a, b)


def homogenized_disc(fam: CurveFamily) -> MPoly:
    return fam.homogeneous_forms()[2]


def f_E(fam: CurveFamily) -> MPoly:
    return sqfr_part(homogenized_disc(fam))


# -- specialization -------------------------------------------------------------------


@dataclass(frozen=True)
class SpecCurve:
    """A specialized curve with its integral model ``Y^2 = X^3 + A_int X + B_int``."""

    omega: tuple[Fraction, ...]
    a4: Fraction
    a6: Fraction
    ell: int
    A_int: int
    B_int: int
    disc_int: int
    d: int = 1

    @property
    def scale(self) -> int:
        """``ell^d``: the integral model is the rational one scaled by this."""
        return self.ell**self.d

    @classmethod
    def from_coefficients(cls, a4, a6) -> "SpecCurve":
        """Curve ``y^2 = x^3 + a4 x + a6`` over Q, made integral by the least scaling."""
        a4, a6 = Fraction(a4), Fraction(a6)
        u = 1
        for p_den, k in ((a4.denominator, 4), (a6.denominator, 6)):
            u = lcm(u, _min_root_scale(p_den, k))
        A_int = a4 * u**4
        B_int = a6 * u**6
        assert A_int.denominator == 1 and B_int.denominator == 1
        A_int, B_int = A_int.numerator, B_int.numerator
        disc = -16 * (4 * A_int**3 + 27 * B_int**2)
        if disc == 0:
            raise SingularSpecialization("singular curve")
        return cls((), a4, a6, u, A_int, B_int, disc, 1)


def _min_root_scale(den: int, k: int) -> int:
    # least u with den | u^k
    from .factor import factorize

    u = 1
    for p, e in factorize(den).factors.items():
        u *= p ** (-(-e // k))
    return u


def _as_fractions(omega) -> tuple[Fraction, ...]:
    return tuple(Fraction(w) for w in omega)


def specialize_curve(fam: CurveFamily, omega: Sequence) -> SpecCurve:
    omega = _as_fractions(omega)
    if len(omega) != fam.nvars:
        raise PreconditionError(f"omega has length {len(omega)}, expected {fam.nvars}")
    ell = 1
    for w in omega:
        ell = lcm(ell, w.denominator)
    nu = [ell] + [w.numerator * (ell // w.denominator) for w in omega]
    return specialize_curve_nu(fam, nu, omega)


def specialize_curve_nu(fam: CurveFamily, nu: Sequence[int], omega=None) -> SpecCurve:
    """Specialize at ``omega = nu[1:]/nu[0]`` where ``nu[0]`` is the lcm of the denominators."""
    hA, hB, hD = fam.homogeneous_forms()
    ell = nu[0]
    disc_int = hD.eval_int(nu)
    if disc_int == 0:
        raise SingularSpecialization(f"discriminant vanishes at {list(nu)}")
    A_int = hA.eval_int(nu)
    B_int = hB.eval_int(nu)
    d = fam.d
    if omega is None:
        omega = tuple(Fraction(v, ell) for v in nu[1:])
    return SpecCurve(
        tuple(omega),
        Fraction(A_int, ell ** (4 * d)),
        Fraction(B_int, ell ** (6 * d)),
        ell,
        A_int,
        B_int,
        disc_int,
        d,
    )


def specialize_point(P: FamilyPoint, fam: CurveFamily, omega: Sequence):
    """``P(omega)`` as a point on the specialized rational model, or ``None`` if undefined."""
    from .ecq import QPoint

    omega = _as_fractions(omega)
    if fam.disc.evaluate(omega) == 0:
        raise SingularSpecialization(f"discriminant vanishes at {omega}")
    x = P.x.evaluate(omega)
    y = P.y.evaluate(omega)
    if x is None or y is None:
        return None
    return QPoint(x, y)


# -- serialization ---------------------------------------------------------------------


def family_to_json(fam: CurveFamily) -> str:
    return json.dumps(
        {"vars": list(fam.names), "A": poly_to_json(fam.A), "B": poly_to_json(fam.B)},
        sort_keys=True,
    )


def _poly_field(obj, n, names):
    from .multipoly import parse_poly

    if isinstance(obj, str):
        return parse_poly(obj, names)
    return poly_from_json(obj, n)


def family_from_json(text: str) -> CurveFamily:
    """Parse ``{"vars": [...], "A": poly, "B": poly}``; polys may also be expression strings."""
    obj = json.loads(text)
    names = list(obj["vars"])
    n = len(names)
    return new_family(_poly_field(obj["A"], n, names), _poly_field(obj["B"], n, names), names)


def point_to_json(P: FamilyPoint) -> str:
    return json.dumps({"x": P.x.to_json(), "y": P.y.to_json()}, sort_keys=True)


def point_from_json(text: str, fam: CurveFamily) -> FamilyPoint:
    obj = json.loads(text)
    n, names = fam.nvars, list(fam.names)

    def rf(o):
        if isinstance(o, (str, list)):
            return RatFunc(_poly_field(o, n, names))
        den = _poly_field(o["den"], n, names) if "den" in o else MPoly.one(n)
        return RatFunc(_poly_field(o["num"], n, names), den)

    return family_point(fam, rf(obj["x"]), rf(obj["y"]))


def running_family() -> tuple[CurveFamily, FamilyPoint]:
    """``Y^2 = X^3 - S^2 X + T^2`` with the point ``(S, T)``."""
    S, T = MPoly.var(2, 0), MPoly.var(2, 1)
    fam = new_family(-(S**2), T**2, ["S", "T"])
    return fam, family_point(fam, RatFunc(S), RatFunc(T))


__all__ = [
    "RatFunc",
    "CurveFamily",
    "FamilyPoint",
    "TwelfthPowerDecomp",
    "SpecCurve",
    "new_family",
    "family_point",
    "twelfth_power_decomposition",
    "homogenized_disc",
    "f_E",
    "specialize_curve",
    "specialize_curve_nu",
    "specialize_point",
    "family_from_json",
    "family_to_json",
    "point_from_json",
    "point_to_json",
    "running_family",
    "discriminant",
    "primitive_part",
    "perfect_power_root",
]

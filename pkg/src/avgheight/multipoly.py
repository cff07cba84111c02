"""Sparse multivariate polynomials over the integers.

Polynomials are immutable.  Terms are stored as a dict from exponent tuples to
nonzero Python ints, and the global monomial order is graded lexicographic:
monomials compare first by total degree, then lexicographically on the
exponent vector.  Every normalisation in this module (gcds, primitive parts,
squarefree parts) makes the leading coefficient under that order positive.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import NVarsMismatch, PreconditionError

Exponent = tuple[int, ...]


def _grlex_key(e: Exponent) -> tuple[int, Exponent]:
    return (sum(e), e)


class MPoly:
    """Immutable sparse polynomial in ``nvars`` variables with integer coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, int] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean: dict[Exponent, int] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent in {e}")
                c = int(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self.nvars = nvars
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, int]) -> "MPoly":
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, nvars: int, c: int) -> "MPoly":
        return cls._raw(nvars, {(0,) * nvars: int(c)} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int, power: int = 1) -> "MPoly":
        e = [0] * nvars
        e[i] = power
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls._raw(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> "MPoly":
        return cls.const(nvars, 1)

    # -- basic queries ------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> int:
        """Coefficient of the monomial 1."""
        return self._terms.get((0,) * self.nvars, 0)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, v: int) -> int:
        return max((e[v] for e in self._terms), default=-1)

    def variables(self) -> set[int]:
        out = set()
        for e in self._terms:
            out.update(i for i, x in enumerate(e) if x)
        return out

    def leading_exponent(self) -> Exponent:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self._terms, key=_grlex_key)

    def leading_coeff(self) -> int:
        return self._terms[self.leading_exponent()] if self._terms else 0

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise NVarsMismatch(f"nvars {self.nvars} != {other.nvars}")
            return other
        if isinstance(other, int):
            return MPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return MPoly.zero(self.nvars)
            return MPoly._raw(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, int] = {}
        n = self.nvars
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(e1[i] + e2[i] for i in range(n))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MPoly._raw(n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MPoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self == MPoly.const(self.nvars, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def scale_div(self, c: int) -> "MPoly":
        """Divide every coefficient by the integer ``c``; must be exact."""
        out = {}
        for e, v in self._terms.items():
            q, r = divmod(v, c)
            if r:
                raise ArithmeticError(f"{c} does not divide coefficient {v}")
            out[e] = q
        return MPoly._raw(self.nvars, out)

    # -- calculus / substitution ---------------------------------------------

    def diff(self, v: int) -> "MPoly":
        out = {}
        for e, c in self._terms.items():
            if e[v]:
                ne = list(e)
                ne[v] -= 1
                out[tuple(ne)] = c * e[v]
        return MPoly._raw(self.nvars, out)

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a vector of rationals (ints, Fractions or strings)."""
        if len(point) != self.nvars:
            raise NVarsMismatch(f"point has length {len(point)}, expected {self.nvars}")
        pt = [Fraction(x) for x in point]
        if all(x.denominator == 1 for x in pt):
            return Fraction(self.eval_int([x.numerator for x in pt]))
        # clear denominators once instead of summing fractions
        den = 1
        for x in pt:
            den = lcm(den, x.denominator)
        nums = [x.numerator * (den // x.denominator) for x in pt]
        d = self.total_degree()
        if d < 0:
            return Fraction(0)
        total = 0
        for e, c in self._terms.items():
            t = c * den ** (d - sum(e))
            for x, k in zip(nums, e):
                if k:
                    t *= x**k
            total += t
        return Fraction(total, den**d)

    def eval_int(self, point: Sequence[int]) -> int:
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t *= x**k
            total += t
        return total

    def eval_mod(self, point: Sequence[int], m: int) -> int:
        total = 0
        for e, c in self._terms.items():
            t = c % m
            for x, k in zip(point, e):
                if k:
                    t = t * pow(x, k, m) % m
            total += t
        return total % m

    def compose(self, subs: Sequence["MPoly"]) -> "MPoly":
        """Substitute polynomial ``subs[i]`` for variable ``i``."""
        if len(subs) != self.nvars:
            raise NVarsMismatch("need one substitution per variable")
        nv = subs[0].nvars if subs else 0
        result = MPoly.zero(nv)
        cache: dict[tuple[int, int], MPoly] = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = subs[i] ** k
            return cache[key]

        for e, c in self._terms.items():
            t = MPoly.const(nv, c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            result = result + t
        return result

    def coeffs_in(self, v: int) -> dict[int, "MPoly"]:
        """View as a univariate polynomial in variable ``v``: degree -> coefficient."""
        out: dict[int, dict[Exponent, int]] = {}
        for e, c in self._terms.items():
            k = e[v]
            ne = e[:v] + (0,) + e[v + 1:]
            out.setdefault(k, {})[ne] = c
        return {k: MPoly._raw(self.nvars, t) for k, t in out.items()}

    def lc_in(self, v: int) -> "MPoly":
        d = self.degree_in(v)
        return self.coeffs_in(v)[d]

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self._terms.values()), default=0)

    def coeff_mass(self) -> int:
        """Sum of absolute values of the coefficients."""
        return sum(abs(c) for c in self._terms.values())

    # -- display ----------------------------------------------------------------

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = list(names) if names else default_names(self.nvars)
        parts = []
        for e in sorted(self._terms, key=_grlex_key, reverse=True):
            c = self._terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"MPoly({self.nvars}, {self.to_str()!r})"


def default_names(n: int) -> list[str]:
    return [f"T{i + 1}" for i in range(n)]


# -- ring operations as free functions ----------------------------------------


def add(a: MPoly, b: MPoly) -> MPoly:
    return a + b


def mul(a: MPoly, b: MPoly) -> MPoly:
    return a * b


def power(a: MPoly, e: int) -> MPoly:
    return a**e


# -- division ------------------------------------------------------------------


def div_exact(a: MPoly, b: MPoly) -> MPoly | None:
    """Quotient ``a / b`` if ``b`` divides ``a`` in Z[T], else ``None``."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.nvars != b.nvars:
        raise NVarsMismatch("nvars mismatch")
    if a.is_zero():
        return a
    n = a.nvars
    lb = b.leading_exponent()
    lcb = b._terms[lb]
    if len(b) == 1:
        out = {}
        for e, c in a._terms.items():
            q, r = divmod(c, lcb)
            if r or any(e[i] < lb[i] for i in range(n)):
                return None
            out[tuple(e[i] - lb[i] for i in range(n))] = q
        return MPoly._raw(n, out)
    rem = dict(a._terms)
    quot: dict[Exponent, int] = {}
    bitems = list(b._terms.items())
    while rem:
        lr = max(rem, key=_grlex_key)
        c = rem[lr]
        if any(lr[i] < lb[i] for i in range(n)):
            return None
        q, r = divmod(c, lcb)
        if r:
            return None
        qe = tuple(lr[i] - lb[i] for i in range(n))
        quot[qe] = q
        for e, cb in bitems:
            te = tuple(qe[i] + e[i] for i in range(n))
            s = rem.get(te, 0) - q * cb
            if s:
                rem[te] = s
            else:
                rem.pop(te, None)
    return MPoly._raw(n, quot)


def _divide(a: MPoly, b: MPoly) -> MPoly:
    q = div_exact(a, b)
    if q is None:
        raise ArithmeticError("inexact polynomial division")
    return q


# -- content, gcd ----------------------------------------------------------------


def content(f: MPoly) -> int:
    """Positive gcd of the coefficients (0 for the zero polynomial)."""
    g = 0
    for c in f._terms.values():
        g = gcd(g, c)
        if g == 1:
            break
    return g


def primitive_part(f: MPoly) -> MPoly:
    """``f / content(f)``; the sign of ``f`` is kept, so ``content * pp == f``."""
    if f.is_zero():
        raise PreconditionError("primitive part of the zero polynomial")
    c = content(f)
    return f if c == 1 else f.scale_div(c)


def normalize(f: MPoly) -> MPoly:
    """Associate of ``f`` with positive leading coefficient."""
    if f.is_zero() or f.leading_coeff() > 0:
        return f
    return -f


def _pp_normal(f: MPoly) -> MPoly:
    return normalize(primitive_part(f))


def _cont_v(f: MPoly, v: int) -> MPoly:
    """gcd in Z[other vars] of the coefficients of ``f`` in ``v``, normalized."""
    g = None
    for c in f.coeffs_in(v).values():
        g = c if g is None else _gcd_full(g, c)
        if g.is_constant() and abs(g.constant_value()) == 1:
            break
    return normalize(g)


def _gcd_full(a: MPoly, b: MPoly) -> MPoly:
    # gcd including the integer content; both nonzero
    ic = gcd(content(a), content(b))
    return _pgcd(_pp_normal(a), _pp_normal(b)) * ic


def _prem(a: MPoly, b: MPoly, v: int) -> MPoly:
    """Pseudo-remainder of ``a`` by ``b`` in variable ``v``."""
    db = b.degree_in(v)
    lb = b.lc_in(v)
    e = a.degree_in(v) - db + 1
    r = a
    nv = a.nvars
    while not r.is_zero():
        dr = r.degree_in(v)
        if dr < db:
            break
        s = r.lc_in(v) * MPoly.var(nv, v, dr - db)
        r = lb * r - s * b
        e -= 1
    return r * lb**e if e > 0 else r


def _pgcd(a: MPoly, b: MPoly) -> MPoly:
    """gcd of two primitive nonzero polynomials (primitive, sign unnormalized)."""
    if a.is_constant() or b.is_constant():
        return MPoly.one(a.nvars)
    va, vb = a.variables(), b.variables()
    v = max(va | vb)
    if v not in va:
        return _pgcd(a, _pp_normal(_cont_v(b, v)))
    if v not in vb:
        return _pgcd(_pp_normal(_cont_v(a, v)), b)
    ca, cb = _cont_v(a, v), _cont_v(b, v)
    pa, pb = _divide(a, ca), _divide(b, cb)
    c = _pgcd(ca, cb)
    r0, r1 = (pa, pb) if pa.degree_in(v) >= pb.degree_in(v) else (pb, pa)
    while True:
        r = _prem(r0, r1, v)
        if r.is_zero():
            g = _divide(r1, _cont_v(r1, v))
            break
        if r.degree_in(v) == 0:
            g = MPoly.one(a.nvars)
            break
        r0, r1 = r1, _divide(r, _cont_v(r, v))
    return c * g


def gcd_poly(a: MPoly, b: MPoly) -> MPoly:
    """Primitive gcd with positive leading coefficient; 1 when coprime."""
    if a.nvars != b.nvars:
        raise NVarsMismatch("nvars mismatch")
    if a.is_zero() and b.is_zero():
        raise PreconditionError("gcd of two zero polynomials")
    if a.is_zero():
        return _pp_normal(b)
    if b.is_zero():
        return _pp_normal(a)
    return normalize(_pgcd(_pp_normal(a), _pp_normal(b)))


# -- squarefree decomposition ----------------------------------------------------


@dataclass(frozen=True)
class SqfDecomp:
    """``content * prod(S**i for S, i in parts)`` reconstructs the input."""

    content: int
    parts: tuple[tuple[MPoly, int], ...]

    def expand(self, nvars: int) -> MPoly:
        out = MPoly.const(nvars, self.content)
        for s, i in self.parts:
            out = out * s**i
        return out


def _yun(p: MPoly, v: int) -> dict[int, MPoly]:
    # p primitive, every irreducible factor involves v
    out: dict[int, MPoly] = {}
    dp = p.diff(v)
    a0 = gcd_poly(p, dp)
    b = _divide(p, a0)
    c = _divide(dp, a0)
    d = c - b.diff(v)
    i = 1
    while not b.is_constant():
        a = gcd_poly(b, d)
        if not a.is_constant():
            out[i] = a
        b = _divide(b, a)
        c = _divide(d, a)
        d = c - b.diff(v)
        i += 1
    return out


def _sqf_rec(g: MPoly, acc: dict[int, MPoly]) -> None:
    if g.is_constant():
        return
    v = max(g.variables())
    c = _cont_v(g, v)
    p = _divide(g, c)
    for i, s in _yun(p, v).items():
        acc[i] = acc[i] * s if i in acc else s
    _sqf_rec(c, acc)


def squarefree_decomposition(f: MPoly) -> SqfDecomp:
    """Squarefree factorisation over Q with integer content carrying the sign."""
    if f.is_zero():
        raise PreconditionError("squarefree decomposition of the zero polynomial")
    acc: dict[int, MPoly] = {}
    _sqf_rec(_pp_normal(f), acc)
    parts = tuple((normalize(acc[i]), i) for i in sorted(acc))
    prod = MPoly.one(f.nvars)
    for s, i in parts:
        prod = prod * s**i
    q = _divide(f, prod)
    assert q.is_constant()
    return SqfDecomp(q.constant_value(), parts)


def sqfr_part(f: MPoly) -> MPoly:
    """Product of the distinct irreducible factors (primitive, positive leading coefficient)."""
    out = MPoly.one(f.nvars)
    for s, _ in squarefree_decomposition(f).parts:
        out = out * s
    return out


def is_squarefree(f: MPoly) -> bool:
    return all(i == 1 for _, i in squarefree_decomposition(f).parts)


def _int_root(c: int, e: int) -> int | None:
    if c < 0:
        if e % 2 == 0:
            return None
        r = _int_root(-c, e)
        return None if r is None else -r
    lo, hi = 0, 1
    while hi**e <= c:
        hi *= 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**e <= c:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo**e == c else None


def perfect_power_root(f: MPoly, e: int) -> MPoly | None:
    """``g`` with ``g**e == f`` exactly, or ``None`` if no such integer polynomial exists."""
    if f.is_zero():
        raise PreconditionError("perfect power root of the zero polynomial")
    if e < 1:
        raise ValueError("e must be positive")
    # an integer root g makes every integer value of f a perfect e-th power
    for k in range(1, 6):
        pt = [k * (i + 2) + 1 for i in range(f.nvars)]
        if _int_root(f.eval_int(pt), e) is None:
            return None
    dec = squarefree_decomposition(f)
    if any(i % e for _, i in dec.parts):
        return None
    r = _int_root(dec.content, e)
    if r is None:
        return None
    g = MPoly.const(f.nvars, r)
    for s, i in dec.parts:
        g = g * s ** (i // e)
    return g if g**e == f else None


# -- resultants ------------------------------------------------------------------


def _bareiss_det(m: list[list[MPoly]], nvars: int) -> MPoly:
    n = len(m)
    if n == 0:
        return MPoly.one(nvars)
    m = [row[:] for row in m]
    sign = 1
    prev = MPoly.one(nvars)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return MPoly.zero(nvars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = _divide(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    return m[n - 1][n - 1] * sign


def _sylvester(a: MPoly, b: MPoly, v: int) -> list[list[MPoly]]:
    da, db = a.degree_in(v), b.degree_in(v)
    ca, cb = a.coeffs_in(v), b.coeffs_in(v)
    z = MPoly.zero(a.nvars)
    acoef = [ca.get(da - i, z) for i in range(da + 1)]
    bcoef = [cb.get(db - i, z) for i in range(db + 1)]
    size = da + db
    rows = []
    for i in range(db):
        rows.append([z] * i + acoef + [z] * (size - i - da - 1))
    for i in range(da):
        rows.append([z] * i + bcoef + [z] * (size - i - db - 1))
    return rows


def resultant_wrt(a: MPoly, b: MPoly, v: int) -> MPoly:
    """Sylvester resultant of ``a`` and ``b`` with respect to variable ``v``."""
    if a.nvars != b.nvars:
        raise NVarsMismatch("nvars mismatch")
    if a.degree_in(v) < 1 or b.degree_in(v) < 1:
        raise PreconditionError("resultant needs positive degree in the chosen variable")
    return _bareiss_det(_sylvester(a, b, v), a.nvars)


def discriminant_wrt(f: MPoly, v: int) -> MPoly:
    """disc_v(f) = (-1)^(n(n-1)/2) Res_v(f, f') / lc_v(f)."""
    n = f.degree_in(v)
    if n < 1:
        raise PreconditionError("discriminant needs positive degree in the chosen variable")
    if n == 1:
        return MPoly.one(f.nvars)
    res = resultant_wrt(f, f.diff(v), v)
    q = _divide(res, f.lc_in(v))
    return -q if (n * (n - 1) // 2) % 2 else q


# -- homogenization ----------------------------------------------------------------


def homogenize(f: MPoly, target_degree: int, new_var_index: int = 0) -> MPoly:
    """Insert a new variable at ``new_var_index`` and pad every monomial to ``target_degree``."""
    if f.total_degree() > target_degree:
        raise PreconditionError(
            f"target degree {target_degree} below total degree {f.total_degree()}"
        )
    if not 0 <= new_var_index <= f.nvars:
        raise ValueError("new_var_index out of range")
    out = {}
    for e, c in f.items():
        ne = e[:new_var_index] + (target_degree - sum(e),) + e[new_var_index:]
        out[ne] = c
    return MPoly._raw(f.nvars + 1, out)


def dehomogenize(f: MPoly, var_index: int = 0) -> MPoly:
    """Set variable ``var_index`` to 1 and drop it."""
    out: dict[Exponent, int] = {}
    for e, c in f.items():
        ne = e[:var_index] + e[var_index + 1:]
        s = out.get(ne, 0) + c
        if s:
            out[ne] = s
        else:
            out.pop(ne, None)
    return MPoly._raw(f.nvars - 1, out)


# -- Mason-Stothers checkers -------------------------------------------------------


@dataclass(frozen=True)
class MasonVerdict:
    tag: str  # AllConstant | NotCoprime | IdentityFails | LemmaViolated
    witness: MPoly | None = None


def _check_exponents(k: int, m: int, r: int) -> None:
    if min(k, m, r) < 1:
        raise PreconditionError("exponents must be positive integers")
    if Fraction(1, k) + Fraction(1, m) + Fraction(1, r) > 1:
        raise PreconditionError("need 1/k + 1/m + 1/r <= 1")


def verify_mason_instance(P: MPoly, Q: MPoly, R: MPoly, k: int, m: int, r: int) -> MasonVerdict:
    """Classify a candidate solution of ``P^k + Q^m = R^r``."""
    _check_exponents(k, m, r)
    residual = P**k + Q**m - R**r
    if not residual.is_zero():
        return MasonVerdict("IdentityFails", residual)
    if P.is_constant() and Q.is_constant() and R.is_constant():
        return MasonVerdict("AllConstant")
    for a, b in ((P, Q), (P, R), (Q, R)):
        if a.is_zero() and b.is_zero():
            continue
        g = gcd_poly(a, b)
        if not g.is_constant():
            return MasonVerdict("NotCoprime", g)
    return MasonVerdict("LemmaViolated")


def _const_ratio(p: MPoly, q: MPoly) -> Fraction | None:
    # rational c with p == c*q, q nonzero
    if p.is_zero():
        return Fraction(0)
    if set(p._terms) != set(q._terms):
        return None
    e = q.leading_exponent()
    c = Fraction(p._terms[e], q._terms[e])
    if all(Fraction(p._terms[x], q._terms[x]) == c for x in q._terms):
        return c
    return None


def mason_co_decompose(
    P: MPoly, Q: MPoly, R: MPoly, k: int, m: int, r: int
) -> tuple[Fraction, Fraction] | None:
    """Scalars ``(a1, a2)`` with ``P = a1 R^((m/g)(r/l))`` and ``Q = a2 R^((k/g)(r/l))``.

    Returns ``None`` when no rational scalars exist (the complex-scalar case).
    """
    _check_exponents(k, m, r)
    ell, g = lcm(k, m), gcd(k, m)
    if r % ell:
        raise PreconditionError(f"lcm(k, m) = {ell} does not divide r = {r}")
    if R.is_zero():
        raise PreconditionError("R must be nonzero")
    if not (P**k + Q**m - R**r).is_zero():
        raise PreconditionError("P^k + Q^m = R^r does not hold")
    a1 = _const_ratio(P, R ** ((m // g) * (r // ell)))
    a2 = _const_ratio(Q, R ** ((k // g) * (r // ell)))
    if a1 is None or a2 is None:
        return None
    return a1, a2


# -- serialization and parsing -----------------------------------------------------


def poly_to_json(f: MPoly) -> list:
    """JSON-ready list of ``[exponents, "coefficient"]`` pairs in descending grlex order."""
    return [[list(e), str(f._terms[e])] for e in sorted(f._terms, key=_grlex_key, reverse=True)]


def poly_from_json(data, nvars: int) -> MPoly:
    terms = {}
    for e, c in data:
        e = tuple(int(x) for x in e)
        if e in terms:
            raise ValueError(f"duplicate exponent {e}")
        terms[e] = int(str(c))
    return MPoly(nvars, terms)


def dumps_poly(f: MPoly, names: Sequence[str] | None = None) -> str:
    names = list(names) if names else default_names(f.nvars)
    return json.dumps({"vars": names, "terms": poly_to_json(f)})


def loads_poly(text: str) -> tuple[MPoly, list[str]]:
    obj = json.loads(text)
    names = list(obj["vars"])
    return poly_from_json(obj["terms"], len(names)), names


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def parse_poly(text: str, names: Sequence[str]) -> MPoly:
    """Parse an expression such as ``"64*S^6 - 432*T^4"`` over the given variables."""
    names = list(names)
    n = len(names)
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        tokens.append(mt.group(1) or mt.group(2) or mt.group(3))
        pos = mt.end()
    tokens.append(None)
    idx = 0

    def peek():
        return tokens[idx]

    def take():
        nonlocal idx
        t = tokens[idx]
        idx += 1
        return t

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        val = term() * sign
        while peek() in ("+", "-"):
            op = take()
            t = term()
            val = val + t if op == "+" else val - t
        return val

    def term():
        val = factor()
        while peek() == "*" or (peek() not in (None, "+", "-", ")", "^", "**")):
            if peek() == "*":
                take()
            val = val * factor()
        return val

    def factor():
        base = atom()
        if peek() in ("^", "**"):
            take()
            tok = take()
            if tok is None or not tok.isdigit():
                raise ValueError("exponent must be a nonnegative integer literal")
            base = base ** int(tok)
        return base

    def atom():
        tok = take()
        if tok is None:
            raise ValueError("unexpected end of polynomial")
        if tok.isdigit():
            return MPoly.const(n, int(tok))
        if tok == "(":
            val = expr()
            if take() != ")":
                raise ValueError("unbalanced parentheses")
            return val
        if tok == "-":
            return -factor()
        if tok in names:
            return MPoly.var(n, names.index(tok))
        raise ValueError(f"unknown symbol {tok!r}; variables are {names}")

    result = expr()
    if peek() is not None:
        raise ValueError(f"trailing input in polynomial: {tokens[idx:-1]}")
    return result


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = lcm(out, v)
    return out

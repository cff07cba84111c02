"""Sieving over integer boxes: k-free values, power-free parts, local
densities rho_F, Euler products, the N_p counters and Good_M densities.

Box enumeration runs over ``[-B, B]^n`` with numpy, in chunks of the first
coordinate.  Values that do not fit comfortably in int64 fall back to exact
Python integers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial

import gmpy2
import numpy as np

from .errors import BudgetExceeded, PreconditionError
from .factor import Factorization, factorize, is_prime, small_prime_table
from .multipoly import MPoly, content, perfect_power_root
from .parallel import chunk_ranges, default_chunks, ordered_map

INT64_SAFE = 1 << 62
DEFAULT_CAP = 10**8


@dataclass
class SieveReport:
    B: int
    n: int
    params: dict
    total: int
    satisfying: int
    density: Fraction
    euler_partial: float | None = None
    tail_estimate: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["density"] = str(self.density)
        d["density_float"] = float(self.density)
        if self.tail_estimate is not None:
            d["tail_estimate_label"] = "heuristic"
        return d


# -- integer predicates ----------------------------------------------------------------


def is_kfree(m: int, k: int) -> bool:
    """No ``p^k`` divides ``m``; 0 counts as k-free."""
    if k < 2:
        raise PreconditionError("k must be at least 2")
    if m == 0:
        return True
    return all(e < k for e in factorize(m).factors.values())


def pfr(m: int, N: int) -> int:
    """Smallest ``l > 0`` with ``|m| / l`` a perfect N-th power."""
    if m == 0:
        raise PreconditionError("pfr(0) is undefined")
    if N < 2:
        raise PreconditionError("N must be at least 2")
    out = 1
    for p, e in factorize(m).factors.items():
        out *= p ** (e % N)
    return out


def sqfr(m: int) -> int:
    return pfr(m, 2)


def cufr(m: int) -> int:
    return pfr(m, 3)


# -- polynomial evaluation on grids ----------------------------------------------------------


def _value_bound(F: MPoly, B: int) -> int:
    return sum(abs(c) * B ** sum(e) for e, c in F.items())


def _grid_axes(n: int, first: tuple[int, int], B: int) -> list[np.ndarray]:
    lo, hi = first
    axes = [np.arange(lo, hi + 1, dtype=np.int64)]
    axes += [np.arange(-B, B + 1, dtype=np.int64)] * (n - 1)
    return axes


def _shape(axes, i):
    s = [1] * len(axes)
    s[i] = -1
    return s


def eval_grid_int(F: MPoly, axes: list[np.ndarray]) -> np.ndarray:
    """Exact int64 values of ``F`` on the product grid (caller guarantees no overflow)."""
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    out = np.zeros(shape, dtype=np.int64)
    for e, c in F.items():
        term = np.full((1,) * n, c, dtype=np.int64)
        for i, k in enumerate(e):
            if k:
                term = term * (axes[i] ** k).reshape(_shape(axes, i))
        out += term
    return out


def eval_grid_mod(F: MPoly, axes: list[np.ndarray], q: int) -> np.ndarray:
    """Values of ``F`` modulo ``q`` (``q < 2^31``) on the product grid."""
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    out = np.zeros(shape, dtype=np.int64)
    red = [a % q for a in axes]
    for e, c in F.items():
        term = np.full((1,) * n, c % q, dtype=np.int64)
        for i, k in enumerate(e):
            if k:
                pw = np.ones_like(red[i])
                for _ in range(k):
                    pw = pw * red[i] % q
                term = term * pw.reshape(_shape(red, i)) % q
        out = (out + term) % q
    return out


def eval_grid_obj(F: MPoly, axes: list[np.ndarray]) -> np.ndarray:
    """Exact values as Python ints (object array)."""
    shape = tuple(len(a) for a in axes)
    out = np.empty(shape, dtype=object)
    for idx in itertools.product(*[range(len(a)) for a in axes]):
        out[idx] = F.eval_int([int(axes[i][j]) for i, j in enumerate(idx)])
    return out


def _sup_norm_grid(axes: list[np.ndarray]) -> np.ndarray:
    out = np.zeros(tuple(len(a) for a in axes), dtype=np.int64)
    for i, a in enumerate(axes):
        out = np.maximum(out, np.abs(a).reshape(_shape(axes, i)))
    return out


# -- local densities --------------------------------------------------------------------------


def _blocks(m: int, n: int, target: int = 1 << 20) -> list[tuple[int, int]]:
    per = max(1, target // max(1, m ** (n - 1)))
    return [(lo, min(m - 1, lo + per - 1)) for lo in range(0, m, per)]


def _mod_axes(m: int, n: int, block: tuple[int, int]) -> list[np.ndarray]:
    rng = np.arange(m, dtype=np.int64)
    return [np.arange(block[0], block[1] + 1, dtype=np.int64)] + [rng] * (n - 1)


def rho_brute(F: MPoly, m: int) -> int:
    """#{v in (Z/m)^n : F(v) = 0 mod m} by direct enumeration."""
    n = F.nvars
    if n == 0:
        return 1 if F.constant_value() % m == 0 else 0
    if m >= 1 << 31:
        raise BudgetExceeded("modulus too large for enumeration")
    count = 0
    for blk in _blocks(m, n):
        count += int(np.count_nonzero(eval_grid_mod(F, _mod_axes(m, n, blk), m) == 0))
    return count


def eval_points_mod(F: MPoly, pts: np.ndarray, q: int) -> np.ndarray:
    """Values of ``F`` mod ``q`` at the rows of an integer array of points."""
    out = np.zeros(len(pts), dtype=np.int64)
    red = pts % q
    for e, c in F.items():
        term = np.full(len(pts), c % q, dtype=np.int64)
        for i, k in enumerate(e):
            for _ in range(k):
                term = term * red[:, i] % q
        out = (out + term) % q
    return out


def _roots_mod_p(F: MPoly, p: int) -> np.ndarray:
    n = F.nvars
    out = []
    for blk in _blocks(p, n):
        axes = _mod_axes(p, n, blk)
        idx = np.argwhere(eval_grid_mod(F, axes, p) == 0)
        if len(idx):
            out.append(np.stack([axes[i][idx[:, i]] for i in range(n)], axis=1))
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(out)


def _vp_content(F: MPoly, p: int) -> int:
    c = content(F)
    if c == 0:
        return 10**9
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def _rho_pp(F: MPoly, p: int, e: int, cap: int) -> int:
    n = F.nvars
    c = _vp_content(F, p)
    if c >= e:
        return p ** (n * e)
    if c:
        return p ** (n * c) * _rho_pp(F.scale_div(p**c), p, e - c, cap)
    if p**n > cap:
        raise BudgetExceeded(f"root enumeration mod {p} exceeds the budget")
    roots = _roots_mod_p(F, p)
    if e == 1:
        return len(roots)
    nonsing = np.zeros(len(roots), dtype=bool)
    for i in range(n):
        g = F.diff(i)
        if not g.is_zero():
            nonsing |= eval_points_mod(g, roots, p) != 0
    total = int(np.count_nonzero(nonsing)) * p ** ((n - 1) * (e - 1))
    for r in roots[~nonsing]:
        r = [int(x) for x in r]
        # singular root: substitute v = r + p s
        subs = [MPoly.const(n, r[i]) + MPoly.var(n, i) * p for i in range(n)]
        H = F.compose(subs)
        c2 = _vp_content(H, p)
        if c2 >= e:
            total += p ** (n * (e - 1))
        else:
            total += p ** (n * (c2 - 1)) * _rho_pp(H.scale_div(p**c2), p, e - c2, cap)
    return total


def rho_prime_power(F: MPoly, p: int, k: int, cap: int = DEFAULT_CAP) -> int:
    """rho_F(p^k) by Hensel lifting with exact treatment of singular roots."""
    if F.is_zero():
        return p ** (F.nvars * k)
    return _rho_pp(F, p, k, cap)


def rho(F: MPoly, m: int, cap: int = DEFAULT_CAP) -> int:
    """rho_F(m) = #{v in (Z/m)^n : F(v) = 0 mod m}.

    Enumerates ``(Z/m)^n`` when ``m^n <= cap``; otherwise uses the Chinese
    remainder theorem and prime-power lifting.
    """
    if m < 2:
        raise PreconditionError("m must be at least 2")
    n = F.nvars
    if m**n <= cap:
        return rho_brute(F, m)
    out = 1
    for p, e in factorize(m).factors.items():
        out *= rho_prime_power(F, p, e, cap)
    return out


def euler_product(F: MPoly, k: int, P_max: int, cap: int = DEFAULT_CAP):
    """Partial product over p <= P_max of (1 - rho_F(p^k)/p^(nk)) and a heuristic tail.

    Returns ``(partial, tail_estimate, factors)``.  The tail is
    ``c_F * sum_{p > P_max} p^-2`` with ``c_F`` the observed maximum of
    ``rho_F(p^k) / p^(nk-2)``; it is not a rigorous bound.
    """
    n = F.nvars
    partial = 1.0
    c_F = 0.0
    factors = {}
    for p in small_prime_table(P_max):
        r = rho_prime_power(F, p, k, cap)
        f = 1.0 - r / float(p) ** (n * k)
        factors[p] = f
        partial *= f
        c_F = max(c_F, r / float(p) ** (n * k - 2))
    return partial, c_F * _prime_inv_square_tail(P_max), factors


def _prime_inv_square_tail(P: int) -> float:
    # sum over primes p > P of p^-2, approximated by int_P^inf dt / (t^2 log t)
    # plus an explicit sum up to 10^5 where that is cheap
    s = 0.0
    hi = max(P, 10**5)
    for p in small_prime_table(hi):
        if p > P:
            s += 1.0 / (p * p)
    return s + 1.0 / (hi * math.log(hi))


# -- box counters ---------------------------------------------------------------------------


def _check_budget(B: int, n: int, cap: int) -> None:
    if (2 * B + 1) ** n > cap:
        raise BudgetExceeded(f"(2B+1)^n = {(2 * B + 1) ** n} exceeds the cap {cap}")


def count_Np(F: MPoly, B: int, p: int, cap: int = 10**9) -> int:
    """#{v in [-B, B]^n : F(v) = 0 mod p}."""
    return _count_mod(F, B, p, cap)


def count_Np2(F: MPoly, B: int, p: int, cap: int = 10**9) -> int:
    """#{v in [-B, B]^n : F(v) = 0 mod p^2}."""
    return _count_mod(F, B, p * p, cap)


def _count_mod(F, B, q, cap):
    n = F.nvars
    _check_budget(B, n, cap)
    total = 0
    for ch in chunk_ranges(-B, B, default_chunks(1, 2 * B + 1)):
        axes = _grid_axes(n, ch, B)
        total += int(np.count_nonzero(eval_grid_mod(F, axes, q) == 0))
    return total


def _kfree_chunk(args) -> tuple[int, int]:
    F, B, k, ch = args
    n = F.nvars
    axes = _grid_axes(n, ch, B)
    bound = _value_bound(F, B)
    if bound < INT64_SAFE:
        vals = np.abs(eval_grid_int(F, axes))
        zeros = int(np.count_nonzero(vals == 0))
        bad = np.zeros(vals.shape, dtype=bool)
        vmax = int(vals.max()) if vals.size else 0
        for p in small_prime_table(max(2, int(round(vmax ** (1.0 / k))) + 1)):
            pk = p**k
            if pk > vmax:
                break
            bad |= (vals % pk == 0) & (vals != 0)
        return int(np.count_nonzero(~bad)), zeros
    vals = eval_grid_obj(F, axes)
    good = zeros = 0
    for v in vals.flat:
        if v == 0:
            zeros += 1
            good += 1
        elif is_kfree(v, k):
            good += 1
    return good, zeros


def count_kfree_values(F: MPoly, B: int, k: int, P_max: int | None = None,
                       workers: int = 1, cap: int = 10**9) -> SieveReport:
    """Exact count of v in [-B, B]^n with F(v) k-free, with the Euler-product prediction."""
    if k < 2:
        raise PreconditionError("k must be at least 2")
    n = F.nvars
    _check_budget(B, n, cap)
    chunks = chunk_ranges(-B, B, default_chunks(workers, 2 * B + 1))
    parts = ordered_map(_kfree_chunk, [(F, B, k, ch) for ch in chunks], workers)
    good = sum(g for g, _ in parts)
    zeros = sum(z for _, z in parts)
    total = (2 * B + 1) ** n
    rep = SieveReport(B, n, {"k": k, "P_max": P_max}, total, good, Fraction(good, total),
                      extra={"zero_values": zeros})
    if P_max:
        partial, tail, _ = euler_product(F, k, P_max)
        rep.euler_partial = partial
        rep.tail_estimate = tail
        rep.extra["predicted_count"] = partial * (2 * B) ** n
    return rep


# -- Good_M densities -------------------------------------------------------------------------


def _nth_power_residues(q: int, N: int) -> np.ndarray:
    table = np.zeros(q, dtype=bool)
    table[[pow(x, N, q) for x in range(q)]] = True
    return table


def _filter_primes(N: int, count: int = 24) -> list[int]:
    # primes q = 1 mod N make the N-th power residues a proper subgroup
    out = []
    q = N + 1
    while len(out) < count:
        if q < 1 << 15 and is_prime(q):
            out.append(q)
        q += N
    return out


def _good_chunk(args):
    F, B, M, N, ch = args
    n = F.nvars
    axes = _grid_axes(n, ch, B)
    norms = _sup_norm_grid(axes)
    # zmax(v) = floor(||v||^(1/M)): the largest admissible power-free part of a bad value
    zmax = np.floor(np.power(norms.astype(np.float64), 1.0 / M) + 1e-12).astype(np.int64)
    Zcap = int(zmax.max()) if zmax.size else 1
    zeros_mask = np.zeros(norms.shape, dtype=bool)
    cand = np.ones(norms.shape, dtype=bool)
    # F(v) = 0 needs exact detection: it is 0 mod every filter prime
    qs = _filter_primes(N)
    all_zero = np.ones(norms.shape, dtype=bool)
    per_z = {z: np.ones(norms.shape, dtype=bool) for z in range(1, Zcap + 1)}
    for q in qs:
        res = _nth_power_residues(q, N)
        vals = eval_grid_mod(F, axes, q)
        all_zero &= vals == 0
        for z in range(1, Zcap + 1):
            if z % q == 0:
                continue
            zinv = pow(z, -1, q)
            t = vals * zinv % q
            ok = res[t] | res[(-t) % q]
            per_z[z] &= ok
    survivors = np.zeros(norms.shape, dtype=bool)
    for z in range(1, Zcap + 1):
        survivors |= per_z[z] & (zmax >= z)
    survivors |= all_zero
    bad = zeros = 0
    for idx in np.argwhere(survivors):
        nu = [int(axes[i][j]) for i, j in enumerate(idx)]
        v = abs(F.eval_int(nu))
        if v == 0:
            zeros += 1
            continue
        zm = int(zmax[tuple(idx)])
        for z in range(1, zm + 1):
            if v % z == 0 and gmpy2.iroot(v // z, N)[1]:
                bad += 1
                break
    total = int(norms.size)
    return total, zeros, bad


def check_good_preconditions(F: MPoly, M: float, N: int) -> str:
    """Raise unless F is primitive and not a p-th power for the primes p | N; M > 2.

    Over Q a non-power with trivial content is also a non-power over C up to
    a constant, and primitivity pins that constant down, so the rational test
    suffices.
    """
    if M <= 2:
        raise PreconditionError("M must exceed 2")
    if N < 2:
        raise PreconditionError("N must be at least 2")
    if F.is_zero() or content(F) != 1:
        raise PreconditionError("F must be primitive")
    for p in factorize(N).factors:
        if perfect_power_root(F, p) is not None or perfect_power_root(-F, p) is not None:
            raise PreconditionError(f"F is a perfect {p}-th power")
    return "primitive, not a p-th power over Q for p | N; content 1 rules out complex powers"


def good_density(F: MPoly, B: int, M: float, N: int, workers: int = 1,
                 cap: int = 10**9) -> SieveReport:
    """Count v in [-B, B]^n with Pfr_N(F(v))^M > ||v||; F(v) = 0 is tallied apart."""
    note = check_good_preconditions(F, M, N)
    n = F.nvars
    _check_budget(B, n, cap)
    chunks = chunk_ranges(-B, B, default_chunks(workers, 2 * B + 1))
    parts = ordered_map(_good_chunk, [(F, B, M, N, ch) for ch in chunks], workers)
    total = sum(p[0] for p in parts)
    zeros = sum(p[1] for p in parts)
    bad = sum(p[2] for p in parts)
    considered = total - zeros
    good = considered - bad
    return SieveReport(B, n, {"M": M, "N": N}, considered, good,
                       Fraction(good, considered) if considered else Fraction(0),
                       extra={"zero_values": zeros, "complement": bad, "box_size": total,
                              "precondition_note": note})


def fit_exponent(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    sxx = sum((a - mx) ** 2 for a in lx)
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sxx


# -- inverse-log sum --------------------------------------------------------------------


@dataclass(frozen=True)
class InvLogReport:
    B: int
    n: int
    total: float
    ratio: float


def sum_invlog(B: int, n: int) -> InvLogReport:
    """Sum of 1/log||v|| over v in Z^n with 1 < ||v|| <= B, and its ratio to B^n."""
    if n < 1:
        raise PreconditionError("n must be positive")
    if B <= 1:
        return InvLogReport(B, n, 0.0, 0.0)
    total = math.fsum(((2 * r + 1) ** n - (2 * r - 1) ** n) / math.log(r) for r in range(2, B + 1))
    return InvLogReport(B, n, total, total / B**n)


__all__ = [
    "Factorization",
    "factorize",
    "SieveReport",
    "is_kfree",
    "pfr",
    "sqfr",
    "cufr",
    "rho",
    "rho_brute",
    "rho_prime_power",
    "euler_product",
    "count_Np",
    "count_Np2",
    "count_kfree_values",
    "good_density",
    "check_good_preconditions",
    "fit_exponent",
    "sum_invlog",
    "InvLogReport",
]

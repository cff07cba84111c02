"""Height-quotient averages over Z^n_B and Q^n_B, line scans, the upper-bound
check and the lower-bound diagnostic.

Every experiment enumerates parameters in a fixed order, splits the work into
chunks of the outermost coordinate and merges the per-chunk results in chunk
order, so the output does not depend on the number of workers.
"""
from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd, lcm, log
from typing import Iterator, Sequence

from .ecq import INFINITY, QPoint, height_and_torsion, up_bound_constants, minimal_discriminant
from .errors import PreconditionError
from .family import CurveFamily, FamilyPoint, SpecCurve, twelfth_power_decomposition
from .multipoly import MPoly, parse_poly
from .parallel import chunk_ranges, ordered_map
from .sieve import is_kfree, pfr

N_CHUNKS = 64


# -- enumeration ------------------------------------------------------------------------


def _sup(v: Sequence[int]) -> int:
    return max((abs(x) for x in v), default=0)


def _box(n: int, B: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for v in range(-B, B + 1):
        for rest in _box(n - 1, B):
            yield (v,) + rest


def _gcd_all(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def _zn_chunk(n: int, B: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    for v1 in range(lo, hi + 1):
        for rest in _box(n - 1, B):
            nu = (v1,) + rest
            if 1 < _sup(nu) <= B:
                yield nu


def _qn_chunk(n: int, B: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    for v0 in range(lo, hi + 1):
        for rest in _box(n, B):
            nu = (v0,) + rest
            H = max(v0, _sup(rest))
            if 1 < H <= B and _gcd_all(nu) == 1:
                yield nu


def _classify(fam: CurveFamily, P: FamilyPoint, nu_h: tuple[int, ...]):
    """Specialize at homogeneous coordinates ``nu_h = (l, l*omega)``.

    Returns ``("singular",)``, ``("undefined",)`` or ``("ok", A, B, point)``
    with the point on the integral model.
    """
    hA, hB, hD = fam.homogeneous_forms()
    if hD.eval_int(nu_h) == 0:
        return ("singular",)
    xn, xd = P.x.eval_homogeneous(nu_h)
    yn, yd = P.y.eval_homogeneous(nu_h)
    if xd == 0 or yd == 0:
        # a genuine pole specializes to the point at infinity; 0/0 is undefined
        if xd == 0 and xn != 0:
            return ("ok", hA.eval_int(nu_h), hB.eval_int(nu_h), INFINITY)
        return ("undefined",)
    s = nu_h[0] ** fam.d
    q = QPoint(Fraction(xn * s * s, xd), Fraction(yn * s**3, yd))
    return ("ok", hA.eval_int(nu_h), hB.eval_int(nu_h), q)


def enumerate_Zn(B: int, fam: CurveFamily, P: FamilyPoint) -> Iterator[tuple[int, ...]]:
    """nu in Z^n with 1 < ||nu|| <= B, disc(nu) != 0 and P_nu defined, in lexicographic order."""
    if B < 2:
        raise PreconditionError("B must be at least 2")
    for nu in _zn_chunk(fam.nvars, B, -B, B):
        if _classify(fam, P, (1,) + nu)[0] == "ok":
            yield nu


def enumerate_Qn(B: int, fam: CurveFamily, P: FamilyPoint) -> Iterator[tuple[tuple[Fraction, ...], int]]:
    """(omega, H(omega)) for omega in Q^n with 1 < H <= B, disc(omega) != 0 and P_omega defined."""
    if B < 2:
        raise PreconditionError("B must be at least 2")
    for nu in _qn_chunk(fam.nvars, B, 1, B):
        if _classify(fam, P, nu)[0] == "ok":
            yield tuple(Fraction(v, nu[0]) for v in nu[1:]), max(nu[0], _sup(nu[1:]))


def coprime_vectors(n: int, B: int) -> Iterator[tuple[int, ...]]:
    """Coprime (nu0 > 0, nu1..nun) with 1 < max|nu_i| <= B."""
    return _qn_chunk(n, B, 1, B)


def omega_of(nu: Sequence[int]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v, nu[0]) for v in nu[1:])


# -- records and reports ------------------------------------------------------------------------


@dataclass(frozen=True)
class Record:
    nu: tuple[int, ...]  # homogeneous (l, l*omega)
    H: int
    h: float
    hhat: float
    error_bound: float
    ratio: float
    torsion: int | None
    disc: Fraction

    def omega_str(self) -> str:
        return ";".join(str(w) for w in omega_of(self.nu))


RECORD_COLUMNS = ["omega", "H", "h", "hhat", "error_bound", "ratio", "torsion_order", "disc"]


def record_row(r: Record) -> list[str]:
    return [
        r.omega_str(),
        str(r.H),
        repr(r.h),
        repr(r.hhat),
        repr(r.error_bound),
        repr(r.ratio),
        "" if r.torsion is None else str(r.torsion),
        str(r.disc),
    ]


@dataclass
class AverageReport:
    domain: str
    B: int
    enumerated: int
    singular_skipped: int
    undefined_skipped: int
    torsion: int
    sum_ratio: float
    mean: float
    count_mean: float
    normalizer: int
    certified_lower_bound: float | None = None
    params: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    records: list = field(default_factory=list, repr=False)

    @property
    def skipped(self) -> int:
        return self.singular_skipped + self.undefined_skipped

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("records")
        return d


def _height_task(task):
    fam, P, domain, B, lo, hi, tol, keep = task
    n = fam.nvars
    out = []
    sing = undef = 0
    it = _qn_chunk(n, B, lo, hi) if domain == "Q" else _zn_chunk(n, B, lo, hi)
    for nu in it:
        nu_h = nu if domain == "Q" else (1,) + nu
        c = _classify(fam, P, nu_h)
        if c[0] == "singular":
            sing += 1
            continue
        if c[0] == "undefined":
            undef += 1
            continue
        _, A, Bc, q = c
        H = max(nu_h[0], _sup(nu_h[1:])) if domain == "Q" else _sup(nu)
        h = log(H)
        hv, tor = height_and_torsion(A, Bc, q, tol)
        ratio = hv.value / h
        disc = Fraction(fam.homogeneous_forms()[2].eval_int(nu_h), nu_h[0] ** (12 * fam.d)) if keep else Fraction(0)
        out.append(Record(tuple(nu_h), H, h, hv.value, hv.error_bound, ratio, tor, disc))
    return out, sing, undef


def _run_heights(fam, P, domain, B, tol, workers, keep=True):
    if domain not in ("Z", "Q"):
        raise PreconditionError("domain must be 'Z' or 'Q'")
    if B < 2:
        raise PreconditionError("B must be at least 2")
    lo = 1 if domain == "Q" else -B
    chunks = chunk_ranges(lo, B, N_CHUNKS)
    tasks = [(fam, P, domain, B, a, b, tol, keep) for a, b in chunks]
    parts = ordered_map(_height_task, tasks, workers)
    records = [r for part, _, _ in parts for r in part]
    sing = sum(s for _, s, _ in parts)
    undef = sum(u for _, _, u in parts)
    return records, sing, undef


def average_quotient(fam: CurveFamily, P: FamilyPoint, domain: str, B: int, tol: float = 1e-9,
                     workers: int = 1, keep_records: bool = False) -> AverageReport:
    """Average of h^(P_w)/h(w).

    The Z^n mean divides by (2B)^n and the Q^n mean by the number of
    parameters used; ``count_mean`` always divides by the number used.
    """
    records, sing, undef = _run_heights(fam, P, domain, B, tol, workers, keep_records)
    used = len(records)
    s = math.fsum(r.ratio for r in records)
    normalizer = (2 * B) ** fam.nvars if domain == "Z" else used
    rep = AverageReport(
        domain=domain + "^n",
        B=B,
        enumerated=used + sing + undef,
        singular_skipped=sing,
        undefined_skipped=undef,
        torsion=sum(1 for r in records if r.torsion is not None),
        sum_ratio=s,
        mean=s / normalizer if normalizer else 0.0,
        count_mean=s / used if used else 0.0,
        normalizer=normalizer,
        params={"tol": tol},
    )
    if fam.split_status != "NonSplit":
        rep.warnings.append("family is PossiblySplit")
    if keep_records:
        rep.records = records
    return rep


# -- line scans -------------------------------------------------------------------------------


@dataclass
class LineScan:
    parameterization: str
    samples: list  # (t, h, hhat, ratio)
    slope: float
    intercept: float
    max_residual: float
    residuals: list
    torsion_count: int
    skipped: int

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("samples")
        d.pop("residuals")
        d["n_samples"] = len(self.samples)
        return d


def parse_line(line: str, names: Sequence[str]) -> list[MPoly]:
    """Affine map t -> omega(t) from constraints like ``"S=T"`` or ``"T=1"``.

    Variables not on a left-hand side are free; exactly one free variable is
    allowed and it becomes ``t``.  Right-hand sides may use ``t`` directly.
    """
    names = list(names)
    ext = names + ["t"]
    eqs = {}
    for part in re.split(r"[,;]", line):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise PreconditionError(f"constraint {part!r} lacks '='")
        lhs, rhs = (s.strip() for s in part.split("=", 1))
        if lhs not in names:
            raise PreconditionError(f"unknown variable {lhs!r}")
        eqs[lhs] = parse_poly(rhs, ext)
    free = [v for v in names if v not in eqs]
    uses_t = any(e.degree_in(len(names)) > 0 for e in eqs.values())
    if len(free) > 1 or (len(free) == 1 and uses_t):
        raise PreconditionError(f"line must leave exactly one parameter free, got {free}")
    if not free and not uses_t:
        raise PreconditionError("line has no free parameter")
    n = len(names)
    t = MPoly.var(n + 1, n)
    subs = [eqs.get(v, t) for v in names] + [t]
    exprs = list(subs)
    for _ in range(n):
        exprs = [e.compose(subs) for e in exprs]
    out = []
    for e in exprs[:n]:
        if e.variables() - {n}:
            raise PreconditionError("cyclic line constraints")
        if e.total_degree() > 1:
            raise PreconditionError("line parameterization must be affine")
        out.append(MPoly(1, {(ex[n],): c for ex, c in e.items()}))
    return out


def _least_squares(xs, ys):
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx if sxx else 0.0
    return slope, my - slope * mx


def line_scan(fam: CurveFamily, P: FamilyPoint, line: str, t_range: tuple[int, int],
              tol: float = 1e-9) -> LineScan:
    """Regress h^(P_w(t)) on h(w(t)) for integer t in ``t_range`` (inclusive)."""
    param = parse_line(line, fam.names)
    samples = []
    skipped = tors = 0
    for t in range(t_range[0], t_range[1] + 1):
        omega = [p.evaluate([t]) for p in param]
        ell = 1
        for w in omega:
            ell = lcm(ell, w.denominator)
        nu_h = (ell,) + tuple(int(w * ell) for w in omega)
        g = _gcd_all(nu_h)
        H = max(abs(x) for x in nu_h) // g
        if H <= 1:
            skipped += 1
            continue
        c = _classify(fam, P, nu_h)
        if c[0] != "ok":
            skipped += 1
            continue
        _, A, Bc, q = c
        hv, tor = height_and_torsion(A, Bc, q, tol)
        tors += tor is not None
        h = log(H)
        samples.append((t, h, hv.value, hv.value / h))
    if not samples:
        raise PreconditionError("line scan produced no samples")
    xs = [s[1] for s in samples]
    ys = [s[2] for s in samples]
    slope, intercept = _least_squares(xs, ys)
    resid = [abs(y - slope * x) for x, y in zip(xs, ys)]
    return LineScan(line, samples, slope, intercept, max(resid), resid, tors, skipped)


# -- upper bound -----------------------------------------------------------------------------


@dataclass
class UpReport:
    B: int
    domain: str
    checked: int
    violations: list
    max_excess: float
    argmax_omega: str
    U_P: float
    constants: dict


def verify_upper_bound(fam: CurveFamily, P: FamilyPoint, B: int, tol: float = 1e-9,
                       domain: str = "Q", workers: int = 1) -> UpReport:
    """Check h^(P_w) <= U_P (1 + h(w)) over every enumerated parameter."""
    const = up_bound_constants(fam, P)
    records, _, _ = _run_heights(fam, P, domain, B, tol, workers, keep=False)
    worst, arg = -math.inf, ""
    viol = []
    for r in records:
        excess = r.hhat + r.error_bound - const.U_P * (1 + r.h)
        if excess > worst:
            worst, arg = excess, r.omega_str()
        if excess > tol:
            viol.append((r.omega_str(), r.hhat, const.U_P * (1 + r.h)))
    return UpReport(B, domain + "^n", len(records), viol, worst, arg, const.U_P, asdict(const))


# -- lower-bound diagnostic ---------------------------------------------------------------------


def lcm_upto(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out = lcm(out, i)
    return out


def _lower_task(task):
    fam, P, B, lo, hi, tol, k, M, N, F = task
    out = []
    sing = undef = 0
    for nu in _zn_chunk(fam.nvars, B, lo, hi):
        nu_h = (1,) + nu
        c = _classify(fam, P, nu_h)
        if c[0] == "singular":
            sing += 1
            continue
        if c[0] == "undefined":
            undef += 1
            continue
        _, A, Bc, q = c
        H = _sup(nu)
        h = log(H)
        hv, tor = height_and_torsion(A, Bc, q, tol)
        disc = fam.disc.eval_int(list(nu))
        kfree = is_kfree(disc, k)
        Fv = F.eval_int(list(nu))
        good = Fv != 0 and pfr(Fv, N) ** M > H
        E = SpecCurve(tuple(Fraction(v) for v in nu), Fraction(A), Fraction(Bc), 1, A, Bc, disc, fam.d)
        dmin = minimal_discriminant(E) if (kfree and tor is None and good) else None
        out.append((nu, h, hv.value, tor, kfree, good, dmin))
    return out, sing, undef


def lower_bound_diagnostic(fam: CurveFamily, P: FamilyPoint, B: int, k: int, M: float,
                           C1: float = 1.0, tol: float = 1e-9, workers: int = 1,
                           allow_split: bool = False) -> AverageReport:
    """Density of the nice set (disc k-free, P_v non-torsion, v in Good_M) and the
    bounds it certifies conditionally on the constant ``C1``.
    """
    if k < 4:
        raise PreconditionError("k must be at least 4")
    if M <= 2:
        raise PreconditionError("M must exceed 2")
    dec = twelfth_power_decomposition(fam)
    N = 3 if dec.a in (4, 8) else 2
    Nk = lcm_upto(k)
    chunks = chunk_ranges(-B, B, N_CHUNKS)
    tasks = [(fam, P, B, a, b, tol, k, M, N, dec.F) for a, b in chunks]
    parts = ordered_map(_lower_task, tasks, workers)
    rows = [r for part, _, _ in parts for r in part]
    sing = sum(p[1] for p in parts)
    undef = sum(p[2] for p in parts)
    nice = [r for r in rows if r[4] and r[3] is None and r[5]]
    ratios = [r[2] / r[1] for r in rows]
    s = math.fsum(ratios)
    norm = (2 * B) ** fam.nvars
    density = len(nice) / norm
    per_nu = [C1 / Nk**2 * log(abs(r[6])) / r[1] for r in nice]
    admissible = [r[2] * Nk**2 / log(abs(r[6])) for r in nice if abs(r[6]) > 1]
    rep = AverageReport(
        domain="Z^n",
        B=B,
        enumerated=len(rows) + sing + undef,
        singular_skipped=sing,
        undefined_skipped=undef,
        torsion=sum(1 for r in rows if r[3] is not None),
        sum_ratio=s,
        mean=s / norm,
        count_mean=s / len(rows) if rows else 0.0,
        normalizer=norm,
        params={
            "k": k,
            "M": M,
            "C1": C1,
            "N_k": Nk,
            "power_free_index": N,
            "a": dec.a,
            "nice_count": len(nice),
            "nice_density": density,
            "kfree_count": sum(1 for r in rows if r[4]),
            "good_count": sum(1 for r in rows if r[5]),
            "min_per_nu_bound": min(per_nu) if per_nu else None,
            "max_admissible_C1": min(admissible) if admissible else None,
            "label": "conditional on C1",
        },
    )
    if fam.split_status != "NonSplit" and not allow_split:
        rep.warnings.append("family is PossiblySplit: certified bound withheld")
    else:
        rep.certified_lower_bound = density * C1 / (Nk**2 * M)
    return rep


__all__ = [
    "enumerate_Zn",
    "enumerate_Qn",
    "coprime_vectors",
    "omega_of",
    "Record",
    "RECORD_COLUMNS",
    "record_row",
    "AverageReport",
    "average_quotient",
    "LineScan",
    "parse_line",
    "line_scan",
    "UpReport",
    "verify_upper_bound",
    "lcm_upto",
    "lower_bound_diagnostic",
]

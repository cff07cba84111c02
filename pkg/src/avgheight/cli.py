"""Command-line front end.

Every subcommand writes a sorted JSON summary (stdout unless ``--output``)
and, where there is one, a per-record CSV stream (``--csv``).  Outputs carry
no timestamps, so identical arguments give byte-identical files.

Exit codes: 0 ok, 2 usage, 3 precondition, 4 budget, 5 internal.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import average, ecq, family, multipoly, sieve
from .errors import BudgetExceeded, NVarsMismatch, PreconditionError

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


# -- argument helpers ---------------------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _rationals(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _int_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"expected a range like 2..2000, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc


def _names(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _poly(text: str, names: list[str]) -> multipoly.MPoly:
    try:
        return multipoly.parse_poly(text, names)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"cannot parse polynomial {text!r}: {exc}") from exc


def _load_family(path: str) -> family.CurveFamily:
    if path == "running":
        return family.running_family()[0]
    try:
        return family.family_from_json(Path(path).read_text())
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read family file {path!r}: {exc}") from exc


def _load_point(path: str | None, fam: family.CurveFamily) -> family.FamilyPoint:
    if path is None:
        raise UsageError("--point is required")
    if path == "running":
        return family.running_family()[1]
    try:
        return family.point_from_json(Path(path).read_text(), fam)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read point file {path!r}: {exc}") from exc


def _curve(args) -> family.SpecCurve:
    if args.a4 is not None or args.a6 is not None:
        if args.a4 is None or args.a6 is None:
            raise UsageError("give both --a4 and --a6")
        return family.SpecCurve.from_coefficients(_rational(args.a4), _rational(args.a6))
    if args.family is None or args.omega is None:
        raise UsageError("give --a4/--a6 or --family with --omega")
    return family.specialize_curve(_load_family(args.family), _rationals(args.omega))


def _point(args, E: family.SpecCurve) -> ecq.QPoint:
    if args.x is not None:
        if args.y is None:
            raise UsageError("give both --x and --y")
        return ecq.qpoint(_rational(args.x), _rational(args.y))
    if args.family is None or args.point is None:
        raise UsageError("give --x/--y or --family, --point and --omega")
    fam = _load_family(args.family)
    q = family.specialize_point(_load_point(args.point, fam), fam, E.omega)
    if q is None:
        raise PreconditionError("the family point is undefined at this parameter")
    return q


def _curve_dict(E: family.SpecCurve) -> dict:
    return {
        "omega": [str(w) for w in E.omega],
        "a4": str(E.a4),
        "a6": str(E.a6),
        "ell": E.ell,
        "A_int": E.A_int,
        "B_int": E.B_int,
        "disc_int": E.disc_int,
    }


def _point_dict(q: ecq.QPoint) -> dict:
    if q.is_infinity:
        return {"infinity": True}
    return {"x": str(q.x), "y": str(q.y)}


# -- subcommands ------------------------------------------------------------------------------


def cmd_family_check(args):
    fam = _load_family(args.family)
    dec = family.twelfth_power_decomposition(fam)
    return {
        "vars": list(fam.names),
        "A": fam.A.to_str(fam.names),
        "B": fam.B.to_str(fam.names),
        "disc": fam.disc.to_str(fam.names),
        "d": fam.d,
        "d_AB": fam.d_AB,
        "normalized": fam.normalized,
        "split_status": fam.split_status,
        "f_E": family.f_E(fam).to_str(["T0"] + list(fam.names)),
        "decomp12": {"alpha": dec.alpha, "F": dec.F.to_str(fam.names), "e": dec.e, "a": dec.a, "b": dec.b},
    }, None


def cmd_specialize(args):
    fam = _load_family(args.family)
    E = family.specialize_curve(fam, _rationals(args.omega))
    out = {"curve": _curve_dict(E)}
    if args.point:
        q = family.specialize_point(_load_point(args.point, fam), fam, E.omega)
        out["point"] = None if q is None else _point_dict(q)
    return out, None


def cmd_height(args):
    out = {}
    if args.omega is not None:
        w = _rationals(args.omega)
        H = multipoly.lcm_all(x.denominator for x in w)
        H = max([H] + [abs(x.numerator) * (H // x.denominator) for x in w])
        out["omega"] = [str(x) for x in w]
        out["H"] = H
        out["h"] = math.log(H) if H > 0 else 0.0
    if args.x is not None:
        x = _rational(args.x)
        out["x"] = str(x)
        out["h_x"] = ecq.naive_x_height(ecq.QPoint(x, Fraction(0)))
    if not out:
        raise UsageError("give --omega and/or --x")
    return out, None


def cmd_canheight(args):
    E = _curve(args)
    q = _point(args, E)
    hv = ecq.canonical_height(E, q, args.tol, args.normalization, args.budget_ms)
    return {
        "curve": _curve_dict(E),
        "point": _point_dict(q),
        "normalization": args.normalization,
        "hhat": hv.value,
        "error_bound": hv.error_bound,
    }, None


def cmd_mindisc(args):
    E = _curve(args)
    return {"curve": _curve_dict(E), "minimal_discriminant": ecq.minimal_discriminant(E, args.budget_ms)}, None


def cmd_torsion(args):
    E = _curve(args)
    q = _point(args, E)
    return {"curve": _curve_dict(E), "point": _point_dict(q), "torsion_order": ecq.torsion_test(E, q)}, None


def _records_csv(records):
    rows = [average.RECORD_COLUMNS] + [average.record_row(r) for r in records]
    return rows


def cmd_average(args):
    fam = _load_family(args.family)
    P = _load_point(args.point, fam)
    rep = average.average_quotient(fam, P, args.domain, args.B, args.tol, args.threads,
                                   keep_records=args.csv is not None)
    rows = _records_csv(rep.records) if args.csv else None
    return rep.summary(), rows


def cmd_line_scan(args):
    fam = _load_family(args.family)
    P = _load_point(args.point, fam)
    ls = average.line_scan(fam, P, args.line, _int_range(args.t), args.tol)
    rows = None
    if args.csv:
        rows = [["t", "h", "hhat", "ratio", "residual"]]
        rows += [[str(t), repr(h), repr(hh), repr(r), repr(res)]
                 for (t, h, hh, r), res in zip(ls.samples, ls.residuals)]
    return ls.summary(), rows


def cmd_verify_up(args):
    fam = _load_family(args.family)
    P = _load_point(args.point, fam)
    rep = average.verify_upper_bound(fam, P, args.B, args.tol, args.domain, args.threads)
    out = {
        "B": rep.B,
        "domain": rep.domain,
        "checked": rep.checked,
        "violations": [list(v) for v in rep.violations],
        "max_excess": rep.max_excess,
        "argmax_omega": rep.argmax_omega,
        "U_P": rep.U_P,
        "constants": rep.constants,
    }
    return out, None


def cmd_lower_diag(args):
    fam = _load_family(args.family)
    P = _load_point(args.point, fam)
    rep = average.lower_bound_diagnostic(fam, P, args.B, args.k, args.M, args.C1, args.tol, args.threads)
    return rep.summary(), None


def _sieve_poly(args):
    names = _names(args.vars)
    return _poly(args.poly, names)


def cmd_sieve_kfree(args):
    F = _sieve_poly(args)
    rep = sieve.count_kfree_values(F, args.B, args.k, args.pmax, args.threads)
    return rep.to_dict(), None


def cmd_sieve_euler(args):
    F = _sieve_poly(args)
    partial, tail, factors = sieve.euler_product(F, args.k, args.pmax)
    return {"k": args.k, "P_max": args.pmax, "partial": partial, "tail_estimate": tail,
            "tail_estimate_label": "heuristic",
            "local_factors": {str(p): v for p, v in sorted(factors.items())}}, None


def cmd_sieve_good(args):
    F = _sieve_poly(args)
    return sieve.good_density(F, args.B, args.M, args.N, args.threads).to_dict(), None


def cmd_rho(args):
    F = _sieve_poly(args)
    return {"m": args.m, "rho": sieve.rho(F, args.m)}, None


def cmd_mason(args):
    names = _names(args.vars)
    P, Q, R = (_poly(t, names) for t in (args.P, args.Q, args.R))
    v = multipoly.verify_mason_instance(P, Q, R, args.k, args.m, args.r)
    out = {"verdict": v.tag, "witness": None if v.witness is None else v.witness.to_str(names)}
    if args.decompose:
        sc = multipoly.mason_co_decompose(P, Q, R, args.k, args.m, args.r)
        out["scalars"] = None if sc is None else [str(sc[0]), str(sc[1])]
    return out, None


def cmd_decomp12(args):
    fam = _load_family(args.family)
    dec = family.twelfth_power_decomposition(fam)
    return {"alpha": dec.alpha, "F": dec.F.to_str(fam.names), "e": dec.e, "a": dec.a, "b": dec.b,
            "normalized": fam.normalized}, None


def cmd_sum_invlog(args):
    rep = sieve.sum_invlog(args.B, args.n)
    return {"B": rep.B, "n": rep.n, "sum": rep.total, "ratio": rep.ratio}, None


# -- parser -----------------------------------------------------------------------------------


def _global_options() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--threads", type=int, default=1, help="worker processes (results do not depend on it)")
    g.add_argument("--tol", type=float, default=1e-9, help="absolute tolerance for canonical heights")
    g.add_argument("--budget-ms", type=int, default=60000, help="factorization time budget in milliseconds")
    g.add_argument("--config", help="file of key=value lines; command-line flags override it")
    g.add_argument("--output", help="write the JSON summary here instead of stdout")
    g.add_argument("--csv", help="write the per-record CSV stream here, where the command has one")
    g.add_argument("--seed", type=int, default=0, help="recorded in the output; all commands are deterministic")
    return g


def _add_curve_args(p):
    p.add_argument("--a4", help="coefficient of x in y^2 = x^3 + a4 x + a6")
    p.add_argument("--a6", help="constant coefficient")
    p.add_argument("--family", help="family JSON file (or 'running')")
    p.add_argument("--omega", help="comma-separated rational parameter vector")


def _add_point_args(p):
    p.add_argument("--x", help="x-coordinate (rational)")
    p.add_argument("--y", help="y-coordinate (rational)")
    p.add_argument("--point", help="family point JSON file (or 'running')")


def _add_fam_point(p):
    p.add_argument("--family", required=True, help="family JSON file (or 'running')")
    p.add_argument("--point", required=True, help="family point JSON file (or 'running')")


def _add_sieve_poly(p):
    p.add_argument("--poly", required=True, help="integer polynomial, e.g. '4*S^6 - 27*T^4'")
    p.add_argument("--vars", required=True, help="comma-separated variable names, e.g. S,T")


def build_parser() -> argparse.ArgumentParser:
    g = _global_options()
    parser = argparse.ArgumentParser(
        prog="avgheight",
        description="Canonical heights in families of elliptic curves over Q(T1..Tn).",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[g], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("family-check", cmd_family_check,
            "Discriminant, degrees d and d_AB, normalization and split status of a family "
            "Y^2 = X^3 + A X + B, with its homogenized squarefree discriminant f_E.")
    p.add_argument("--family", required=True, help="family JSON file (or 'running')")

    p = add("specialize", cmd_specialize,
            "Specialize the family (and optionally a family point) at a rational parameter omega; "
            "prints the rational model and its integral model.")
    p.add_argument("--family", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--point")

    p = add("height", cmd_height,
            "Naive heights: H(omega) and h(omega) = log H(omega) of a parameter vector, "
            "and/or the naive x-height h_x of a rational x-coordinate.")
    p.add_argument("--omega")
    p.add_argument("--x")

    p = add("canheight", cmd_canheight,
            "Canonical height of a rational point, as a sum of local heights with a rigorous "
            "archimedean error bound.  'nt' gives the Neron-Tate value, 'x' twice it.")
    _add_curve_args(p)
    _add_point_args(p)
    p.add_argument("--normalization", choices=["nt", "x"], default="nt")

    p = add("mindisc", cmd_mindisc, "Minimal discriminant of a curve over Q, sign preserved.")
    _add_curve_args(p)

    p = add("torsion", cmd_torsion, "Order of a rational point if it is torsion (Nagell-Lutz and Mazur).")
    _add_curve_args(p)
    _add_point_args(p)

    p = add("average", cmd_average,
            "Average of the quotient h^(P_omega)/h(omega) over Z^n_B (normalized by (2B)^n) "
            "or Q^n_B (normalized by the number of parameters used).")
    _add_fam_point(p)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--domain", choices=["Z", "Q"], default="Q")

    p = add("line-scan", cmd_line_scan,
            "Least-squares slope of h^(P_omega(t)) against h(omega(t)) along a line such as "
            "'S=T' or 'T=1', over integer t in a range a..b.")
    _add_fam_point(p)
    p.add_argument("--line", required=True)
    p.add_argument("--t", default="2..2000")

    p = add("verify-up", cmd_verify_up,
            "Exhaustive check of the upper bound h^(P_omega) <= U_P (1 + h(omega)) over every "
            "enumerated parameter, listing violations and the worst case.")
    _add_fam_point(p)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--domain", choices=["Z", "Q"], default="Q")

    p = add("lower-diag", cmd_lower_diag,
            "Nice-set diagnostic over Z^n_B: density of parameters with k-free discriminant, "
            "non-torsion P_nu and large power-free part, and the bound it certifies given C1.")
    _add_fam_point(p)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--M", type=float, default=3.0)
    p.add_argument("--C1", type=float, default=1.0, help="user-supplied absolute constant")

    p = add("sieve-kfree", cmd_sieve_kfree,
            "Exact count of v in [-B, B]^n with F(v) k-free, against the partial Euler product "
            "gamma_{k,F} (2B)^n.")
    _add_sieve_poly(p)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pmax", type=int, default=None)

    p = add("sieve-euler", cmd_sieve_euler,
            "Partial Euler product over p <= P_max of (1 - rho_F(p^k)/p^(nk)) with a heuristic tail.")
    _add_sieve_poly(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pmax", type=int, default=1000)

    p = add("sieve-good", cmd_sieve_good,
            "Density of Good_M: v in [-B, B]^n with Pfr_N(F(v))^M > ||v||.")
    _add_sieve_poly(p)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--N", type=int, default=2)

    p = add("rho", cmd_rho, "rho_F(m): the number of solutions of F = 0 in (Z/mZ)^n.")
    _add_sieve_poly(p)
    p.add_argument("--m", type=int, required=True)

    p = add("mason", cmd_mason,
            "Classify a candidate polynomial solution of P^k + Q^m = R^r (Mason-Stothers), "
            "optionally recovering the scalars of its co-decomposition.")
    p.add_argument("--vars", required=True)
    p.add_argument("--P", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--R", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--decompose", action="store_true")

    p = add("decomp12", cmd_decomp12,
            "Twelfth-power decomposition of the discriminant: alpha F^(a + 12 b) with F primitive.")
    p.add_argument("--family", required=True)

    p = add("sum-invlog", cmd_sum_invlog,
            "Sum of 1/log||v|| over v in Z^n with 1 < ||v|| <= B, and its ratio to B^n.")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    return parser


def _config_tokens(path: str) -> list[str]:
    tokens = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{i}: expected key=value")
        key = key.strip().replace("_", "-")
        value = value.strip()
        if key == "config":
            raise UsageError("config files cannot include other config files")
        if value.lower() == "true":
            tokens.append(f"--{key}")
        elif value.lower() != "false":
            tokens += [f"--{key}", value]
    return tokens


def _with_config(argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or not argv:
        return argv
    # file values go right after the subcommand so that later flags win
    return argv[:1] + _config_tokens(known.config) + argv[1:]


def _write_csv(path: str, rows) -> None:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    Path(path).write_text(buf.getvalue())


def _emit(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, msg: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": msg, "exit_code": code}, sort_keys=True) + "\n")
    return code


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_with_config(argv))
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        summary, rows = args.func(args)
        summary = {"command": args.command, "seed": args.seed, "result": summary}
        if rows is not None and args.csv:
            _write_csv(args.csv, rows)
        _emit(summary, args.output)
        return EXIT_OK
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE)
    except BudgetExceeded as exc:
        return _error("budget", str(exc), EXIT_BUDGET)
    except (PreconditionError, NVarsMismatch) as exc:
        return _error("precondition", str(exc), EXIT_PRECONDITION)
    except Exception as exc:  # noqa: BLE001
        return _error("internal", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

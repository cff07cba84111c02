import math
import statistics
from fractions import Fraction

import pytest

from avgheight.average import (
    average_quotient,
    coprime_vectors,
    enumerate_Qn,
    enumerate_Zn,
    lcm_upto,
    line_scan,
    lower_bound_diagnostic,
    parse_line,
    verify_upper_bound,
)
from avgheight.errors import PreconditionError
from avgheight.family import RatFunc, family_point, new_family, running_family
from avgheight.multipoly import MPoly

FAM, P = running_family()
X = MPoly.var(1, 0)


def torsion_family():
    # (0, T) has order 3 on y^2 = x^3 + T^2 for every T != 0
    fam = new_family(MPoly.zero(1), X**2, names=["T"])
    return fam, family_point(fam, RatFunc(MPoly.zero(1)), RatFunc(X))


# -- enumeration ----------------------------------------------------------------------------


def test_enumerate_Zn_small():
    fam, Q = torsion_family()
    assert list(enumerate_Zn(2, fam, Q)) == [(-2,), (2,)]


def test_enumerate_Qn_small():
    fam, Q = torsion_family()
    got = {w for (w,), _ in enumerate_Qn(2, fam, Q)}
    assert got == {Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(-1, 2)}


def test_enumerate_rejects_small_B():
    with pytest.raises(PreconditionError):
        list(enumerate_Zn(1, FAM, P))


def test_Zn_partition_count():
    # every vector with 1 < ||nu|| <= B is used or skipped
    B = 10
    rep = average_quotient(FAM, P, "Z", B)
    assert rep.enumerated == (2 * B + 1) ** 2 - 9
    assert rep.enumerated == rep.normalizer + 32
    # 64 S^6 = 432 T^4 has no nonzero integer solutions
    assert rep.singular_skipped == 0 and rep.undefined_skipped == 0


@pytest.mark.parametrize("B", [2, 7, 20, 50])
def test_Qn_bijection_with_fractions(B):
    direct = {
        Fraction(a, b)
        for b in range(1, B + 1)
        for a in range(-B, B + 1)
        if math.gcd(a, b) == 1 and 1 < max(abs(a), b)
    }
    vecs = list(coprime_vectors(1, B))
    assert len(vecs) == len(set(vecs)) == len(direct)
    assert {Fraction(a, b) for b, a in vecs} == direct


def test_Qn_count_asymptotic():
    B = 100
    n = sum(1 for _ in coprime_vectors(1, B))
    expected = (2 * B) ** 2 / (2 * (math.pi**2 / 6))
    assert abs(n - expected) / expected < 0.02


# -- averages -------------------------------------------------------------------------------


def test_torsion_section_has_zero_mean():
    fam, Q = torsion_family()
    rep = average_quotient(fam, Q, "Q", 12)
    assert rep.mean == 0.0 and rep.torsion == rep.normalizer
    assert "family is PossiblySplit" in rep.warnings


def test_running_family_mean_positive():
    rep = average_quotient(FAM, P, "Z", 8, keep_records=True)
    assert rep.mean > 0
    assert rep.count_mean == pytest.approx(rep.sum_ratio / len(rep.records))
    assert rep.mean == pytest.approx(rep.sum_ratio / 16**2)
    assert all(r.hhat >= 0 and r.error_bound <= 1e-9 for r in rep.records)
    assert not rep.warnings


def test_determinism_across_workers():
    a = average_quotient(FAM, P, "Q", 6, workers=1, keep_records=True)
    b = average_quotient(FAM, P, "Q", 6, workers=3, keep_records=True)
    assert repr(a.summary()) == repr(b.summary())
    assert a.records == b.records


def test_bad_domain():
    with pytest.raises(PreconditionError):
        average_quotient(FAM, P, "R", 5)


# -- line scans -----------------------------------------------------------------------------


def test_parse_line():
    t = MPoly.var(1, 0)
    assert parse_line("S=T", ["S", "T"]) == [t, t]
    assert parse_line("T=1", ["S", "T"]) == [t, MPoly.one(1)]
    assert parse_line("S=2*t+1, T=t", ["S", "T"]) == [2 * t + 1, t]
    for bad in ("S=T, T=S", "S", "U=1", "S=T^2", "S=1, T=2"):
        with pytest.raises(PreconditionError):
            parse_line(bad, ["S", "T"])


def test_line_scan_diagonal():
    ls = line_scan(FAM, P, "S=T", (2, 400))
    assert abs(ls.slope - 1 / 6) < 0.02
    assert ls.residuals[-1] <= 2 * statistics.median(ls.residuals)


def test_line_scan_torsion_line():
    ls = line_scan(FAM, P, "S=0", (2, 100))
    assert ls.torsion_count == len(ls.samples) and ls.slope == 0.0


# -- upper bound ----------------------------------------------------------------------------


def test_verify_upper_bound_small():
    rep = verify_upper_bound(FAM, P, 8)
    assert rep.checked > 0 and not rep.violations
    assert rep.max_excess < 0
    assert rep.U_P == pytest.approx(7 / 3)


# -- lower-bound diagnostic ---------------------------------------------------------------


def test_lcm_upto():
    assert lcm_upto(4) == 12
    assert lcm_upto(10) == 2520


def test_lower_diag_preconditions():
    with pytest.raises(PreconditionError):
        lower_bound_diagnostic(FAM, P, 10, 3, 3)
    with pytest.raises(PreconditionError):
        lower_bound_diagnostic(FAM, P, 10, 5, 2)


def test_lower_diag_k4_has_empty_nice_set():
    # 16 divides every discriminant of the family, so nothing is 4-free
    rep = lower_bound_diagnostic(FAM, P, 12, 4, 3)
    assert rep.params["kfree_count"] == 0 and rep.params["nice_density"] == 0


def test_lower_diag_k5():
    rep = lower_bound_diagnostic(FAM, P, 30, 5, 3)
    p = rep.params
    assert p["N_k"] == 60 and p["power_free_index"] == 2
    assert p["nice_density"] > 0
    assert 0 < rep.certified_lower_bound <= p["nice_density"] / 60**2 / 3 * 1.0000001

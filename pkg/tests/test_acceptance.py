"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (repeated in the
terminal summary) and then asserts, so an unmet criterion fails visibly.
"""

import json
import math
import random
import time
from decimal import Decimal
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from avbounds.auxbound import bound_theorem_easy, exception_set
from avbounds.chebyshev import closed_form_limit, growth_rate
from avbounds.cli import main
from avbounds.enumeration import OrbitSet, _memo_orbits, enumerate_orbits, scan_norm_outliers
from avbounds.exactcore import IntPolynomial, sturm_count
from avbounds.lpopt import optimize_and_certify
from avbounds.paperlab import (
    SUPPORTED_Q,
    candidate_pairs,
    fixture_row,
    from_paper,
    new_points_scan,
    published,
    reproduce_tables,
    torsion_bound,
)
from avbounds.weilring import (
    RealOrbit,
    from_weil,
    point_count,
    point_count_extension,
    quadratic_twist,
    to_weil,
)

SLACK_1 = Decimal("0.002")
SIDES = ("lower", "upper")


@pytest.fixture(autouse=True)
def no_cache_env(monkeypatch):
    monkeypatch.delenv("AVBOUNDS_CACHE", raising=False)
    monkeypatch.delenv("AVBOUNDS_CONFIG", raising=False)


@pytest.fixture(scope="module")
def report():
    return reproduce_tables()


def test_criterion_1_table_reproduction(criterion, capsys):
    misses, slow = [], []
    for q in SUPPORTED_Q:
        start = time.perf_counter()
        code = main(["--format", "json", "bounds", "--q", str(q), "--from-paper"])
        elapsed = time.perf_counter() - start
        docs = json.loads(capsys.readouterr().out)
        assert code == 0
        if elapsed >= 30:
            slow.append(f"q={q} {elapsed:.1f}s")
        for doc in docs:
            got, want = Decimal(doc["certified_bound"]), published(q, doc["side"])
            if abs(got - want) > SLACK_1:
                misses.append(f"q={q} {doc['side']} {got} vs {want}")
    ok = not misses and not slow
    criterion("criterion 1", ok, "; ".join(misses + slow) or "all 14 values within 0.002")
    assert ok


def test_criterion_2_bounds_hold_up_to_degree_4(criterion, report):
    violations = []
    for q in SUPPORTED_Q:
        row = report.row(q)
        outliers = scan_norm_outliers(q, 4, row.m_certified, row.M_certified)
        excused = set()
        for side in SIDES:
            system = report.certificates[(q, side)].system
            excused |= {str(o) for o, _ in exception_set(system, outliers, 0)}
        violations += [f"q={q} {o}" for o in outliers if str(o) not in excused]
    criterion("criterion 2", not violations, ", ".join(violations) or "zero violations")
    assert not violations


def test_criterion_3_integer_endpoint_bounds(criterion):
    problems = []
    mpmath.mp.dps = 30
    for q in SUPPORTED_Q:
        n = int(mpmath.floor((mpmath.sqrt(q) - 1) ** 2))
        N = int(mpmath.ceil((mpmath.sqrt(q) + 1) ** 2))
        endpoint = {f"x-{n}", f"x-{N}"}
        for o in scan_norm_outliers(q, 5, n + 1, N - 1):
            if str(o) not in endpoint:
                problems.append(f"q={q} {o}")
        lo = bound_theorem_easy(q, "lower").value
        up = bound_theorem_easy(q, "upper").value
        if abs(lo - max(n + 1, 1)) > 1e-4 or abs(up - (N - 1)) > 1e-4:
            problems.append(f"q={q} easy bounds {lo}, {up}")
    criterion("criterion 3", not problems, ", ".join(problems) or "only endpoint-integer orbits fall outside")
    assert not problems


def test_criterion_4_chebyshev_growth(criterion):
    problems = []
    with mpmath.workdps(50):
        for N in range(1, 11):
            limit = closed_form_limit(N)
            for n in (11, 31, 101):
                v = growth_rate(n, N)
                if not N + 2 - 1 / N - 0.2 <= v <= N + 2 + 0.2:
                    problems.append(f"N={N} n={n} outside bracket")
                if abs(v - limit) >= 3 / n:
                    problems.append(f"N={N} n={n} error {float(abs(v - limit)):.3g}")
    criterion("criterion 4", not problems, ", ".join(problems) or "N=1..10, n=11,31,101")
    assert not problems


def test_criterion_5_new_points(criterion):
    _memo_orbits.cache_clear()
    start = time.perf_counter()
    first, second = candidate_pairs()
    rep = new_points_scan(6)
    elapsed = time.perf_counter() - start
    found = {(q, r): sorted(str(o) for qq, rr, o in rep.exceptional_orbits if (qq, rr) == (q, r))
             for q, r in second}
    problems = []
    if first != [(2, 3), (2, 4), (2, 5), (2, 6), (3, 3), (3, 4), (4, 3)]:
        problems.append(f"stage 1 {first}")
    if second != [(2, 3), (2, 4)]:
        problems.append(f"stage 2 {second}")
    if found.get((2, 3)) != ["x-4", "x-5"] or found.get((2, 4)) != []:
        problems.append(f"exceptional {found}")
    c = rep.counts
    if c.get((2, 3, "x-4"), {}).get(3) != 4 or c.get((2, 3, "x-5"), {}).get(3) != 5:
        problems.append("counts over F_8")
    x3 = c.get((2, 4, "x-3"), {})
    if not (x3.get(1) == 3 and x3.get(4) == 9):
        problems.append(f"x-3 counts {x3}")
    if elapsed >= 60:
        problems.append(f"took {elapsed:.1f}s")
    criterion("criterion 5", not problems, ", ".join(problems) or f"{elapsed:.1f}s")
    assert not problems


def test_criterion_6_torsion(criterion, report):
    value = torsion_bound()
    ok = value == Decimal("3.782")
    criterion("criterion 6", ok, f"got {value} from certified M(9) = {report.row(9).M_certified}")
    assert ok


def test_criterion_7_lp_pipeline(criterion):
    problems, values = [], []
    for q in SUPPORTED_Q:
        for side in SIDES:
            entries = fixture_row(q, side).entries
            if not entries:
                continue
            pool = OrbitSet(q, 3, [RealOrbit(IntPolynomial.parse(e["polynomial"]), q, check=False)
                                   for e in entries])
            cert = optimize_and_certify(q, side, pool, len(pool))
            target = published(q, side)
            got = cert.certified_bound
            values.append(f"q={q} {side} {got}")
            # the LP may legitimately beat the listed value; it must not fall short of it by more than 0.02
            short = target - got if side == "lower" else got - target
            if short > Decimal("0.02"):
                problems.append(f"q={q} {side} {got} vs {target}")
            if not cert.lp_feasible:
                problems.append(f"q={q} {side} recheck failed")
    criterion("criterion 7", not problems, ", ".join(problems) or "; ".join(values))
    assert not problems


def _sturm_against_roots(rng):
    for _ in range(300):
        roots = [rng.randint(-6, 6) for _ in range(rng.randint(1, 6))]
        a, b = sorted((rng.randint(-7, 7), rng.randint(-7, 7)))
        lo, hi = Fraction(a) - Fraction(1, 3), Fraction(b) + Fraction(1, 2)
        if sturm_count(IntPolynomial.from_roots(roots), lo, hi) != len({r for r in roots if lo < r <= hi}):
            return False
    return True


def _orbit_laws(rng):
    for q in SUPPORTED_Q:
        orbits = list(enumerate_orbits(q, 3))
        for o in rng.sample(orbits, min(150, len(orbits))):
            if from_weil(to_weil(o)) != o or quadratic_twist(quadratic_twist(o)) != o:
                return False
            n = point_count(o)
            if any(point_count_extension(o, r) % n for r in range(2, 9)):
                return False
    return True


def _sampling_soundness(rng):
    nrng = np.random.default_rng(rng.randint(0, 2**32 - 1))
    for q in SUPPORTED_Q:
        for side in SIDES:
            cert = from_paper(q, side)
            if not cert.system.polynomials:
                continue
            lo, hi = (math.sqrt(q) - 1) ** 2, (math.sqrt(q) + 1) ** 2
            with np.errstate(divide="ignore"):
                v = cert.system.value(nrng.uniform(lo, hi, 100_000))
            v = v[np.isfinite(v) & (v > 0)]
            if side == "lower" and v.min() < cert.value - 1e-12:
                return False
            if side == "upper" and v.max() > cert.value + 1e-12:
                return False
    return True


def test_criterion_8_property_suites(criterion):
    rng = random.Random(20240611)
    results = {
        "sturm": _sturm_against_roots(rng),
        "roundtrip, twist, divisibility": _orbit_laws(rng),
        "sampling soundness": _sampling_soundness(rng),
    }
    failed = [k for k, v in results.items() if not v]
    criterion("criterion 8", not failed, ", ".join(failed) or "seeded checks: " + ", ".join(results))
    assert not failed


def test_criterion_9_discrepancy_audit(criterion, report):
    text = "\n".join(report.discrepancies)
    expected = [
        "[membership] q=9 upper: x^2-129x+209 is not in the Weil interval set",
        "normalized norm 14.456832",
        "[asterisk] q=2 upper: x^2-9x+19 has normalized norm 4.358899",
        "[asterisk] q=5 upper: x^2-18x+79 has normalized norm 8.888194",
    ]
    missing = [e for e in expected if e not in text]
    criterion("criterion 9", not missing, ", ".join(missing) or "all three anomalies reported with norms")
    assert not missing

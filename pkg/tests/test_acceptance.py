"""Acceptance battery: one test per criterion, each re-derived by an independent route.

Run with ``pytest tests/test_acceptance.py -v``; a one-line pass/fail summary
per criterion is printed at the end of the session.
"""

import math
import time

import numpy as np
import pytest

from dedekind import density as dens
from dedekind.ffpoly import IntPoly
from dedekind.numfield import cyclotomic_field, quadratic_field
from dedekind.suite import verify_suite
from oracles import catalan_pairs, gaussian_ideal_counts, legendre_euler, sieve, zeta2_basel

X = 10**6
PRIMES = np.array(sieve(X), dtype=np.int64)


@pytest.fixture(scope="module")
def battery():
    t0 = time.time()
    res = verify_suite(workers=1, seed=0)
    elapsed = time.time() - t0
    return {r.criterion: r for r in res.results}, res.to_json(), elapsed


def threshold(q, total):
    return max(0.01, 4 * math.sqrt(q * (1 - q) / total))


def check_report(rep: dict, hits: int, total: int, q: float):
    assert rep["total_primes"] == total
    assert rep["hits"] == hits
    assert abs(hits / total - q) <= threshold(q, total)
    assert rep["verdict"] == "pass"
    assert rep["half_gap"] <= rep["half_gap_bound"]


def residue_count(m, residues):
    ps = PRIMES[m % PRIMES != 0]
    return int(np.isin(ps % m, list(residues)).sum()), int(ps.size)


def power_residue_count(k):
    """Primes p = 1 mod k (p odd, p != 2) with 2^((p-1)/k) = 1 mod p."""
    hits = 0
    total = 0
    for p in PRIMES.tolist():
        if p in (2, 3) if k == 3 else p == 2:
            continue
        total += 1
        if (p - 1) % k == 0 and pow(2, (p - 1) // k, p) == 1:
            hits += 1
    return hits, total


@pytest.mark.criterion(1, "normal fields: split density 1/n at X = 1e6 (Q(i), Q(sqrt2), Q(zeta5), Q(zeta7))")
def test_criterion_1(battery):
    results, _, _ = battery
    reports = results[1].metrics["reports"]
    expected = [((4, {1}), 1 / 2), ((8, {1, 7}), 1 / 2), ((5, {1}), 1 / 4), ((7, {1}), 1 / 6)]
    for rep, ((m, res), q) in zip(reports, expected):
        hits, total = residue_count(m, res)
        check_report(rep, hits, total, q)
    t0 = time.time()
    for L in (quadratic_field(-1), quadratic_field(2), cyclotomic_field(5), cyclotomic_field(7)):
        dens.experiment_thm3(L, X)
    assert time.time() - t0 < 30
    assert results[1].verdict == "pass"


@pytest.mark.criterion(2, "x^3-2 -> 1/6 and x^4-2 -> 1/8 at X = 1e6")
def test_criterion_2(battery):
    results, _, _ = battery
    reports = results[2].metrics["reports"]
    # x^3 - 2 splits into three distinct roots mod p (p > 3) iff p = 1 mod 3 and 2 is a cube;
    # x^4 - 2 has four distinct roots (p odd) iff p = 1 mod 4 and 2 is a fourth power.
    cubic = power_residue_count(3)
    quartic = power_residue_count(4)
    for rep, (hits, total), q in zip(reports, [cubic, cubic, quartic, quartic], [1 / 6, 1 / 6, 1 / 8, 1 / 8]):
        check_report(rep, hits, total, q)
    t0 = time.time()
    dens.experiment_cor1(IntPoly((-2, 0, 0, 1)), 6, X)
    dens.experiment_cor1(IntPoly((-2, 0, 0, 0, 1)), 8, X)
    assert time.time() - t0 < 60
    assert results[2].verdict == "pass"


@pytest.mark.criterion(3, "residue classes: m=7 H={1,6} -> 1/3, m=8 H={1} -> 1/4 at X = 1e6")
def test_criterion_3(battery):
    results, _, _ = battery
    a, b = results[3].metrics["reports"]
    check_report(a, *residue_count(7, {1, 6}), 1 / 3)
    check_report(b, *residue_count(8, {1}), 1 / 4)
    assert results[3].verdict == "pass"


@pytest.mark.criterion(4, "x^3-2 vs its normal closure: zero counterexamples for unramified p <= 1e6")
def test_criterion_4(battery):
    results, _, _ = battery
    m = results[4].metrics
    assert m["counterexamples"] == [] and m["closure_counterexamples"] == []
    assert m["excluded"] == [2, 3] and m["checked"] == PRIMES.size - 2
    assert m["split_count"] == power_residue_count(3)[0]
    assert results[4].verdict == "pass"


def partial_product_oracle(m, s, P, exponent):
    """prod over p = 1 mod m, p <= P of (1 - p^-s)^-exponent, via a log sum."""
    ps = np.array(sieve(P), dtype=np.float64)
    ps = ps[ps % m == 1]
    return math.exp(-exponent * math.fsum(np.log1p(-(ps ** -s)).tolist()))


@pytest.mark.criterion(5, "partial zeta identity: squared (Q(i)) and fourth-power (Q(zeta5)) at s in {1.5, 2}, P = 1e5")
def test_criterion_5(battery):
    results, _, _ = battery
    rows = results[5].metrics["checks"]
    assert len(rows) == 4
    for row in rows:
        m = 4 if row["exponent"] == 2 else 5
        oracle = partial_product_oracle(m, row["s"], 10**5, row["exponent"])
        assert abs(row["rhs"] - oracle) <= 1e-12 * oracle
        assert abs(row["lhs"] - oracle) <= 1e-12 * oracle
        assert row["diff"] <= row["bound"]
    assert results[5].verdict == "pass"


@pytest.mark.criterion(6, "Q(i) at B = 1e6: kappa within 0.01 of pi/4 (lattice count oracle), error exponent <= 0.65")
def test_criterion_6(battery):
    results, _, _ = battery
    m = results[6].metrics
    lattice = sum(gaussian_ideal_counts(10**6))
    assert m["i_B"] == lattice == m["lattice_count"]
    assert abs(lattice / 10**6 - math.pi / 4) <= 0.01
    assert abs(m["kappa_hat"] - math.pi / 4) <= 0.01
    assert m["error_exponent_hat"] <= 0.65
    assert results[6].verdict == "pass"


@pytest.mark.criterion(7, "series vs product within bound sums at s in {1.5, 2, 3} for all suite fields; 500 coprime pairs multiplicative")
def test_criterion_7(battery):
    results, _, _ = battery
    m = results[7].metrics
    assert len(m["fields"]) == 8
    for fld in m["fields"]:
        assert [c["s"] for c in fld["checks"]] == [1.5, 2.0, 3.0]
        for c in fld["checks"]:
            assert abs(c["dirichlet"] - c["euler"]) <= c["bound"]
    assert m["multiplicativity_pairs"] == 500 and m["multiplicativity_violations"] == 0
    assert results[7].verdict == "pass"


@pytest.mark.criterion(8, "zeta(2) within 1e-9 of pi^2/6; 2- and 3-series routes agree within 1e-6 at s = 0.5 and 1 + 2 pi i/log 2")
def test_criterion_8(battery):
    results, _, _ = battery
    m = results[8].metrics
    assert abs(m["zeta2"] - math.pi**2 / 6) <= 1e-9
    assert abs(m["zeta2"] - zeta2_basel()) <= 1e-9
    assert len(m["routes"]) == 2
    for row in m["routes"]:
        assert row["diff"] <= 1e-6
        assert all(math.isfinite(v) for v in row["g_route"])
    assert results[8].verdict == "pass"


@pytest.mark.criterion(9, "zeta_Q(i)(2) = zeta(2) L(2, chi_-4) within bounds; 1.506703 reproduced by series oracles to 1e-6")
def test_criterion_9(battery):
    results, _, _ = battery
    m = results[9].metrics
    oracle = zeta2_basel() * catalan_pairs()
    assert abs(oracle - 1.506703) <= 1e-6
    assert abs(m["zeta_times_L"] - oracle) <= 1e-6
    assert m["delta"] <= m["bound"]
    assert abs(m["zeta_K"] - oracle) <= m["bound"]
    assert results[9].verdict == "pass"


@pytest.mark.criterion(10, "residue: Q(i) within 0.02 of kappa_hat, Q within 0.01 of 1")
def test_criterion_10(battery):
    results, _, _ = battery
    m = results[10].metrics
    assert abs(m["residue_Qi"] - m["kappa_hat"]) <= 0.02
    assert abs(m["residue_Qi"] - math.pi / 4) <= 0.02
    assert abs(m["residue_Q"] - 1) <= 0.01
    assert results[10].verdict == "pass"


def splits_in_quadratic(D, p):
    if p == 2:
        return D % 8 == 1
    return D % p != 0 and legendre_euler(D, p) == 1


@pytest.mark.criterion(11, "every pair of distinct quadratic fields with |d| <= 20 has a witness prime <= 100")
def test_criterion_11(battery):
    results, _, _ = battery
    m = results[11].metrics
    ds = [d for d in range(-20, 21) if d not in (0, 1) and all(d % (k * k) for k in range(2, 5))]
    disc = {d: d if d % 4 == 1 else 4 * d for d in ds}
    ps = sieve(100)
    expected = {}
    for i, d1 in enumerate(ds):
        for d2 in ds[i + 1 :]:
            w = next((p for p in ps if splits_in_quadratic(disc[d1], p) != splits_in_quadratic(disc[d2], p)), None)
            assert w is not None
            expected[f"{d1},{d2}"] = w
    assert m["witnesses"] == expected
    assert m["missing"] == []
    assert results[11].verdict == "pass"


@pytest.mark.criterion(12, "verify JSON byte-identical across two runs and across 1/4/16 workers")
def test_criterion_12(battery):
    _, reference, _ = battery
    assert verify_suite(workers=1, seed=0).to_json() == reference
    for workers in (4, 16):
        assert verify_suite(workers=workers, seed=0).to_json() == reference


def test_seed_changes_no_verdicts(battery):
    results, _, _ = battery
    other = verify_suite(workers=1, seed=7)
    assert [r.verdict for r in other.results] == [results[k].verdict for k in sorted(results)]


def test_corrupted_cache_is_recomputed(battery, tmp_path, monkeypatch):
    results, reference, _ = battery
    monkeypatch.setenv("DEDEKIND_CACHE_DIR", str(tmp_path))
    from dedekind.primes import primes_upto

    primes_upto(X)
    for f in tmp_path.glob("primes_*.npz"):
        f.write_bytes(b"\x00" * 64)
    assert verify_suite(workers=1, seed=0).to_json() == reference


def test_all_criteria_present(battery):
    results, _, elapsed = battery
    assert sorted(results) == list(range(1, 12))
    assert all(r.verdict == "pass" for r in results.values())


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

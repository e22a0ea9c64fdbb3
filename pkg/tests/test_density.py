from fractions import Fraction

import pytest

from dedekind import density as dens
from dedekind.ffpoly import IntPoly
from dedekind.numfield import cyclotomic_field, poly_discriminant, quadratic_field, rational_field
from dedekind.primes import primes_upto
from oracles import roots_mod, sieve

X = 10**6
QI = quadratic_field(-1)
CUBIC = IntPoly((-2, 0, 0, 1))
QUARTIC = IntPoly((-2, 0, 0, 0, 1))


def count_mod(m, residues, X):
    ps = [p for p in sieve(X) if m % p]
    return sum(1 for p in ps if p % m in residues), len(ps)


def test_gaussian_density_matches_direct_count():
    rep = dens.experiment_thm3(QI, X)
    hits, total = count_mod(4, {1}, X)
    assert (rep.hits, rep.total_primes) == (hits, total)
    assert 0.49 <= rep.empirical <= 0.51 and rep.theoretical == Fraction(1, 2)
    assert rep.verdict


def test_rational_field_density_is_one():
    rep = dens.natural_density(dens.split_completely_in(rational_field()), 10**4, Fraction(1))
    assert rep.empirical == 1 and rep.verdict


@pytest.mark.parametrize("m, q", [(5, Fraction(1, 4)), (7, Fraction(1, 6))])
def test_cyclotomic_density(m, q):
    rep = dens.experiment_thm3(cyclotomic_field(m), X)
    hits, total = count_mod(m, {1}, X)
    assert (rep.hits, rep.total_primes) == (hits, total)
    assert rep.theoretical == q and rep.verdict


def test_sqrt2_density_matches_residue_count():
    rep = dens.experiment_thm3(quadratic_field(2), X)
    hits, total = count_mod(8, {1, 7}, X)
    assert (rep.hits, rep.total_primes) == (hits, total) and rep.verdict


def test_normal_experiment_rejects_non_normal():
    from dedekind.numfield import field_from_poly

    with pytest.raises(ValueError):
        dens.experiment_thm3(field_from_poly(CUBIC), 10**4)


def test_two_constructors_identical_reports():
    a = dens.natural_density(dens.split_completely_in(cyclotomic_field(4)), 10**5, Fraction(1, 2), experiment_id="x")
    b = dens.natural_density(dens.split_completely_in(QI), 10**5, Fraction(1, 2), experiment_id="x")
    assert a == b


@pytest.mark.parametrize("f, deg, q", [(CUBIC, 6, Fraction(1, 6)), (QUARTIC, 8, Fraction(1, 8)), (IntPoly((1, 0, 1)), 2, Fraction(1, 2))])
def test_poly_density(f, deg, q):
    rep = dens.experiment_cor1(f, deg, X)
    assert rep.theoretical == q and rep.verdict
    rep2 = dens.experiment_cor2(f, deg, X)
    assert rep2.hits == rep.hits


def test_poly_density_matches_root_count():
    rep = dens.experiment_cor1(CUBIC, 6, 20000)
    ps = [p for p in sieve(20000) if p not in (2, 3)]
    assert rep.hits == sum(1 for p in ps if len(roots_mod([-2, 0, 0, 1], p)) == 3)


def test_residue_class_examples():
    rep = dens.experiment_cor3(7, [6], X)
    assert rep.theoretical == Fraction(1, 3) and rep.verdict
    rep = dens.experiment_cor3(8, [], X)
    assert rep.theoretical == Fraction(1, 4) and rep.verdict
    assert rep.hits == count_mod(8, {1}, X)[0]
    rep = dens.experiment_cor3(5, [2], 10**4)
    assert rep.theoretical == 1 and rep.empirical == 1


def test_subgroup_closure():
    assert dens.subgroup_closure(7, [6]) == {1, 6}
    assert dens.subgroup_closure(5, [2]) == {1, 2, 3, 4}
    with pytest.raises(ValueError):
        dens.subgroup_closure(8, [2])


def test_chunk_independence():
    pred = dens.split_completely_in(cyclotomic_field(5))
    reps = [dens.natural_density(pred, X, Fraction(1, 4), chunks=c, workers=min(c, 4)) for c in (1, 4, 16)]
    assert reps[0] == reps[1] == reps[2]
    pred = dens.distinct_linear_mod_p(CUBIC)
    reps = [dens.natural_density(pred, 10**5, Fraction(1, 6), chunks=c, workers=c) for c in (1, 4, 16)]
    assert reps[0] == reps[1] == reps[2]


@pytest.mark.parametrize(
    "pred, declared",
    [
        (dens.split_completely_in(QI), -4),
        (dens.split_completely_in(cyclotomic_field(12)), 12),
        (dens.distinct_linear_mod_p(QUARTIC), poly_discriminant(QUARTIC)),
        (dens.residue_class_in(15, [2])[0], 15),
    ],
)
def test_exclusion_soundness(pred, declared):
    ps = primes_upto(10**5)
    _, excl = pred.classify(ps)
    assert all(declared % int(p) == 0 for p in ps[excl])
    assert pred.declared == (declared,)


@pytest.mark.parametrize(
    "pred, q",
    [
        (dens.split_completely_in(QI), Fraction(1, 2)),
        (dens.distinct_linear_mod_p(CUBIC), Fraction(1, 6)),
        (dens.residue_class_in(7, [6])[0], Fraction(1, 3)),
    ],
)
def test_complement_sums_to_one(pred, q):
    a = dens.natural_density(pred, 10**5, q)
    b = dens.natural_density(dens.complement(pred), 10**5, 1 - q)
    assert a.total_primes == b.total_primes
    assert a.hits + b.hits == a.total_primes
    assert a.empirical + b.empirical == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize(
    "make",
    [
        lambda: dens.experiment_thm3(QI, X),
        lambda: dens.experiment_thm3(cyclotomic_field(7), X),
        lambda: dens.experiment_cor1(CUBIC, 6, X),
        lambda: dens.experiment_cor1(QUARTIC, 8, X),
        lambda: dens.experiment_cor3(7, [6], X),
    ],
)
def test_monotone_stabilization(make):
    rep = make()
    assert rep.stable and rep.half_gap <= rep.half_gap_bound
    assert rep.checkpoints[-1] == (X, rep.empirical)


def test_checkpoints_are_prefix_densities():
    rep = dens.experiment_thm3(QI, 10**5)
    for x, emp in rep.checkpoints:
        hits, total = count_mod(4, {1}, x)
        assert emp == hits / total


def test_natural_density_rejects_small_X():
    with pytest.raises(ValueError):
        dens.experiment_thm3(QI, 100)


def test_dirichlet_density_gaussian():
    est = dens.dirichlet_density(dens.split_completely_in(QI))
    assert 0.47 <= est.extrapolated <= 0.53


def test_dirichlet_density_all_primes():
    est = dens.dirichlet_density(dens.all_primes(), 10**5)
    assert all(r == 1 for r in est.ratios)
    assert est.extrapolated == pytest.approx(1, abs=1e-9)


def test_dirichlet_density_cubic():
    est = dens.dirichlet_density(dens.distinct_linear_mod_p(CUBIC))
    assert 0.13 <= est.extrapolated <= 0.20


def test_dirichlet_density_rejects_bad_samples():
    with pytest.raises(ValueError):
        dens.dirichlet_density(dens.all_primes(), 10**5, [1.0, 1.2])


def test_closure_sides_examples():
    assert dens.lemma3_sides(31) == (True, True)
    assert dens.lemma3_sides(5) == (False, False)
    assert roots_mod([-2, 0, 0, 1], 5) == [3]


def test_closure_equivalence():
    rep = dens.check_lemma3(X)
    assert rep.excluded == (2, 3)
    assert rep.counterexamples == () and rep.closure_counterexamples == ()
    assert rep.checked == 78498 - 2


def test_closure_polynomial_is_splitting_field():
    # p splits completely in the sextic iff x^3 - 2 has three roots mod p, on good primes
    bad = {2, 3, 5}
    for p in sieve(5000):
        if p in bad:
            continue
        three = len(roots_mod([-2, 0, 0, 1], p)) == 3
        six = len(roots_mod(list(dens.CUBIC_CLOSURE_POLY.coeffs), p)) == 6
        assert three == six, p


def test_partial_zeta_identity():
    for s in (1.5, 2.0):
        rows = dens.check_thm3_identity(s, 10**5)
        assert [r["exponent"] for r in rows] == [2, 4]
        assert all(r["diff"] <= r["bound"] for r in rows)
    rows = dens.check_thm3_identity(2.0, 1)
    assert all(r["lhs"] == r["rhs"] == 1 for r in rows)
    with pytest.raises(ValueError):
        dens.check_thm3_identity(1.0, 100)


def test_quadratic_witnesses():
    rep = dens.check_cor4(100)
    assert rep["missing"] == [] and rep["verdict"] == "pass"
    assert rep["witnesses"]["2,3"] == 7
    assert rep["witnesses"]["-3,-1"] < 50
    n = len(dens.quadratic_ds(20))
    assert rep["pairs"] == n * (n - 1) // 2


def test_distinguishing_prime_rejects_equal_fields():
    with pytest.raises(ValueError):
        dens.distinguishing_prime(QI, quadratic_field(-1), 100)

from fractions import Fraction

import pytest

from src.arith.number_theory import divisor_count_k, is_squarefree, primes_up_to
from src.densities.local_densities import (
    GENERIC,
    SPECIAL,
    FIXED_Z_COLUMNS,
    DensityReporter,
    brute_force_density,
    count_coprime_factorizations,
    fixed_z_main_term,
    generic_solution_count,
    local_density_generic,
    local_density_special,
    lower_bound_sum,
    singular_product,
    singular_product_exact,
    special_solution_count,
)
from src.utils.errors import CapacityError


def test_exact_densities():
    assert local_density_generic(2) == Fraction(1, 8)
    assert local_density_generic(3) == Fraction(14, 27)
    assert local_density_generic(5) == Fraction(4, 5)
    assert local_density_special(2, 1) == Fraction(3, 32)
    assert local_density_special(2, 2) == Fraction(3, 128)
    with pytest.raises(ValueError):
        local_density_generic(4)
    with pytest.raises(ValueError):
        local_density_special(3, 0)


def test_solution_counts():
    assert generic_solution_count(2) == 1
    assert generic_solution_count(3) == 14
    assert special_solution_count(2) == 6
    assert special_solution_count(3) == 48


def test_generic_density_matches_bruteforce():
    for p in primes_up_to(31):
        assert brute_force_density(p, GENERIC) == local_density_generic(p), p


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("e", [1, 2])
def test_special_density_matches_bruteforce(p, e):
    assert brute_force_density(p, SPECIAL, e) == local_density_special(p, e)


def test_bruteforce_limits():
    with pytest.raises(CapacityError):
        brute_force_density(37, GENERIC, prime_limit=31)
    with pytest.raises(ValueError):
        brute_force_density(3, SPECIAL)
    with pytest.raises(ValueError):
        brute_force_density(3, 'exotic')


def test_singular_product():
    assert singular_product_exact(2) == Fraction(1, 8)
    assert singular_product(2) == pytest.approx(0.125)
    assert singular_product(10) == pytest.approx(0.046258, abs=1e-6)
    with pytest.raises(ValueError):
        singular_product_exact(1)


def test_lower_bound_sum():
    assert lower_bound_sum(16, Fraction(1, 2)) == Fraction(184, 3)
    assert lower_bound_sum(10 ** 4) == 10 ** 4
    assert lower_bound_sum(1, Fraction(1, 2)) == 1
    with pytest.raises(ValueError):
        lower_bound_sum(16, 0)
    with pytest.raises(ValueError):
        lower_bound_sum(Fraction(1, 2))
    with pytest.raises(CapacityError):
        lower_bound_sum(10 ** 6, 1, budget=100)


def test_fixed_z_main_term(worked_point):
    _, _, z = worked_point
    # P = 6, phi(6) = 2
    assert fixed_z_main_term(z, 36) == Fraction(2)
    assert fixed_z_main_term((1,) * 6, 10) == 10


def test_coprime_factorizations():
    for P in range(1, 80):
        if is_squarefree(P):
            assert count_coprime_factorizations(P) == divisor_count_k(P, 6), P
    assert count_coprime_factorizations(4) == 6
    assert count_coprime_factorizations(12, parts=2) == 4


def test_density_table(counter):
    reporter = DensityReporter(counter)
    table = reporter.density_table(7, special_e=1)
    assert list(table.columns) == ['p', 'variant', 'e', 'density_formula', 'density_bruteforce', 'equal']
    assert len(table) == 8
    assert table['equal'].all()
    assert table.loc[0, 'density_formula'] == pytest.approx(0.125)
    assert table['e'].isna().sum() == 4


def test_ratio_report(counter):
    reporter = DensityReporter(counter)
    reports = reporter.ratio_report([6, 12])
    assert [r.N for r in reports] == [128, 296]
    frame = reporter.reports_to_frame(reports)
    assert list(frame['N']) == [128, 296]
    with pytest.raises(ValueError):
        reporter.ratio_report([1, 6])
    assert list(reporter.get_report_summary()['operation']) == ['ratio_report']


def test_ratio_report_enumerates_once(counter):
    reporter = DensityReporter(counter)
    before = len(counter.count_log)
    reports = reporter.ratio_report([6, "25/2", 20])
    new_entries = counter.count_log[before:]
    assert [entry['operation'] for entry in new_entries] == ['height_profile']
    assert [r.N for r in reports] == [128, 296, 1064]
    assert all(r.elapsed_seconds == reports[0].elapsed_seconds for r in reports)
    assert reporter.ratio_report([]) == []


def test_fixed_z_report(counter, worked_point):
    _, _, z = worked_point
    reporter = DensityReporter(counter)
    table = reporter.fixed_z_report(z, [6, 36])
    assert list(table.columns) == FIXED_Z_COLUMNS
    assert list(table['z']) == ['1,2,1,3,1,1'] * 2
    assert table.loc[0, 'count'] == 2
    assert list(table['main_term']) == pytest.approx([1 / 3, 2.0])
    assert list(table['ratio']) == pytest.approx(list(table['count'] / table['main_term']))


def test_lower_bound_sum_increases_with_height():
    values = [lower_bound_sum(B, Fraction(1, 2)) for B in range(1, 61)]
    assert all(earlier < later for earlier, later in zip(values, values[1:]))


def test_singular_product_decreases_with_more_primes():
    values = [singular_product_exact(p) for p in primes_up_to(100)]
    # every generic factor lies strictly between 0 and 1
    assert all(0 < later < earlier for earlier, later in zip(values, values[1:]))
    assert all(0 < local_density_generic(p) < 1 for p in primes_up_to(100))

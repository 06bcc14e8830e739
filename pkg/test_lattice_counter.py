import math
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import pytest

from src.lattice.lattice_counter import (
    Ellipse,
    Lattice2,
    LatticeBoundChecker,
    PlaneBoxQuery,
    ap_range,
    check_divisibility_lattices,
    check_progression_averaging,
    count_in_ap,
    count_lattice_in_ellipse,
    count_primitive_on_plane,
    divisibility_lattice_det,
    divisibility_lattice_index_bruteforce,
    ellipse_bound,
    ellipse_points_span_plane,
    ellipse_row,
    plane_box_bound,
    progression_product_count,
    random_lattice_and_ellipse,
    random_plane_query,
)
from src.utils.errors import BoundViolationError, CapacityError


def test_plane_box_counts():
    assert count_primitive_on_plane(PlaneBoxQuery((1, 1, 1), (2, 2, 2))) == 12
    assert count_primitive_on_plane(PlaneBoxQuery((1, 0, 0), (1, 1, 1))) == 8
    assert count_primitive_on_plane(PlaneBoxQuery((1, 2, 3), (1, 1, 1))) == 2


def test_plane_box_count_accepts_fractional_bounds():
    whole = PlaneBoxQuery((1, 1, 1), (2, 2, 2))
    fractional = PlaneBoxQuery((1, 1, 1), ("5/2", "5/2", "5/2"))
    assert count_primitive_on_plane(fractional) == count_primitive_on_plane(whole)


def test_plane_box_bound_value():
    q = PlaneBoxQuery((1, 1, 1), (2, 2, 2))
    assert plane_box_bound(q) == pytest.approx(4 + 48 * math.pi)


def test_plane_query_validation():
    with pytest.raises(ValueError):
        PlaneBoxQuery((0, 0, 0), (1, 1, 1))
    with pytest.raises(ValueError):
        PlaneBoxQuery((2, 4, 6), (1, 1, 1))
    with pytest.raises(ValueError):
        PlaneBoxQuery((1, 1, 1), (1, 0, 1))


def test_plane_count_budget():
    with pytest.raises(CapacityError):
        count_primitive_on_plane(PlaneBoxQuery((1, 1, 1), (10, 10, 10)), cell_budget=100)


def test_ellipse_counts():
    identity = Lattice2.identity()
    assert count_lattice_in_ellipse(identity, Ellipse.disc(1)) == 5
    assert count_lattice_in_ellipse(identity, Ellipse.disc(10)) == 317
    assert count_lattice_in_ellipse(Lattice2(((3, 0), (0, 3))), Ellipse.disc(1)) == 1
    assert ellipse_bound(identity, Ellipse.disc(1)) == pytest.approx(4 * (1 + math.pi))


def test_ellipse_count_is_basis_independent():
    # same lattice, different bases
    first = Lattice2(((1, 0), (0, 1)))
    second = Lattice2(((1, 1), (0, 1)))
    ellipse = Ellipse(Fraction(1, 7), Fraction(1, 30), Fraction(1, 5))
    assert count_lattice_in_ellipse(first, ellipse) == count_lattice_in_ellipse(second, ellipse)


def test_ellipse_validation():
    with pytest.raises(ValueError):
        Ellipse(1, 2, 1)
    with pytest.raises(ValueError):
        Lattice2(((1, 2), (2, 4)))


def test_divisibility_lattice_det():
    assert divisibility_lattice_det(2, 3, 1, 6) == 36
    assert divisibility_lattice_det(1, 1, 1, 1) == 1
    assert divisibility_lattice_det(2, 2, 2, 2) == 8
    assert divisibility_lattice_index_bruteforce(2, 3, 1, 6) == 36
    with pytest.raises(ValueError):
        divisibility_lattice_det(0, 1, 1, 1)


def test_divisibility_lattice_matches_bruteforce():
    assert check_divisibility_lattices(500) == []


def test_count_in_ap():
    assert count_in_ap(0, 10, 3, 1) == 4
    assert count_in_ap(0, 10, 1, 0) == 10
    assert count_in_ap(5, 5, 2, 1) == 0
    assert list(ap_range(0, 10, 3, 1)) == [1, 4, 7, 10]
    assert count_in_ap(Fraction(1, 2), 8, 4, 3) == len(ap_range(Fraction(1, 2), 8, 4, 3))
    assert list(ap_range(-5, 5, 3, 1)) == [-2, 1, 4]
    assert list(ap_range(Fraction(-11, 2), 5, 3, 1)) == [-5, -2, 1, 4]
    assert list(ap_range(-5, 5, 3, 1)) == list(ap_range(Fraction(-5), Fraction(5), 3, 1))


def test_progression_product_count():
    half = Fraction(1, 2)
    assert progression_product_count(half, half, half, 1, 5) == 1
    assert progression_product_count(1, 1, 1, 1, 5) == 0
    assert progression_product_count(1, 1, 1, 3, 5) == 1
    with pytest.raises(ValueError):
        progression_product_count(1, 1, 1, 5, 10)


@pytest.mark.parametrize("q", range(1, 31))
def test_progression_averaging(q):
    # the count is symmetric in K, so sorted triples cover K_i in {1, 2, 4, 8}
    for K in combinations_with_replacement((1, 2, 4, 8), 3):
        assert check_progression_averaging(q, K), (q, K)


def test_random_generators_are_reproducible():
    first = random_plane_query(np.random.default_rng(7))
    second = random_plane_query(np.random.default_rng(7))
    assert first == second
    lattice, ellipse = random_lattice_and_ellipse(np.random.default_rng(3))
    assert lattice.determinant != 0
    assert ellipse.discriminant > 0


def test_bound_checkers_find_no_violations():
    checker = LatticeBoundChecker(workers=1)
    plane = checker.check_plane_bound(10000, seed=0)
    ellipse = checker.check_ellipse_bound(10000, seed=0)
    assert plane.passed and ellipse.passed
    assert 0 < plane.max_ratio <= 1
    assert 0 < ellipse.max_ratio < 1
    # the two thin ellipses of this seed hold collinear points only
    assert ellipse.to_dict()['outside_domain_over_bound'] == 2
    assert all(not row['spans_plane'] for row in ellipse.outside_domain)
    checker.raise_on_violation(plane)
    summary = checker.get_check_summary()
    assert list(summary['check']) == ['plane_box_bound', 'ellipse_bound']


def test_bound_checker_is_seeded():
    checker = LatticeBoundChecker(workers=1)
    first = checker.check_ellipse_bound(50, seed=11)
    second = checker.check_ellipse_bound(50, seed=11)
    assert first.max_ratio == second.max_ratio


def test_raise_on_violation():
    checker = LatticeBoundChecker(workers=1)
    result = checker.check_plane_bound(0, seed=0)
    result.violations.append({'count': 2, 'bound': 1})
    with pytest.raises(BoundViolationError):
        checker.raise_on_violation(result)


@pytest.mark.parametrize("basis, form, count", [
    (((-5, 5), (4, -5)), (20, 0, Fraction(2, 43)), 9),
    (((10, 5), (9, 4)), (49, Fraction(17, 240), Fraction(1, 12)), 7),
])
def test_collinear_ellipse_points_exceed_the_bound(basis, form, count):
    lattice, ellipse = Lattice2(basis), Ellipse(*form)
    assert count_lattice_in_ellipse(lattice, ellipse) == count
    assert ellipse_bound(lattice, ellipse) < count
    assert not ellipse_points_span_plane(lattice, ellipse)
    row = ellipse_row(lattice, ellipse)
    assert row['count'] == count and row['spans_plane'] is False


def test_ellipse_points_span_plane():
    identity = Lattice2.identity()
    assert ellipse_points_span_plane(identity, Ellipse.disc(1))
    # only the origin
    assert not ellipse_points_span_plane(Lattice2(((3, 0), (0, 3))), Ellipse.disc(1))
    first = ellipse_row(identity, Ellipse.disc(10))
    assert first['spans_plane'] and first['count'] <= 2 + 2 * Ellipse.disc(10).area

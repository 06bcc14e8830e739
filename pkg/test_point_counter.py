import math
from fractions import Fraction
from itertools import permutations

import pytest

from src.arith.intervals import DyadicRange
from src.enumeration.point_counter import (
    CONVOLUTION,
    DIRECT,
    NAIVE,
    TORSOR,
    PointCounter,
    dyadic_base,
    dyadic_box_is_empty,
    iter_torsor_tuples,
    torsor_blocks,
    z_signature,
)
from src.geometry.cayley_surface import CayleyPoint
from src.geometry.torsor import verify_tuple
from src.utils.errors import CapacityError

# N(B) for B = 1 .. 30
FROZEN_N = [
    0, 0, 8, 32, 32, 128, 128, 128, 128, 152,
    152, 296, 296, 296, 560, 560, 560, 704, 704, 1064,
    1160, 1160, 1160, 1424, 1424, 1424, 1424, 1760, 1760, 2264,
]


def _coprime_nonzero_pairs(b):
    return sum(
        1
        for a in range(-b, b + 1)
        for c in range(-b, b + 1)
        if a and c and math.gcd(a, c) == 1
    )


@pytest.mark.parametrize("B, N", [(1, 0), (2, 0), (3, 8), (6, 128), (12, 296), (30, 2264)])
def test_frozen_counts(counter, B, N):
    assert counter.count(B, TORSOR).N == N


def test_engines_agree_on_the_height_profile(counter):
    naive = counter.height_profile(30, NAIVE)
    torsor = counter.height_profile(30, TORSOR)
    assert naive == torsor
    assert torsor[1:] == FROZEN_N


def test_count_naive_and_torsor(counter):
    assert counter.count_naive(20).N == 1064
    assert counter.count_torsor(20).N == 1064
    assert counter.count_torsor("25/2").N == 296


def test_count_report(counter):
    report = counter.count(12, TORSOR, with_star=True)
    assert report.Nstar == 464
    assert report.ratio == pytest.approx(296 / (12 * math.log(12) ** 6))
    payload = report.to_dict()
    assert payload['B'] == 12 and payload['method'] == TORSOR
    assert 'elapsed_seconds' not in payload
    assert 'elapsed_seconds' in report.to_dict(include_timing=True)
    assert counter.count(1).ratio is None


@pytest.mark.parametrize("B, Nstar", [(6, 136), (8, 160), (10, 192), (12, 464)])
def test_star_counts_two_ways(counter, B, Nstar):
    assert counter.count_star(B, DIRECT) == Nstar
    assert counter.count_star(B, CONVOLUTION) == Nstar


def test_star_counts_larger(counter):
    assert counter.count_star(20, CONVOLUTION) == 1416
    assert counter.count_star(30, CONVOLUTION) == 3320
    with pytest.raises(ValueError):
        counter.count_star(6, 'sideways')


def test_count_projective(counter):
    assert counter.count_projective(6) == Fraction(64)


def test_lines(counter):
    assert counter.count_on_lines(1) == 38
    for b in range(1, 5):
        assert counter.count_on_lines(b) == 9 * _coprime_nonzero_pairs(b) + 2


def test_surface_splits_into_lines_and_u(counter):
    for b in (3, 6):
        assert counter.count_surface_primitive(b) == counter.count_on_lines(b) + FROZEN_N[b - 1]


def test_count_for_fixed_z(counter, worked_point):
    _, _, z = worked_point
    assert counter.count_for_fixed_z(z, 6) == 2
    assert counter.count_for_fixed_z(z, 5) == 0
    with pytest.raises(ValueError):
        counter.count_for_fixed_z((2, 2, 1, 1, 1, 1), 6)


def test_dyadic_base():
    assert dyadic_base(1) == Fraction(1, 2)
    assert dyadic_base(2) == 1
    assert dyadic_base(3) == 2
    assert dyadic_base(6) == 4
    assert dyadic_base(8) == 4
    assert dyadic_base(9) == 8


def test_dyadic_box_emptiness():
    assert dyadic_box_is_empty([DyadicRange(Fraction(1, 2)), DyadicRange(8), DyadicRange(8), DyadicRange(8)])
    assert not dyadic_box_is_empty([DyadicRange(1), DyadicRange(2), DyadicRange(4), DyadicRange(Fraction(1, 2))])


def test_count_dyadic_contains_worked_point(counter, worked_point):
    x, _, z = worked_point
    X = [DyadicRange(dyadic_base(abs(c))) for c in x]
    Z = [DyadicRange(dyadic_base(v)) for v in z]
    count = counter.count_dyadic(X, Z, 6)
    assert count >= 2
    grid = counter.dyadic_grid(6)
    assert grid[(tuple(r.base for r in X), tuple(r.base for r in Z))] == count


def test_count_dyadic_empty_box(counter):
    X = [DyadicRange(Fraction(1, 2)), DyadicRange(8), DyadicRange(8), DyadicRange(8)]
    Z = [DyadicRange(Fraction(1, 2))] * 6
    assert counter.count_dyadic(X, Z, 20) == 0
    with pytest.raises(ValueError):
        counter.count_dyadic(X[:3], Z, 20)


def test_dyadic_grid_partitions_the_count(counter):
    assert sum(counter.dyadic_grid(12).values()) == 296


def test_iter_points(counter):
    points = set(counter.iter_points(6))
    assert len(points) == 128
    assert CayleyPoint(2, 3, 6, -1) in points
    assert points == set(counter.iter_points(6, NAIVE))


def test_z_signature(worked_point):
    x, _, _ = worked_point
    assert z_signature(x) == {'12': 1, '13': 2, '14': 1, '23': 3, '24': 1, '34': 1}


def test_capacity_and_domain_errors():
    small = PointCounter(oracle_limit=10, torsor_limit=20, workers=1)
    with pytest.raises(CapacityError):
        small.count_naive(11)
    with pytest.raises(CapacityError):
        small.count_torsor(21)
    with pytest.raises(ValueError):
        small.count(Fraction(1, 2))
    with pytest.raises(ValueError):
        small.count(5, 'abacus')


def test_count_log(counter):
    counter.count(6)
    summary = counter.get_count_summary()
    assert summary.iloc[-1]['operation'] == 'count_torsor'
    assert summary.iloc[-1]['result'] == 128


def test_worker_count_does_not_change_results():
    single = PointCounter(workers=1).height_profile(15, TORSOR)
    pooled = PointCounter(workers=2).height_profile(15, TORSOR)
    assert single == pooled


def test_engines_agree_up_to_two_hundred(counter):
    assert counter.height_profile(200, NAIVE) == counter.height_profile(200, TORSOR)


def test_signed_permutations_of_the_worked_point(counter):
    points = set(counter.iter_points(6))
    for perm in permutations((2, 3, 6, -1)):
        assert CayleyPoint.of(perm) in points
        assert CayleyPoint.of(-c for c in perm) in points


def test_star_identity_for_every_small_height(counter):
    for B in range(1, 101):
        assert counter.count_star(B, DIRECT) == counter.count_star(B, CONVOLUTION), B


def test_every_tuple_is_canonical_up_to_one_hundred():
    failures = [(t, verify_tuple(t)) for t in iter_torsor_tuples(100) if verify_tuple(t)]
    assert failures == []


def test_torsor_blocks_cover_every_tuple():
    blocks = torsor_blocks(40)
    assert all(math.gcd(z12, z13) == 1 and z12 * z13 <= 40 for z12, z13, _ in blocks)
    covered = {(t.z[0], t.z[1]) for t in iter_torsor_tuples(40)}
    assert covered <= {(z12, z13) for z12, z13, _ in blocks}

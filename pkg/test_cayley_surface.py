from itertools import permutations

from hypothesis import given
from hypothesis import strategies as st

from src.geometry.cayley_surface import (
    ALL_LINES,
    SINGULAR_POINTS,
    CayleyPoint,
    LineKind,
    all_lines,
    evaluate_cubic,
    in_open_subset_u,
    is_primitive,
    is_singular_point,
    line_membership,
    on_surface,
)

coords = st.integers(min_value=-1000, max_value=1000)


def test_nine_lines():
    lines = all_lines()
    assert len(lines) == 9
    assert len(set(lines)) == 9
    assert sum(1 for line in lines if line.kind is LineKind.PAIR_SUM) == 3
    assert sum(1 for line in lines if line.kind is LineKind.DOUBLE_ZERO) == 6
    assert "X1+X2=X3+X4=0" in {str(line) for line in ALL_LINES}


def test_worked_point_is_in_u(worked_point):
    x, _, _ = worked_point
    assert evaluate_cubic(x) == 0
    assert on_surface(x)
    assert line_membership(x) == set()
    assert in_open_subset_u(x)
    assert in_open_subset_u(x.negate())


def test_points_on_two_pair_sum_lines():
    x = CayleyPoint(1, -1, -1, 1)
    names = {str(line) for line in line_membership(x)}
    assert names == {"X1+X2=X3+X4=0", "X1+X3=X2+X4=0"}
    assert on_surface(x)
    assert not in_open_subset_u(x)

    y = CayleyPoint(1, 1, -1, -1)
    assert len(line_membership(y)) == 2


def test_zero_vector():
    zero = CayleyPoint(0, 0, 0, 0)
    assert len(line_membership(zero)) == 9
    assert not on_surface(zero)
    assert not in_open_subset_u(zero)
    assert not is_primitive(zero)


def test_singular_points():
    assert len(SINGULAR_POINTS) == 4
    for point in SINGULAR_POINTS:
        assert is_singular_point(point)
        assert on_surface(point)
        # each node lies on three of the double-zero lines
        assert len(line_membership(point)) == 3
    assert not is_singular_point(CayleyPoint(1, 1, 0, 0))


def test_double_zero_points_are_on_the_surface():
    x = CayleyPoint(0, 0, 5, -7)
    assert on_surface(x)
    assert {str(line) for line in line_membership(x)} == {"X1=X2=0"}


def test_primitive():
    assert is_primitive(CayleyPoint(2, 3, 6, -1))
    assert not is_primitive(CayleyPoint(2, 4, 6, -2))


@given(coords, coords, coords, coords)
def test_cubic_is_symmetric(a, b, c, d):
    value = evaluate_cubic(CayleyPoint(a, b, c, d))
    for perm in permutations((a, b, c, d)):
        assert evaluate_cubic(CayleyPoint.of(perm)) == value


@given(coords, coords, coords, coords, st.integers(min_value=-20, max_value=20))
def test_cubic_is_homogeneous(a, b, c, d, scale):
    x = CayleyPoint(a, b, c, d)
    scaled = CayleyPoint.of(scale * v for v in x)
    assert evaluate_cubic(scaled) == scale ** 3 * evaluate_cubic(x)


@given(coords, coords, coords, coords)
def test_line_membership_is_invariant_under_negation(a, b, c, d):
    x = CayleyPoint(a, b, c, d)
    assert line_membership(x) == line_membership(x.negate())
    assert in_open_subset_u(x) == in_open_subset_u(x.negate())


def test_points_of_u_have_no_zero_coordinate(counter):
    points = list(counter.iter_points(30))
    assert len(points) == 2264
    for x in points:
        assert all(c != 0 for c in x), x
        assert in_open_subset_u(x) and on_surface(x)

from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.enumeration.point_counter import PointCounter
from src.geometry.cayley_surface import CayleyPoint
from src.geometry.torsor import (
    CONSTRAINT_EQUATIONS,
    NONZERO_Y,
    PARTIAL_SUMS_NONZERO,
    POSITIVE_Z,
    TORSOR_EQUATION,
    Y_PAIRWISE_COPRIME,
    Y_Z_COPRIME,
    Z_PAIRWISE_COPRIME,
    TorsorCoords,
    check_quadratic_identity,
    complementary_sums_vanish,
    decompose,
    decomposition_to_dict,
    fits_height,
    is_admissible,
    reconstruct,
    v_matrix,
    validate,
    verify_point,
    verify_tuple,
)
from src.utils.errors import InvalidTorsorError, NotInOpenSubsetError, NotPrimitiveError


def test_decompose_worked_point(worked_point):
    x, y, z = worked_point
    sign, t = decompose(x)
    assert sign == 1
    assert t.y == y
    assert t.z == z
    assert t.z_(1, 3) == 2 and t.z_(3, 2) == 3
    assert reconstruct(t) == x


def test_decompose_second_example():
    sign, t = decompose(CayleyPoint(-1, 2, 4, 4))
    assert sign == 1
    assert t.y == (2, -1, -1, -1)
    assert t.z == (1, 1, 1, 1, 1, 2)
    assert t.A == (2, 2, 1, 1)
    assert t.B == (1, 1, 2, 2)
    assert t.P == 2


def test_v_matrix_of_worked_point(worked_point):
    _, y, z = worked_point
    v = v_matrix(TorsorCoords(y, z))
    assert v == {(1, 2): -5, (1, 3): -2, (1, 4): 1, (2, 3): -1, (2, 4): 2, (3, 4): 5}


def test_identities_on_worked_point(worked_point):
    _, y, z = worked_point
    t = TorsorCoords(y, z)
    assert complementary_sums_vanish(t)
    assert check_quadratic_identity(t)
    assert verify_tuple(t) == []


def test_decompose_rejects_bad_input():
    with pytest.raises(NotPrimitiveError):
        decompose(CayleyPoint(4, 6, 12, -2))
    with pytest.raises(NotInOpenSubsetError):
        decompose(CayleyPoint(1, -1, 1, -1))
    with pytest.raises(NotInOpenSubsetError):
        decompose(CayleyPoint(1, 2, 3, 4))
    # both errors are also ValueErrors
    with pytest.raises(ValueError):
        decompose(CayleyPoint(0, 0, 0, 1))


def test_validate_reports_each_violation():
    assert validate(TorsorCoords((-1, -1, -1, 1), (1, 2, 1, 3, 1, 1))) == []
    assert NONZERO_Y in validate(TorsorCoords((0, -1, -1, 1), (1, 2, 1, 3, 1, 1)))
    assert POSITIVE_Z in validate(TorsorCoords((-1, -1, -1, 1), (1, -2, 1, 3, 1, 1)))
    assert Z_PAIRWISE_COPRIME in validate(TorsorCoords((-1, -1, -1, 1), (1, 2, 2, 3, 1, 1)))
    assert Y_PAIRWISE_COPRIME in validate(TorsorCoords((2, 2, -1, 1), (1, 1, 1, 1, 1, 1)))
    assert TORSOR_EQUATION in validate(TorsorCoords((1, 1, 1, 1), (1, 1, 1, 1, 1, 1)))
    # A1 y1 + A2 y2 = 0 with the full sum still zero
    assert PARTIAL_SUMS_NONZERO in validate(TorsorCoords((1, -1, 1, -1), (1, 1, 1, 1, 1, 1)))


def test_reconstruct_raises_with_violations():
    with pytest.raises(InvalidTorsorError) as excinfo:
        reconstruct(TorsorCoords((1, 1, 1, 1), (1, 1, 1, 1, 1, 1)))
    assert TORSOR_EQUATION in excinfo.value.violations
    assert excinfo.value.equations == [CONSTRAINT_EQUATIONS[v] for v in excinfo.value.violations]
    assert "A1 y1 + A2 y2 + A3 y3 + A4 y4 = 0" in str(excinfo.value)


def test_every_constraint_names_its_equation():
    labels = [NONZERO_Y, POSITIVE_Z, Z_PAIRWISE_COPRIME, Y_PAIRWISE_COPRIME,
              Y_Z_COPRIME, TORSOR_EQUATION, PARTIAL_SUMS_NONZERO]
    assert sorted(CONSTRAINT_EQUATIONS) == sorted(labels)
    assert all('=' in CONSTRAINT_EQUATIONS[label] or '>' in CONSTRAINT_EQUATIONS[label] for label in labels)


def test_build_from_mapping():
    z = {(1, 2): 1, (1, 3): 2, (1, 4): 1, (2, 3): 3, (2, 4): 1, (3, 4): 1}
    t = TorsorCoords.build([-1, -1, -1, 1], z)
    assert t == TorsorCoords((-1, -1, -1, 1), (1, 2, 1, 3, 1, 1))
    assert is_admissible(t)


def test_fits_height(worked_point):
    _, y, z = worked_point
    t = TorsorCoords(y, z)
    assert fits_height(t, 6)
    assert not fits_height(t, 5)
    assert fits_height(t, "11/2") is False


def test_decomposition_to_dict(worked_point):
    _, y, z = worked_point
    payload = decomposition_to_dict(1, TorsorCoords(y, z))
    assert payload['sign'] == 1
    assert payload['y'] == list(y)
    assert payload['z'] == {'12': 1, '13': 2, '14': 1, '23': 3, '24': 1, '34': 1}
    assert payload['v']['34'] == 5
    assert payload['P'] == 6


def test_round_trip_for_every_point_up_to_one_hundred(counter):
    points = list(counter.iter_points(100))
    assert len(points) == counter.count_naive(100).N
    for x in points:
        sign, t = decompose(x)
        assert reconstruct(t) == x
        assert fits_height(t, 100)
        assert verify_point(x) == []


@lru_cache(maxsize=1)
def _points_up_to_twenty():
    return sorted(PointCounter(workers=1).iter_points(20), key=lambda p: p.as_tuple())


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=1063))
def test_negation_flips_every_y(index):
    x = _points_up_to_twenty()[index]
    _, t = decompose(x)
    _, negated = decompose(x.negate())
    assert negated == t.negate()
    assert reconstruct(t.negate()) == x.negate()

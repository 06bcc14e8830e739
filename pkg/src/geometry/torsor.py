"""
Torsor coordinates for points of U.

A primitive point x of U is written as x_i = B_i y_j y_k y_l with non-zero
y_1..y_4 and positive, pairwise coprime z_ij (one per unordered pair), where

    B_i = z_ij z_ik z_il,    A_i = z_jk z_jl z_kl,    P = prod z_ij = A_i B_i,

subject to  A_1 y_1 + A_2 y_2 + A_3 y_3 + A_4 y_4 = 0.  Here i, j, k, l always
denote distinct indices from {1, 2, 3, 4}.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Tuple

from src.arith.number_theory import hcf
from src.geometry.cayley_surface import CayleyPoint, in_open_subset_u, is_primitive
from src.utils.errors import (
    InternalInconsistencyError,
    InvalidTorsorError,
    NotInOpenSubsetError,
    NotPrimitiveError,
)

Pair = Tuple[int, int]

PAIRS: Tuple[Pair, ...] = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
PAIR_INDEX: Dict[Pair, int] = {pair: n for n, pair in enumerate(PAIRS)}
COMPLEMENTARY_PAIRINGS: Tuple[Tuple[Pair, Pair], ...] = (
    ((1, 2), (3, 4)),
    ((1, 3), (2, 4)),
    ((1, 4), (2, 3)),
)

# Constraint names reported by validate()
NONZERO_Y = 'nonzero_y'
POSITIVE_Z = 'positive_z'
Z_PAIRWISE_COPRIME = 'z_pairwise_coprime'
Y_PAIRWISE_COPRIME = 'y_pairwise_coprime'
Y_Z_COPRIME = 'y_z_coprime'
TORSOR_EQUATION = 'torsor_equation'
PARTIAL_SUMS_NONZERO = 'partial_sums_nonzero'

# The equation each constraint name stands for
CONSTRAINT_EQUATIONS: Dict[str, str] = {
    NONZERO_Y: 'y_i != 0',
    POSITIVE_Z: 'z_ij > 0',
    Z_PAIRWISE_COPRIME: 'hcf(z_ab, z_cd) = 1 for distinct pairs {a,b}, {c,d}',
    Y_PAIRWISE_COPRIME: 'hcf(y_i, y_j) = 1 for i != j',
    Y_Z_COPRIME: 'hcf(y_i, z_ij) = 1 for j != i',
    TORSOR_EQUATION: 'A1 y1 + A2 y2 + A3 y3 + A4 y4 = 0',
    PARTIAL_SUMS_NONZERO: 'A1 y1 + Am ym != 0 for m = 2, 3, 4',
}


def pair_key(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


def others(*indices: int) -> Tuple[int, ...]:
    return tuple(m for m in (1, 2, 3, 4) if m not in indices)


@dataclass(frozen=True)
class TorsorCoords:
    y: Tuple[int, int, int, int]
    # z values in PAIRS order: z12, z13, z14, z23, z24, z34
    z: Tuple[int, int, int, int, int, int]

    @classmethod
    def build(cls, y, z) -> 'TorsorCoords':
        """Accept z either as a 6-sequence in PAIRS order or as a mapping keyed by pairs."""
        if isinstance(z, dict):
            z = tuple(int(z[pair]) for pair in PAIRS)
        return cls(tuple(int(v) for v in y), tuple(int(v) for v in z))

    def y_(self, i: int) -> int:
        return self.y[i - 1]

    def z_(self, i: int, j: int) -> int:
        return self.z[PAIR_INDEX[pair_key(i, j)]]

    @property
    def A(self) -> Tuple[int, int, int, int]:
        result = []
        for i in (1, 2, 3, 4):
            j, k, l = others(i)
            result.append(self.z_(j, k) * self.z_(j, l) * self.z_(k, l))
        return tuple(result)

    @property
    def B(self) -> Tuple[int, int, int, int]:
        result = []
        for i in (1, 2, 3, 4):
            j, k, l = others(i)
            result.append(self.z_(i, j) * self.z_(i, k) * self.z_(i, l))
        return tuple(result)

    @property
    def P(self) -> int:
        return math.prod(self.z)

    def negate(self) -> 'TorsorCoords':
        return TorsorCoords(tuple(-v for v in self.y), self.z)

    def linear_form(self) -> int:
        return sum(a * y for a, y in zip(self.A, self.y))

    def to_dict(self) -> dict:
        return {
            'y': list(self.y),
            'z': {f"{i}{j}": self.z_(i, j) for i, j in PAIRS},
            'A': list(self.A),
            'B': list(self.B),
            'P': self.P,
        }


def validate(t: TorsorCoords) -> List[str]:
    """One entry per violated constraint; an empty list means t is admissible."""
    violations = []
    if any(v == 0 for v in t.y):
        violations.append(NONZERO_Y)
    if any(v <= 0 for v in t.z):
        violations.append(POSITIVE_Z)
    if any(math.gcd(t.z[a], t.z[b]) != 1 for a in range(6) for b in range(a + 1, 6)):
        violations.append(Z_PAIRWISE_COPRIME)
    if any(math.gcd(t.y_(i), t.y_(j)) != 1 for i, j in PAIRS):
        violations.append(Y_PAIRWISE_COPRIME)
    if any(math.gcd(t.y_(i), t.z_(i, j)) != 1 for i in (1, 2, 3, 4) for j in others(i)):
        violations.append(Y_Z_COPRIME)
    if t.linear_form() != 0:
        violations.append(TORSOR_EQUATION)
    A, y = t.A, t.y
    if any(A[0] * y[0] + A[m] * y[m] == 0 for m in (1, 2, 3)):
        violations.append(PARTIAL_SUMS_NONZERO)
    return violations


def is_admissible(t: TorsorCoords) -> bool:
    return not validate(t)


def reconstruct(t: TorsorCoords) -> CayleyPoint:
    violations = validate(t)
    if violations:
        raise InvalidTorsorError(violations, [CONSTRAINT_EQUATIONS[v] for v in violations])
    B = t.B
    coords = []
    for i in (1, 2, 3, 4):
        j, k, l = others(i)
        coords.append(B[i - 1] * t.y_(j) * t.y_(k) * t.y_(l))
    return CayleyPoint.of(coords)


def decompose(x: CayleyPoint) -> Tuple[int, TorsorCoords]:
    """
    Torsor coordinates of a primitive U-point.

    Returns (sign, t) with sign * x == reconstruct(t). Both x and -x are
    representable (negate every y), so the sign is always +1; it is returned
    so callers never have to assume that.
    """
    if not is_primitive(x):
        raise NotPrimitiveError(f"{x.as_tuple()} is not primitive")
    if not in_open_subset_u(x):
        raise NotInOpenSubsetError(f"{x.as_tuple()} is not in U")

    coords = x.as_tuple()
    y_abs = [hcf([coords[m - 1] for m in others(i)]) for i in (1, 2, 3, 4)]

    z_single = []
    for i in (1, 2, 3, 4):
        j, k, l = others(i)
        divisor = y_abs[j - 1] * y_abs[k - 1] * y_abs[l - 1]
        if coords[i - 1] % divisor:
            raise InternalInconsistencyError(f"y_j y_k y_l does not divide x_{i} for {coords}")
        z_single.append(coords[i - 1] // divisor)

    z = tuple(math.gcd(z_single[i - 1], z_single[j - 1]) for i, j in PAIRS)
    provisional = TorsorCoords(tuple(y_abs), z)

    # z_i = w_i B_i with w_i = +-1
    w = []
    for B_i, z_i in zip(provisional.B, z_single):
        if z_i not in (B_i, -B_i):
            raise InternalInconsistencyError(f"z_i / B_i is not a unit for {coords}")
        w.append(1 if z_i == B_i else -1)

    # s_j s_k s_l = sign * w_i forces s_i = sign * S * w_i with S = w_1 w_2 w_3 w_4
    sign = 1
    S = math.prod(w)
    y = tuple(sign * S * w_i * y_i for w_i, y_i in zip(w, y_abs))
    t = TorsorCoords(y, z)

    violations = validate(t)
    if violations:
        raise InternalInconsistencyError(f"decomposition of {coords} violates {violations}")
    if reconstruct(t).as_tuple() != tuple(sign * c for c in coords):
        raise InternalInconsistencyError(f"decomposition of {coords} does not reconstruct")
    return sign, t


def v_matrix(t: TorsorCoords) -> Dict[Pair, int]:
    """v_ij = (z_ik z_il y_j + z_jk z_jl y_i) / z_ij, an exact division for admissible t."""
    result = {}
    for i, j in PAIRS:
        k, l = others(i, j)
        numerator = t.z_(i, k) * t.z_(i, l) * t.y_(j) + t.z_(j, k) * t.z_(j, l) * t.y_(i)
        if numerator % t.z_(i, j):
            raise InternalInconsistencyError(f"z_{i}{j} does not divide the v_{i}{j} numerator")
        result[(i, j)] = numerator // t.z_(i, j)
    return result


def v_entry(v: Dict[Pair, int], i: int, j: int) -> int:
    return v[pair_key(i, j)]


def complementary_sums_vanish(t: TorsorCoords) -> bool:
    v = v_matrix(t)
    return all(v[first] + v[second] == 0 for first, second in COMPLEMENTARY_PAIRINGS)


def check_quadratic_identity(t: TorsorCoords) -> bool:
    """v_ij v_ik = z_il^2 y_j y_k - z_jk^2 y_i y_l for every choice of distinct i, j, k."""
    v = v_matrix(t)
    for i, j, k in permutations((1, 2, 3, 4), 3):
        (l,) = others(i, j, k)
        lhs = v_entry(v, i, j) * v_entry(v, i, k)
        rhs = t.z_(i, l) ** 2 * t.y_(j) * t.y_(k) - t.z_(j, k) ** 2 * t.y_(i) * t.y_(l)
        if lhs != rhs:
            return False
    return True


def fits_height(t: TorsorCoords, bound) -> bool:
    """
    max|x_i| <= bound expressed in torsor variables:
    A_i A_j A_k |y_i y_j y_k| <= bound * P for every omitted index l.
    """
    bound = Fraction(bound)
    A, P = t.A, t.P
    for l in (1, 2, 3, 4):
        i, j, k = others(l)
        lhs = A[i - 1] * A[j - 1] * A[k - 1] * abs(t.y_(i) * t.y_(j) * t.y_(k))
        if lhs > bound * P:
            return False
    return True


def decomposition_to_dict(sign: int, t: TorsorCoords) -> dict:
    payload = {'sign': sign}
    payload.update(t.to_dict())
    payload['v'] = {f"{i}{j}": value for (i, j), value in v_matrix(t).items()}
    return payload


def verify_point(x: CayleyPoint) -> List[str]:
    """Round trip and identity suite for one primitive U-point; returns failure labels."""
    failures = []
    sign, t = decompose(x)
    if reconstruct(t).as_tuple() != tuple(sign * c for c in x):
        failures.append('round_trip')
    failures.extend(verify_tuple(t, check_canonical=False))
    return failures


def verify_tuple(t: TorsorCoords, check_canonical: bool = True) -> List[str]:
    failures = []
    if validate(t):
        failures.append('validate')
        return failures
    if check_canonical:
        x = reconstruct(t)
        if decompose(x) != (1, t):
            failures.append('canonical')
        if reconstruct(t.negate()) != x.negate():
            failures.append('negation')
    if not complementary_sums_vanish(t):
        failures.append('complementary_sums')
    if not check_quadratic_identity(t):
        failures.append('quadratic_identity')
    if any(a * b != t.P for a, b in zip(t.A, t.B)):
        failures.append('P_equals_AB')
    return failures

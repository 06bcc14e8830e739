"""
The Cayley cubic  X2X3X4 + X1X3X4 + X1X2X4 + X1X2X3 = 0  in projective 3-space,
its nine lines and the open subset U left after removing them.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import FrozenSet, Iterator, List, Set, Tuple

from src.arith.number_theory import hcf

INDICES = (1, 2, 3, 4)


@dataclass(frozen=True)
class CayleyPoint:
    x1: int
    x2: int
    x3: int
    x4: int

    @classmethod
    def of(cls, coords) -> 'CayleyPoint':
        x1, x2, x3, x4 = (int(c) for c in coords)
        return cls(x1, x2, x3, x4)

    def __iter__(self) -> Iterator[int]:
        return iter((self.x1, self.x2, self.x3, self.x4))

    def coord(self, i: int) -> int:
        return self.as_tuple()[i - 1]

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.x1, self.x2, self.x3, self.x4)

    def negate(self) -> 'CayleyPoint':
        return CayleyPoint(-self.x1, -self.x2, -self.x3, -self.x4)

    def height(self) -> int:
        return max(abs(c) for c in self)

    def is_zero(self) -> bool:
        return not any(self)


class LineKind(Enum):
    PAIR_SUM = 'pair_sum'
    DOUBLE_ZERO = 'double_zero'


@dataclass(frozen=True)
class LineId:
    kind: LineKind
    # PAIR_SUM: the partition {{i,j},{k,l}}; DOUBLE_ZERO: the pair {i,j}
    indices: FrozenSet

    def __str__(self) -> str:
        if self.kind is LineKind.DOUBLE_ZERO:
            i, j = sorted(self.indices)
            return f"X{i}=X{j}=0"
        first, second = sorted(tuple(sorted(part)) for part in self.indices)
        return f"X{first[0]}+X{first[1]}=X{second[0]}+X{second[1]}=0"


def _pair_sum_lines() -> List[LineId]:
    lines = []
    for j in (2, 3, 4):
        k, l = (m for m in (2, 3, 4) if m != j)
        partition = frozenset({frozenset({1, j}), frozenset({k, l})})
        lines.append(LineId(LineKind.PAIR_SUM, partition))
    return lines


def _double_zero_lines() -> List[LineId]:
    return [LineId(LineKind.DOUBLE_ZERO, frozenset(pair)) for pair in combinations(INDICES, 2)]


ALL_LINES: Tuple[LineId, ...] = tuple(_pair_sum_lines() + _double_zero_lines())

SINGULAR_POINTS: Tuple[CayleyPoint, ...] = (
    CayleyPoint(1, 0, 0, 0),
    CayleyPoint(0, 1, 0, 0),
    CayleyPoint(0, 0, 1, 0),
    CayleyPoint(0, 0, 0, 1),
)


def all_lines() -> Tuple[LineId, ...]:
    return ALL_LINES


def evaluate_cubic(x: CayleyPoint) -> int:
    x1, x2, x3, x4 = x
    return x2 * x3 * x4 + x1 * x3 * x4 + x1 * x2 * x4 + x1 * x2 * x3


def on_surface(x: CayleyPoint) -> bool:
    return not x.is_zero() and evaluate_cubic(x) == 0


def is_primitive(x: CayleyPoint) -> bool:
    return hcf(x.as_tuple()) == 1


def is_singular_point(x: CayleyPoint) -> bool:
    """True for the four nodes: exactly one non-zero coordinate."""
    return sum(1 for c in x if c) == 1


def line_membership(x: CayleyPoint) -> Set[LineId]:
    # Containment in a line through the origin; the zero vector lies on all nine.
    coords = x.as_tuple()
    found = set()
    for line in ALL_LINES:
        if line.kind is LineKind.DOUBLE_ZERO:
            if all(coords[i - 1] == 0 for i in line.indices):
                found.add(line)
        elif all(sum(coords[i - 1] for i in part) == 0 for part in line.indices):
            found.add(line)
    return found


def in_open_subset_u(x: CayleyPoint) -> bool:
    return on_surface(x) and not line_membership(x)

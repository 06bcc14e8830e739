import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Real = Union[int, float, str, Fraction]


def to_fraction(value: Real) -> Fraction:
    """Exact rational from an int, a Fraction, a decimal/ratio string or a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10 ** 12)
    return Fraction(value)


def half_open_integers(lo: Real, hi: Real) -> range:
    """Integers n with lo < n <= hi."""
    return range(math.floor(to_fraction(lo)) + 1, math.floor(to_fraction(hi)) + 1)


@dataclass(frozen=True)
class DyadicRange:
    """The half-open interval (K, 2K]."""

    base: Fraction

    def __post_init__(self):
        base = to_fraction(self.base)
        if base <= 0:
            raise ValueError(f"dyadic base must be positive, got {self.base}")
        object.__setattr__(self, 'base', base)

    @classmethod
    def parse(cls, text: str) -> 'DyadicRange':
        return cls(Fraction(text.strip()))

    @property
    def lower(self) -> Fraction:
        return self.base

    @property
    def upper(self) -> Fraction:
        return 2 * self.base

    def contains(self, value: Real) -> bool:
        value = to_fraction(value)
        return self.lower < value <= self.upper

    def integers(self) -> range:
        return half_open_integers(self.lower, self.upper)

    def __str__(self) -> str:
        return str(self.base)

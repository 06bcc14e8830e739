"""
Exact counters for the four dyadic-box equations

    N1:  n1 n2 n3   + n4 n5 n6   = n7 n8
    N2:  n1 n2 n3   = n4 n5 n6   + n7 n8
    N3:  n1^2 n2 n3 + n4^2 n5 n6 = n7 n8
    N4:  n1^2 n2 n3 - n4^2 n5 n6 = n7 n8

with K_i < n_i <= 2K_i for i <= 7, n8 any positive integer and
hcf(n1 n2 n3, n4 n5 n6) = 1.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.config import config
from src.arith.intervals import DyadicRange, Real, to_fraction
from src.arith.number_theory import positive_divisors
from src.utils.errors import CapacityError
from src.utils.logging_setup import setup_logger
from src.utils.parallel import ordered_map

N1, N2, N3, N4 = 'N1', 'N2', 'N3', 'N4'
VARIANTS = (N1, N2, N3, N4)
SQUARED = {N3, N4}
# sign of the second product in "first +- second = n7 n8"
SECOND_SIGN = {N1: 1, N2: -1, N3: 1, N4: -1}

SCAN_COLUMNS = ['variant', 'K1', 'K2', 'K3', 'K4', 'K5', 'K6', 'K7', 'count', 'bound_value', 'ratio']
# dyadic exponents drawn for random scans: K = 2^(k-1) with 0 <= k <= SCAN_MAX_EXPONENT
SCAN_MAX_EXPONENT = 6


@dataclass(frozen=True)
class DyadicTuple7:
    K: Tuple[Fraction, ...]

    def __post_init__(self):
        K = tuple(to_fraction(k) for k in self.K)
        if len(K) != 7:
            raise ValueError(f"expected seven dyadic bases, got {len(K)}")
        if any(k <= 0 for k in K):
            raise ValueError(f"dyadic bases must be positive, got {[str(k) for k in K]}")
        object.__setattr__(self, 'K', K)

    @classmethod
    def parse(cls, text: str) -> 'DyadicTuple7':
        return cls(tuple(Fraction(part.strip()) for part in text.split(',')))

    def __getitem__(self, i: int) -> Fraction:
        """1-based access, K[1] .. K[7]."""
        return self.K[i - 1]

    def ranges(self) -> List[range]:
        return [DyadicRange(k).integers() for k in self.K]

    @property
    def volume(self) -> Fraction:
        return math.prod(self.K[:6])

    def swap_blocks(self) -> 'DyadicTuple7':
        return DyadicTuple7(self.K[3:6] + self.K[0:3] + self.K[6:])


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")


def _check_budget(K: DyadicTuple7, budget: Optional[int]):
    limit = config.EMPIRICAL_BUDGET if budget is None else budget
    if K.volume > limit:
        raise CapacityError('dyadic_equation_count', float(K.volume), limit, 'K1...K6')


def _products(first: range, second: range, third: range, squared: bool) -> Dict[int, List[Tuple[int, int, int]]]:
    grouped = defaultdict(list)
    for m1 in first:
        lead = m1 * m1 if squared else m1
        for m2 in second:
            for m3 in third:
                grouped[lead * m2 * m3].append((m1, m2, m3))
    return grouped


def _divisors_in(value: int, span: range) -> List[int]:
    if len(span) <= 2 * math.isqrt(value) + 1:
        return [n for n in span if value % n == 0]
    return [d for d in positive_divisors(value) if d in span]


def _residual(variant: str, a: int, b: int) -> int:
    return a + SECOND_SIGN[variant] * b


def count_dyadic_equation(variant: str, K: DyadicTuple7, budget: Optional[int] = None) -> int:
    _check_variant(variant)
    _check_budget(K, budget)
    r = K.ranges()
    squared = variant in SQUARED
    firsts = {a: len(t) for a, t in _products(r[0], r[1], r[2], squared).items()}
    seconds = {b: len(t) for b, t in _products(r[3], r[4], r[5], squared).items()}
    count = 0
    for a, mult_a in firsts.items():
        for b, mult_b in seconds.items():
            if math.gcd(a, b) != 1:
                continue
            residual = _residual(variant, a, b)
            if residual <= 0:
                continue
            count += mult_a * mult_b * len(_divisors_in(residual, r[6]))
    return count


def count_lemma3(variant: str, K: DyadicTuple7, budget: Optional[int] = None) -> int:
    if variant not in (N1, N2):
        raise ValueError(f"count_lemma3 takes N1 or N2, got {variant!r}")
    return count_dyadic_equation(variant, K, budget)


def count_lemma4(variant: str, K: DyadicTuple7, budget: Optional[int] = None) -> int:
    if variant not in (N3, N4):
        raise ValueError(f"count_lemma4 takes N3 or N4, got {variant!r}")
    return count_dyadic_equation(variant, K, budget)


def iter_solutions(variant: str, K: DyadicTuple7, budget: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Each counted solution as (n1, ..., n8)."""
    _check_variant(variant)
    _check_budget(K, budget)
    r = K.ranges()
    squared = variant in SQUARED
    firsts = _products(r[0], r[1], r[2], squared)
    seconds = _products(r[3], r[4], r[5], squared)
    for a, first_triples in firsts.items():
        for b, second_triples in seconds.items():
            if math.gcd(a, b) != 1:
                continue
            residual = _residual(variant, a, b)
            if residual <= 0:
                continue
            for n7 in _divisors_in(residual, r[6]):
                for first in first_triples:
                    for second in second_triples:
                        yield first + second + (n7, residual // n7)


def verify_solution(variant: str, K: DyadicTuple7, n: Sequence[int]) -> List[str]:
    """Re-substitute one solution; returns the failed checks."""
    failures = []
    n1, n2, n3, n4, n5, n6, n7, n8 = n
    squared = variant in SQUARED
    a = (n1 * n1 if squared else n1) * n2 * n3
    b = (n4 * n4 if squared else n4) * n5 * n6
    if a + SECOND_SIGN[variant] * b != n7 * n8:
        failures.append('equation')
    if math.gcd(n1 * n2 * n3, n4 * n5 * n6) != 1:
        failures.append('coprime_products')
    if math.gcd(a, b) != 1 or math.gcd(a, n7 * n8) != 1 or math.gcd(b, n7 * n8) != 1:
        failures.append('coprime_terms')
    if n8 < 1 or any(not DyadicRange(k).contains(v) for k, v in zip(K.K, n[:7])):
        failures.append('ranges')
    return failures


def bound_value(variant: str, K: DyadicTuple7) -> float:
    """The shape of the upper bound for each equation, implied constant taken as 1."""
    _check_variant(variant)
    value = float(K.volume)
    if variant in (N1, N2):
        return value
    skew = float(K[1] ** 2 * K[2] * K[3] / (K[4] ** 2 * K[5] * K[6])) ** 0.25
    value *= max(skew, 1 / skew)
    if variant == N4:
        # clamped so the factor stays >= 1 when K1 K4 < 1
        value *= 1 + max(0.0, math.log(K[1] * K[4])) / float(K[2] * K[3] * K[5] * K[6]) ** (1 / 3)
    return value


def random_tuple(rng: np.random.Generator, budget: int) -> DyadicTuple7:
    while True:
        exponents = rng.integers(0, SCAN_MAX_EXPONENT + 1, size=7)
        K = DyadicTuple7(tuple(Fraction(2 ** int(k), 2) for k in exponents))
        if K.volume <= budget:
            return K


def _scan_trial(args: Tuple[str, np.random.SeedSequence, int]) -> Dict:
    variant, seed, budget = args
    K = random_tuple(np.random.default_rng(seed), budget)
    return scan_row(variant, K, budget)


def scan_row(variant: str, K: DyadicTuple7, budget: Optional[int] = None) -> Dict:
    count = count_dyadic_equation(variant, K, budget)
    bound = bound_value(variant, K)
    row = {'variant': variant}
    row.update({f"K{i}": float(K[i]) for i in range(1, 8)})
    row.update({'count': count, 'bound_value': bound, 'ratio': count / bound})
    return row


class DyadicEquationScanner:
    def __init__(self, budget: Optional[int] = None, workers: Optional[int] = None):
        self.budget = config.EMPIRICAL_BUDGET if budget is None else budget
        self.workers = workers
        self.logger = self._setup_logger()
        self.scan_log = []

    def _setup_logger(self) -> logging.Logger:
        return setup_logger(__name__)

    def _log_scan(self, operation: str, details: Dict):
        self.scan_log.append({'timestamp': datetime.now(), 'operation': operation, 'details': details})
        self.logger.info(f"Scan: {operation} - {details}")

    def ratio_scan(self, variant: str, trials: int, seed: int, budget: Optional[int] = None) -> pd.DataFrame:
        _check_variant(variant)
        if trials < 0:
            raise ValueError(f"trials must be non-negative, got {trials}")
        budget = self.budget if budget is None else budget
        children = np.random.SeedSequence(seed).spawn(trials)
        rows = ordered_map(_scan_trial, [(variant, child, budget) for child in children], self.workers, chunksize=4)
        frame = pd.DataFrame(rows, columns=SCAN_COLUMNS)
        max_ratio = float(frame['ratio'].max()) if len(frame) else None
        self._log_scan('ratio_scan', {'variant': variant, 'trials': trials, 'seed': seed, 'max_ratio': max_ratio})
        return frame

    def count_rows(self, variant: str, K: DyadicTuple7, budget: Optional[int] = None) -> pd.DataFrame:
        budget = self.budget if budget is None else budget
        frame = pd.DataFrame([scan_row(variant, K, budget)], columns=SCAN_COLUMNS)
        self._log_scan('count', {'variant': variant, 'K': [str(k) for k in K.K]})
        return frame

    def verify(self, variant: str, K: DyadicTuple7,
               budget: Optional[int] = None) -> List[Tuple[Tuple[int, ...], List[str]]]:
        """Solutions failing re-substitution, with their failed checks."""
        budget = self.budget if budget is None else budget
        failures = []
        seen = 0
        for solution in iter_solutions(variant, K, budget):
            seen += 1
            failed = verify_solution(variant, K, solution)
            if failed:
                failures.append((solution, failed))
        if failures:
            self.logger.error(f"{len(failures)} of {seen} {variant} solutions failed re-substitution")
        self._log_scan('verify', {'variant': variant, 'solutions': seen, 'failures': len(failures)})
        return failures

    def n4_growth_trend(self, Ks: Sequence[Real] = (8, 16, 32)) -> pd.DataFrame:
        """N4 / (K1 K4) for K1 = K4 = K7 = K and K2 = K3 = K5 = K6 = 1/2."""
        half = Fraction(1, 2)
        rows = []
        for k in Ks:
            k = to_fraction(k)
            K = DyadicTuple7((k, half, half, k, half, half, k))
            count = count_lemma4(N4, K, self.budget)
            rows.append({'K': float(k), 'count': count, 'ratio': count / float(k * k)})
        frame = pd.DataFrame(rows, columns=['K', 'count', 'ratio'])
        increasing = bool(frame['ratio'].is_monotonic_increasing and frame['ratio'].is_unique)
        self._log_scan('n4_growth_trend', {'K': [float(k) for k in Ks], 'strictly_increasing': increasing})
        return frame

    def get_scan_summary(self) -> pd.DataFrame:
        return pd.DataFrame(self.scan_log)

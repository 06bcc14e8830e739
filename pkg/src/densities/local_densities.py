"""
Local densities of the torsor equation and the lower-bound main term.

Densities stay exact (Fraction) throughout; only the report tables convert to
floating point.
"""

import logging
import math
import time
from datetime import datetime
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from config.config import config
from src.arith.intervals import Real, to_fraction
from src.arith.number_theory import (
    divisor_count_k,
    euler_phi,
    is_prime,
    is_squarefree,
    positive_divisors,
    primes_up_to,
)
from src.enumeration.point_counter import TORSOR, CountReport, PointCounter
from src.utils.errors import CapacityError
from src.utils.logging_setup import setup_logger

GENERIC = 'generic'
SPECIAL = 'special'
DEFAULT_DELTA = Fraction(1, 84)
FIXED_Z_COLUMNS = ['z', 'B', 'count', 'main_term', 'ratio']


def _require_prime(p: int):
    if not is_prime(p):
        raise ValueError(f"expected a prime, got {p}")


def local_density_generic(p: int) -> Fraction:
    _require_prime(p)
    return 1 - Fraction(6, p ** 2) + Fraction(5, p ** 3)


def local_density_special(p: int, e: int) -> Fraction:
    """Density at a prime dividing z_12 exactly e times."""
    _require_prime(p)
    if e < 1:
        raise ValueError(f"exponent must be at least 1, got {e}")
    return (1 - Fraction(1, p)) * (1 - Fraction(1, p ** 2)) / Fraction(p) ** (2 * e)


def _no_two_divisible(columns: Sequence[np.ndarray], p: int) -> np.ndarray:
    ok = np.ones(columns[0].shape, dtype=bool)
    for first, second in combinations(columns, 2):
        ok &= ~((first % p == 0) & (second % p == 0))
    return ok


def generic_solution_count(p: int) -> int:
    """Quadruples mod p with x1 + x2 + x3 + x4 = 0 and no two coordinates divisible by p."""
    x1, x2, x3 = (axis.ravel() for axis in np.indices((p, p, p)))
    x4 = (-(x1 + x2 + x3)) % p
    return int(_no_two_divisible((x1, x2, x3, x4), p).sum())


def special_solution_count(p: int) -> int:
    """
    Quadruples with 1 <= x1, x2 <= p^2, 1 <= x3, x4 <= p, x1 x2 prime to p,
    no two coordinates divisible by p and x1 + x2 + p x3 + p x4 = 0 mod p^2.
    """
    modulus = p * p
    x1, x3, x4 = (axis.ravel() + 1 for axis in np.indices((modulus, p, p)))
    # x2 is determined modulo p^2, taken in [1, p^2]
    x2 = (-(x1 + p * x3 + p * x4)) % modulus
    x2 = np.where(x2 == 0, modulus, x2)
    ok = (x1 % p != 0) & (x2 % p != 0) & _no_two_divisible((x1, x2, x3, x4), p)
    return int(ok.sum())


def brute_force_density(p: int, variant: str = GENERIC, e: Optional[int] = None,
                        prime_limit: Optional[int] = None) -> Fraction:
    _require_prime(p)
    limit = config.DENSITY_PRIME_LIMIT if prime_limit is None else prime_limit
    if p > limit:
        raise CapacityError('brute_force_density', p, limit, 'prime')
    if variant == GENERIC:
        return Fraction(generic_solution_count(p), p ** 3)
    if variant == SPECIAL:
        if e is None or e < 1:
            raise ValueError(f"the special density needs an exponent e >= 1, got {e}")
        return Fraction(special_solution_count(p), p ** (2 * e + 4))
    raise ValueError(f"unknown density variant {variant!r}")


def singular_product_exact(p_max: int) -> Fraction:
    if p_max < 2:
        raise ValueError(f"p_max must be at least 2, got {p_max}")
    return math.prod((local_density_generic(p) for p in primes_up_to(p_max)), start=Fraction(1))


def singular_product(p_max: int) -> float:
    return float(singular_product_exact(p_max))


def _largest_root(B: Fraction, delta: Fraction) -> int:
    """Largest integer P >= 1 with P^q <= B^p where delta = p/q."""
    num, den = delta.numerator, delta.denominator
    target = B ** num
    P = max(1, math.floor(float(B) ** float(delta)))
    while P > 1 and P ** den > target:
        P -= 1
    while (P + 1) ** den <= target:
        P += 1
    return P


def lower_bound_sum(B: Real, delta: Real = DEFAULT_DELTA, budget: Optional[int] = None) -> Fraction:
    """Sum over square-free P <= B^delta of d_6(P) (B/P) (phi(P)/P)."""
    B, delta = to_fraction(B), to_fraction(delta)
    if B < 1:
        raise ValueError(f"B must be at least 1, got {B}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    P_max = _largest_root(B, delta)
    limit = config.CELL_BUDGET if budget is None else budget
    if P_max > limit:
        raise CapacityError('lower_bound_sum', P_max, limit, 'terms')
    total = Fraction(0)
    for P in range(1, P_max + 1):
        if is_squarefree(P):
            total += divisor_count_k(P, 6) * (B / P) * Fraction(euler_phi(P), P)
    return total


def fixed_z_main_term(z: Sequence[int], B: Real) -> Fraction:
    """(B/P)(phi(P)/P) for P the product of the z_ij."""
    P = math.prod(z)
    return to_fraction(B) / P * Fraction(euler_phi(P), P)


def count_coprime_factorizations(P: int, parts: int = 6) -> int:
    """Ordered pairwise coprime factorisations of P into `parts` positive factors."""
    if P < 1 or parts < 1:
        raise ValueError(f"need P >= 1 and parts >= 1, got P={P}, parts={parts}")
    if parts == 1:
        return 1
    # the first factor must be prime to what is left for the others
    return sum(
        count_coprime_factorizations(P // d, parts - 1)
        for d in positive_divisors(P)
        if math.gcd(d, P // d) == 1
    )


class DensityReporter:
    def __init__(self, counter: Optional[PointCounter] = None):
        self.counter = counter or PointCounter()
        self.logger = self._setup_logger()
        self.report_log = []

    def _setup_logger(self) -> logging.Logger:
        return setup_logger(__name__)

    def _log_report(self, operation: str, rows: int, details: str = ""):
        self.report_log.append({
            'timestamp': datetime.now(),
            'operation': operation,
            'rows': rows,
            'details': details,
        })
        self.logger.info(f"Report: {operation} - {rows} rows {details}")

    def density_table(self, p_max: int, special_e: Optional[int] = None) -> pd.DataFrame:
        rows = []
        for p in primes_up_to(p_max):
            formula = local_density_generic(p)
            brute = brute_force_density(p, GENERIC)
            rows.append(self._density_row(p, GENERIC, None, formula, brute))
            if special_e is not None:
                formula = local_density_special(p, special_e)
                brute = brute_force_density(p, SPECIAL, special_e)
                rows.append(self._density_row(p, SPECIAL, special_e, formula, brute))
        table = pd.DataFrame(rows, columns=['p', 'variant', 'e', 'density_formula', 'density_bruteforce', 'equal'])
        table['e'] = table['e'].astype('Int64')
        mismatches = int((table['equal'] == 0).sum())
        if mismatches:
            self.logger.error(f"{mismatches} densities disagree with their brute-force count")
        self._log_report('density_table', len(table), f"p_max={p_max}, special_e={special_e}")
        return table

    @staticmethod
    def _density_row(p: int, variant: str, e: Optional[int], formula: Fraction, brute: Fraction) -> dict:
        return {
            'p': p,
            'variant': variant,
            'e': e,
            'density_formula': float(formula),
            'density_bruteforce': float(brute),
            'equal': int(formula == brute),
        }

    def ratio_report(self, ladder: Iterable[Real], method: str = TORSOR) -> List[CountReport]:
        ladder = [to_fraction(B) for B in ladder]
        if any(B <= 1 for B in ladder):
            raise ValueError(f"every rung must exceed 1, got {[str(B) for B in ladder]}")
        if not ladder:
            return []
        # one enumeration up to the top rung; heights are integers, so N(B) = N(floor B)
        start = time.perf_counter()
        profile = self.counter.height_profile(max(ladder), method)
        elapsed = time.perf_counter() - start
        reports = [CountReport(B, profile[math.floor(B)], method, elapsed_seconds=elapsed) for B in ladder]
        self._log_report('ratio_report', len(reports), f"method={method}, enumeration {elapsed:.1f}s")
        return reports

    def fixed_z_report(self, z: Sequence[int], heights: Iterable[Real]) -> pd.DataFrame:
        """count_for_fixed_z against (B/P)(phi(P)/P) at each height."""
        rows = []
        for B in heights:
            count = self.counter.count_for_fixed_z(z, B)
            main_term = fixed_z_main_term(z, B)
            rows.append({
                'z': ','.join(str(v) for v in z),
                'B': float(to_fraction(B)),
                'count': count,
                'main_term': float(main_term),
                'ratio': count / float(main_term),
            })
        table = pd.DataFrame(rows, columns=FIXED_Z_COLUMNS)
        self._log_report('fixed_z_report', len(table), f"z={tuple(z)}")
        return table

    @staticmethod
    def reports_to_frame(reports: Iterable[CountReport]) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in reports], columns=['B', 'N', 'Nstar', 'ratio', 'method'])

    def get_report_summary(self) -> pd.DataFrame:
        return pd.DataFrame(self.report_log)

"""
Counting engines for points on the Cayley cubic.

Two independent ways to compute N(B), the number of primitive integer vectors
of U with max|x_i| <= B:

* naive: a numpy oracle that solves the cubic for x4 over a grid of (x2, x3)
  for each x1;
* torsor: an enumerator over admissible (y, z) tuples, each of which is one
  vector of U.

Both feed N*(B), line counts and dyadic-box counts. Worker functions are
module level so they can be shipped to a process pool.
"""

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.config import config
from src.arith.intervals import DyadicRange, Real, to_fraction
from src.arith.number_theory import coprime_pairs, solve_linear_congruence
from src.geometry.cayley_surface import CayleyPoint
from src.geometry.torsor import PAIRS, TorsorCoords, decompose
from src.lattice.lattice_counter import ap_range
from src.utils.errors import CapacityError
from src.utils.logging_setup import setup_logger
from src.utils.parallel import ordered_map

NAIVE = 'naive'
TORSOR = 'torsor'
METHODS = (NAIVE, TORSOR)
DIRECT = 'direct'
CONVOLUTION = 'convolution'

ZTuple = Tuple[int, int, int, int, int, int]
YTuple = Tuple[int, int, int, int]
XTuple = Tuple[int, int, int, int]


@dataclass
class CountReport:
    B: Fraction
    N: int
    method: str
    Nstar: Optional[int] = None
    elapsed_seconds: float = 0.0

    @property
    def ratio(self) -> Optional[float]:
        """N / (B (ln B)^6), defined for B > 1."""
        if self.B <= 1:
            return None
        B = float(self.B)
        return self.N / (B * math.log(B) ** 6)

    def to_dict(self, include_timing: bool = False) -> Dict:
        B = int(self.B) if self.B.denominator == 1 else float(self.B)
        payload = {'B': B, 'N': self.N, 'Nstar': self.Nstar, 'ratio': self.ratio, 'method': self.method}
        if include_timing:
            payload['elapsed_seconds'] = self.elapsed_seconds
        return payload


# ---------------------------------------------------------------------------
# naive oracle


def _nonzero_range(b: int) -> np.ndarray:
    return np.concatenate([np.arange(-b, 0), np.arange(1, b + 1)]).astype(np.int64)


def naive_block(x1: int, b: int, primitive: bool = True) -> np.ndarray:
    """All vectors of U with the given x1 and max|x_i| <= b, one per row."""
    values = _nonzero_range(b)
    x2, x3 = (grid.ravel() for grid in np.meshgrid(values, values, indexing='ij'))
    s = x1 * (x2 + x3) + x2 * x3
    p = x1 * x2 * x3

    keep = s != 0
    x2, x3, s, p = x2[keep], x3[keep], s[keep], p[keep]
    keep = p % s == 0
    x2, x3, s, p = x2[keep], x3[keep], s[keep], p[keep]
    x4 = -(p // s)

    # with no zero coordinate, U fails exactly when some x1 + x_j vanishes
    keep = (np.abs(x4) <= b) & (x1 + x2 != 0) & (x1 + x3 != 0) & (x1 + x4 != 0)
    points = np.stack([np.full(int(keep.sum()), x1, dtype=np.int64), x2[keep], x3[keep], x4[keep]], axis=1)
    if primitive and len(points):
        points = points[np.gcd.reduce(points, axis=1) == 1]
    return points


def _naive_heights(args: Tuple[int, int, bool]) -> np.ndarray:
    x1, b, primitive = args
    points = naive_block(x1, b, primitive)
    return np.bincount(np.abs(points).max(axis=1), minlength=b + 1) if len(points) else np.zeros(b + 1, np.int64)


def surface_block(x1: int, b: int) -> np.ndarray:
    """Every non-zero integer vector on the cubic with the given x1 and max|x_i| <= b."""
    values = np.arange(-b, b + 1, dtype=np.int64)
    x2, x3 = (grid.ravel() for grid in np.meshgrid(values, values, indexing='ij'))
    s = x1 * (x2 + x3) + x2 * x3
    p = x1 * x2 * x3

    solved = s != 0
    s_safe = np.where(solved, s, 1)
    solved &= p % s_safe == 0
    x4 = -(p // s_safe)
    solved &= np.abs(x4) <= b
    determined = np.stack([np.full(int(solved.sum()), x1, dtype=np.int64), x2[solved], x3[solved], x4[solved]], axis=1)

    # s = p = 0 leaves x4 unconstrained
    free = (s == 0) & (p == 0)
    count = int(free.sum())
    undetermined = np.stack([
        np.full(count * len(values), x1, dtype=np.int64),
        np.repeat(x2[free], len(values)),
        np.repeat(x3[free], len(values)),
        np.tile(values, count),
    ], axis=1)

    points = np.concatenate([determined, undetermined])
    return points[np.any(points != 0, axis=1)]


def on_lines_mask(points: np.ndarray) -> np.ndarray:
    x1, x2, x3, x4 = points.T
    double_zero = (points == 0).sum(axis=1) >= 2
    pair_sum = (
        ((x1 + x2 == 0) & (x3 + x4 == 0))
        | ((x1 + x3 == 0) & (x2 + x4 == 0))
        | ((x1 + x4 == 0) & (x2 + x3 == 0))
    )
    return double_zero | pair_sum


def _surface_counts(args: Tuple[int, int]) -> Tuple[int, int]:
    """(primitive surface vectors, primitive vectors on a line) for one x1."""
    x1, b = args
    points = surface_block(x1, b)
    if not len(points):
        return 0, 0
    points = points[np.gcd.reduce(points, axis=1) == 1]
    return len(points), int(on_lines_mask(points).sum())


# ---------------------------------------------------------------------------
# torsor enumerator


def iter_admissible_z(b: int, candidates: Optional[Sequence[Sequence[int]]] = None) -> Iterator[ZTuple]:
    """
    Pairwise coprime positive (z12, z13, z14, z23, z24, z34) with every B_i <= b.

    By default each z_ij runs up to sqrt(2b): v_ij is a non-zero integer on U,
    and z_ij^2 <= |z_ij v_ij| z_ij = |B_i y_j + B_j y_i| <= 2b. Candidate lists
    must be increasing.
    """
    if b < 1:
        return
    if candidates is None:
        top = math.isqrt(2 * b)
        candidates = [range(1, top + 1)] * 6
    c12, c13, c14, c23, c24, c34 = candidates
    for z12 in c12:
        for z13 in c13:
            if z12 * z13 > b:
                break
            if math.gcd(z12, z13) != 1:
                continue
            for z14 in c14:
                B1 = z12 * z13 * z14
                if B1 > b:
                    break
                if math.gcd(z14, z12 * z13) != 1:
                    continue
                for z23 in c23:
                    if z12 * z23 > b or z13 * z23 > b:
                        break
                    if math.gcd(z23, B1) != 1:
                        continue
                    for z24 in c24:
                        if z12 * z23 * z24 > b or z14 * z24 > b:
                            break
                        if math.gcd(z24, B1 * z23) != 1:
                            continue
                        for z34 in c34:
                            if z13 * z23 * z34 > b or z14 * z24 * z34 > b:
                                break
                            if math.gcd(z34, B1 * z23 * z24) != 1:
                                continue
                            yield z12, z13, z14, z23, z24, z34


def iter_y_for_z(z: ZTuple, b: int) -> Iterator[Tuple[YTuple, XTuple]]:
    """Admissible y with y1 > 0 for a fixed z-tuple, with the vector they give; max|x_i| <= b."""
    z12, z13, z14, z23, z24, z34 = z
    B1, B2, B3, B4 = z12 * z13 * z14, z12 * z23 * z24, z13 * z23 * z34, z14 * z24 * z34
    A1, A2, A3, A4 = z23 * z24 * z34, z13 * z14 * z34, z12 * z14 * z24, z12 * z13 * z23
    if max(B1, B2, B3, B4) > b:
        return

    # A3 y3 + A4 y4 = -c is solvable only when hcf(A3, A4) divides c
    g = math.gcd(A3, A4)
    modulus = A4 // g
    inverse = pow(A3 // g, -1, modulus) if modulus > 1 else 0

    for y1 in range(1, b // max(B2, B3, B4) + 1):
        if math.gcd(y1, B1) != 1:
            continue
        y2_max = min(b // max(B1, B3, B4), b // (y1 * max(B3, B4)))
        if y2_max == 0:
            continue
        progression = solve_linear_congruence(A2, -A1 * y1, g)
        if progression is None:
            continue
        y2_residue, y2_step = progression
        for y2 in ap_range(-y2_max - 1, y2_max, y2_step, y2_residue):
            if y2 == 0 or math.gcd(y2, y1) != 1 or math.gcd(y2, B2) != 1:
                continue
            c = A1 * y1 + A2 * y2
            if c == 0:
                continue
            y12 = abs(y1 * y2)
            W3, W4 = b // (B4 * y12), b // (B3 * y12)
            if W3 == 0 or W4 == 0:
                continue
            # |y3| <= W3 from x4, |y4| <= W4 from x3
            lo = max(-W3, -((A4 * W4 + c) // A3))
            hi = min(W3, (A4 * W4 - c) // A3)
            if lo > hi:
                continue
            residue = -(c // g) * inverse % modulus
            for y3 in ap_range(lo - 1, hi, modulus, residue):
                if y3 == 0:
                    continue
                y4 = -(c + A3 * y3) // A4
                if y4 == 0:
                    continue
                if math.gcd(y3, y1 * y2) != 1 or math.gcd(y4, y1 * y2 * y3) != 1:
                    continue
                if math.gcd(y3, B3) != 1 or math.gcd(y4, B4) != 1:
                    continue
                if A1 * y1 + A3 * y3 == 0 or A1 * y1 + A4 * y4 == 0:
                    continue
                x = (B1 * y2 * y3 * y4, B2 * y1 * y3 * y4, B3 * y1 * y2 * y4, B4 * y1 * y2 * y3)
                if max(abs(c_) for c_ in x) > b:
                    continue
                yield (y1, y2, y3, y4), x


def torsor_blocks(b: int) -> List[Tuple[int, int, int]]:
    """Work units (z12, z13, b) that split the z-tuple stream into disjoint blocks."""
    top = math.isqrt(2 * b) if b >= 1 else 0
    return [
        (z12, z13, b)
        for z12 in range(1, top + 1)
        for z13 in range(1, min(top, b // z12) + 1)
        if math.gcd(z12, z13) == 1
    ]


def _torsor_heights(args: Tuple[int, int, int]) -> np.ndarray:
    """max|x_i| of every y1 > 0 tuple whose z-tuple starts with (z12, z13)."""
    z12, z13, b = args
    top = math.isqrt(2 * b)
    candidates = [(z12,), (z13,)] + [range(1, top + 1)] * 4
    heights = [
        max(abs(c) for c in x)
        for z in iter_admissible_z(b, candidates)
        for _, x in iter_y_for_z(z, b)
    ]
    return np.array(heights, dtype=np.int64)


def iter_torsor_tuples(b: int) -> Iterator[TorsorCoords]:
    """Every admissible tuple with max|x_i| <= b, both signs of y."""
    for z in iter_admissible_z(b):
        for y, _ in iter_y_for_z(z, b):
            t = TorsorCoords(y, z)
            yield t
            yield t.negate()


def dyadic_base(n: int) -> Fraction:
    """The K with K < n <= 2K among 1/2, 1, 2, 4, ..."""
    return Fraction(2 ** (n - 1).bit_length(), 2)


def dyadic_box_is_empty(X: Sequence[DyadicRange]) -> bool:
    """
    True when no vector of U can have X_i < |x_i| <= 2X_i for all i.

    On U, 1/|x_i| <= sum over j != i of 1/|x_j|, which fails throughout the box
    once sum over j != i of 2 X_i / X_j <= 1 for some i.
    """
    bases = [r.base for r in X]
    for i in range(4):
        if sum(2 * bases[i] / bases[j] for j in range(4) if j != i) <= 1:
            return True
    return False


# ---------------------------------------------------------------------------


class PointCounter:
    def __init__(self, oracle_limit: Optional[int] = None, torsor_limit: Optional[int] = None,
                 workers: Optional[int] = None):
        self.oracle_limit = config.ORACLE_LIMIT if oracle_limit is None else oracle_limit
        self.torsor_limit = config.TORSOR_LIMIT if torsor_limit is None else torsor_limit
        self.workers = workers
        self.logger = self._setup_logger()
        self.count_log = []

    def _setup_logger(self) -> logging.Logger:
        return setup_logger(__name__)

    def _log_count(self, operation: str, B, result, elapsed: float, details: str = ""):
        log_entry = {
            'timestamp': datetime.now(),
            'operation': operation,
            'B': str(B),
            'result': result,
            'elapsed_seconds': elapsed,
            'details': details,
        }
        self.count_log.append(log_entry)
        self.logger.info(f"Count: {operation}(B={B}) = {result} in {elapsed:.3f}s {details}")

    def get_count_summary(self) -> pd.DataFrame:
        return pd.DataFrame(self.count_log)

    def height_bound(self, B: Real, method: str) -> int:
        B = to_fraction(B)
        if B < 1:
            raise ValueError(f"B must be at least 1, got {B}")
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
        b = math.floor(B)
        limit = self.oracle_limit if method == NAIVE else self.torsor_limit
        if b > limit:
            error = CapacityError(f"count_{method}", b, limit, 'height bound')
            self.logger.error(str(error))
            raise error
        return b

    # -- profiles -----------------------------------------------------------

    def _naive_histogram(self, b: int, primitive: bool) -> np.ndarray:
        tasks = [(int(x1), b, primitive) for x1 in _nonzero_range(b)]
        histogram = np.zeros(b + 1, dtype=np.int64)
        for block in ordered_map(_naive_heights, tasks, self.workers, chunksize=8):
            histogram += block
        return histogram

    def _torsor_histogram(self, b: int) -> np.ndarray:
        histogram = np.zeros(b + 1, dtype=np.int64)
        for heights in ordered_map(_torsor_heights, torsor_blocks(b), self.workers, chunksize=8):
            # y and -y
            np.add.at(histogram, heights, 2)
        return histogram

    def height_profile(self, B: Real, method: str = TORSOR) -> List[int]:
        """[N(0), N(1), ..., N(floor B)] from a single enumeration."""
        b = self.height_bound(B, method)
        start = time.perf_counter()
        histogram = self._naive_histogram(b, True) if method == NAIVE else self._torsor_histogram(b)
        profile = [int(v) for v in np.cumsum(histogram)]
        self._log_count('height_profile', B, profile[-1], time.perf_counter() - start, f"method={method}")
        return profile

    # -- N(B) ---------------------------------------------------------------

    def _count(self, B: Real, method: str) -> CountReport:
        b = self.height_bound(B, method)
        start = time.perf_counter()
        if method == NAIVE:
            N = int(self._naive_histogram(b, True).sum())
        else:
            N = int(self._torsor_histogram(b).sum())
        elapsed = time.perf_counter() - start
        self._log_count(f"count_{method}", B, N, elapsed)
        return CountReport(to_fraction(B), N, method, elapsed_seconds=elapsed)

    def count_naive(self, B: Real) -> CountReport:
        return self._count(B, NAIVE)

    def count_torsor(self, B: Real) -> CountReport:
        return self._count(B, TORSOR)

    def count(self, B: Real, method: str = TORSOR, with_star: bool = False) -> CountReport:
        report = self._count(B, method)
        if with_star:
            report.Nstar = self.count_star(B, CONVOLUTION, engine=method)
        return report

    def count_projective(self, B: Real, method: str = TORSOR) -> Fraction:
        """Rational points of U of height at most B; x and -x are one point."""
        return Fraction(self._count(B, method).N, 2)

    def count_star(self, B: Real, method: str = DIRECT, engine: str = TORSOR) -> int:
        """N*(B), the non-primitive vectors of U included."""
        if method == DIRECT:
            b = self.height_bound(B, NAIVE)
            start = time.perf_counter()
            result = int(self._naive_histogram(b, False).sum())
        elif method == CONVOLUTION:
            b = self.height_bound(B, engine)
            start = time.perf_counter()
            histogram = self._naive_histogram(b, True) if engine == NAIVE else self._torsor_histogram(b)
            profile = np.cumsum(histogram)
            # N(B/h) = N(floor(b/h)) since heights are integers
            result = int(sum(int(profile[b // h]) for h in range(1, b + 1)))
        else:
            raise ValueError(f"unknown count_star method {method!r}")
        self._log_count('count_star', B, result, time.perf_counter() - start, f"method={method}")
        return result

    # -- lines and surface ----------------------------------------------------

    def _surface_totals(self, B: Real) -> Tuple[int, int]:
        b = self.height_bound(B, NAIVE)
        tasks = [(x1, b) for x1 in range(-b, b + 1)]
        totals = ordered_map(_surface_counts, tasks, self.workers, chunksize=8)
        return sum(t[0] for t in totals), sum(t[1] for t in totals)

    def count_on_lines(self, B: Real) -> int:
        start = time.perf_counter()
        _, on_lines = self._surface_totals(B)
        self._log_count('count_on_lines', B, on_lines, time.perf_counter() - start)
        return on_lines

    def count_surface_primitive(self, B: Real) -> int:
        """All primitive vectors on the cubic, lines included."""
        start = time.perf_counter()
        total, _ = self._surface_totals(B)
        self._log_count('count_surface_primitive', B, total, time.perf_counter() - start)
        return total

    # -- fixed z and dyadic boxes ---------------------------------------------

    def count_for_fixed_z(self, z: Sequence[int], B: Real) -> int:
        z = tuple(int(v) for v in z)
        if len(z) != 6 or any(v < 1 for v in z) or not coprime_pairs(z):
            error = ValueError(f"z must be six pairwise coprime positive integers, got {z}")
            self.logger.error(str(error))
            raise error
        b = self.height_bound(B, TORSOR)
        start = time.perf_counter()
        result = 2 * sum(1 for _ in iter_y_for_z(z, b))
        self._log_count('count_for_fixed_z', B, result, time.perf_counter() - start, f"z={z}")
        return result

    def count_dyadic(self, X: Sequence[DyadicRange], Z: Sequence[DyadicRange], B: Real) -> int:
        """Vectors of U with X_i < |x_i| <= 2X_i, Z_ij < z_ij <= 2Z_ij and max|x_i| <= B."""
        if len(X) != 4 or len(Z) != 6:
            raise ValueError("count_dyadic needs four X ranges and six Z ranges")
        b = self.height_bound(B, TORSOR)
        start = time.perf_counter()
        if dyadic_box_is_empty(X):
            self._log_count('count_dyadic', B, 0, time.perf_counter() - start, "empty by reciprocal sum")
            return 0
        top = math.isqrt(2 * b)
        candidates = [range(span.start, min(span.stop, top + 1)) for span in (r.integers() for r in Z)]
        result = 0
        for z in iter_admissible_z(b, candidates):
            for _, x in iter_y_for_z(z, b):
                if all(r.contains(abs(c)) for r, c in zip(X, x)):
                    # -x has the same absolute values
                    result += 2
        self._log_count('count_dyadic', B, result, time.perf_counter() - start,
                        f"X={[str(r) for r in X]} Z={[str(r) for r in Z]}")
        return result

    def dyadic_grid(self, B: Real) -> Counter:
        """Counts per dyadic box, keyed by (X bases, Z bases); the boxes partition N(B)."""
        b = self.height_bound(B, TORSOR)
        grid = Counter()
        for z in iter_admissible_z(b):
            z_key = tuple(dyadic_base(v) for v in z)
            for _, x in iter_y_for_z(z, b):
                grid[(tuple(dyadic_base(abs(c)) for c in x), z_key)] += 2
        return grid

    # -- point streams ----------------------------------------------------------

    def iter_points(self, B: Real, method: str = TORSOR) -> Iterator[CayleyPoint]:
        """Every vector counted by N(B), from either engine."""
        b = self.height_bound(B, method)
        if method == NAIVE:
            for x1 in _nonzero_range(b):
                for row in naive_block(int(x1), b):
                    yield CayleyPoint.of(row)
        else:
            for z in iter_admissible_z(b):
                for _, x in iter_y_for_z(z, b):
                    yield CayleyPoint.of(x)
                    yield CayleyPoint.of(x).negate()


def z_signature(x: CayleyPoint) -> Dict[str, int]:
    """z_ij of a vector of U, keyed '12', '13', ..."""
    _, t = decompose(x)
    return {f"{i}{j}": t.z_(i, j) for i, j in PAIRS}

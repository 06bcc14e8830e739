"""
Geometry-of-numbers counting kernels.

Exact counts of primitive vectors on a plane inside a box, of lattice points
inside an origin-centred ellipse, of divisibility lattices and of arithmetic
progressions, next to the closed-form upper bounds they are checked against.
"""

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.config import config
from src.arith.intervals import DyadicRange, Real, to_fraction
from src.utils.errors import BoundViolationError, CapacityError
from src.utils.logging_setup import setup_logger
from src.utils.parallel import ordered_map

PLANE_MAX_COEFFICIENT = 20
PLANE_MAX_HEIGHT = 10
LATTICE_MAX_ENTRY = 10
ELLIPSE_MAX_AREA = 1000


@dataclass(frozen=True)
class PlaneBoxQuery:
    v: Tuple[int, int, int]
    H: Tuple[Fraction, Fraction, Fraction]

    def __post_init__(self):
        v = tuple(int(c) for c in self.v)
        H = tuple(to_fraction(h) for h in self.H)
        if len(v) != 3 or len(H) != 3:
            raise ValueError("a plane-box query needs a 3-vector v and three bounds H")
        if not any(v):
            raise ValueError("v must be non-zero")
        if math.gcd(*v) != 1:
            raise ValueError(f"v must be primitive, got {v}")
        if any(h <= 0 for h in H):
            raise ValueError(f"box bounds must be positive, got {self.H}")
        object.__setattr__(self, 'v', v)
        object.__setattr__(self, 'H', H)


@dataclass(frozen=True)
class Lattice2:
    """Integer lattice spanned by the columns of basis, u = basis . n."""

    basis: Tuple[Tuple[int, int], Tuple[int, int]]

    def __post_init__(self):
        basis = tuple(tuple(int(c) for c in row) for row in self.basis)
        object.__setattr__(self, 'basis', basis)
        if self.determinant == 0:
            raise ValueError(f"lattice basis is degenerate: {basis}")

    @classmethod
    def identity(cls) -> 'Lattice2':
        return cls(((1, 0), (0, 1)))

    @property
    def determinant(self) -> int:
        (m11, m12), (m21, m22) = self.basis
        return m11 * m22 - m12 * m21

    def columns(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        (m11, m12), (m21, m22) = self.basis
        return (m11, m21), (m12, m22)


@dataclass(frozen=True)
class Ellipse:
    """The region a u1^2 + 2 b u1 u2 + c u2^2 <= 1."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ('a', 'b', 'c'):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.a <= 0 or self.discriminant <= 0:
            raise ValueError(f"form ({self.a}, {self.b}, {self.c}) is not positive definite")

    @classmethod
    def disc(cls, radius: Real = 1) -> 'Ellipse':
        r = to_fraction(radius)
        return cls(1 / r ** 2, Fraction(0), 1 / r ** 2)

    @property
    def discriminant(self) -> Fraction:
        return self.a * self.c - self.b ** 2

    @property
    def area(self) -> float:
        return math.pi / math.sqrt(self.discriminant)

    def value(self, u1, u2) -> Fraction:
        return self.a * u1 * u1 + 2 * self.b * u1 * u2 + self.c * u2 * u2


def _check_cells(operation: str, cells: int, cell_budget: Optional[int]):
    budget = config.CELL_BUDGET if cell_budget is None else cell_budget
    if cells > budget:
        raise CapacityError(operation, cells, budget, 'enumeration cells')


def count_primitive_on_plane(q: PlaneBoxQuery, cell_budget: Optional[int] = None) -> int:
    """
    Primitive x with v.x = 0 and |x_i| <= H_i.

    The solved coordinate is the one with v_c != 0 and the largest H_c, so the
    loop runs over the two remaining coordinates.
    """
    candidates = [i for i in range(3) if q.v[i] != 0]
    solved = max(candidates, key=lambda i: (q.H[i], -i))
    free = [i for i in range(3) if i != solved]
    limits = [math.floor(q.H[i]) for i in free]
    _check_cells('count_primitive_on_plane', (2 * limits[0] + 1) * (2 * limits[1] + 1), cell_budget)

    v_c, H_c = q.v[solved], q.H[solved]
    count = 0
    for xa in range(-limits[0], limits[0] + 1):
        partial = q.v[free[0]] * xa
        for xb in range(-limits[1], limits[1] + 1):
            numerator = -(partial + q.v[free[1]] * xb)
            if numerator % v_c:
                continue
            xc = numerator // v_c
            if abs(xc) > H_c:
                continue
            if math.gcd(xa, xb, xc) == 1:
                count += 1
    return count


def plane_box_bound(q: PlaneBoxQuery) -> float:
    """4 + 12 pi H1 H2 H3 / max_i H_i |v_i|."""
    volume = q.H[0] * q.H[1] * q.H[2]
    largest = max(h * abs(c) for h, c in zip(q.H, q.v))
    return 4 + 12 * math.pi * float(volume / largest)


def _gram_form(lattice: Lattice2, ellipse: Ellipse) -> Tuple[int, int, int, int]:
    """Integer (G11, G12, G22, D) with q(basis . n) <= 1 iff G11 n1^2 + 2 G12 n1 n2 + G22 n2^2 <= D."""
    (e1x, e1y), (e2x, e2y) = lattice.columns()
    g11 = ellipse.value(e1x, e1y)
    g22 = ellipse.value(e2x, e2y)
    g12 = ellipse.a * e1x * e2x + ellipse.b * (e1x * e2y + e1y * e2x) + ellipse.c * e1y * e2y
    scale = math.lcm(g11.denominator, g12.denominator, g22.denominator)
    return int(g11 * scale), int(g12 * scale), int(g22 * scale), scale


def iter_ellipse_coefficients(lattice: Lattice2, ellipse: Ellipse,
                              cell_budget: Optional[int] = None) -> Iterator[Tuple[int, int]]:
    """Every n with basis . n inside the ellipse, row by row in n1."""
    G11, G12, G22, D = _gram_form(lattice, ellipse)
    det = G11 * G22 - G12 * G12
    n1_max = math.isqrt(G22 * D // det)
    n2_max = math.isqrt(G11 * D // det)
    _check_cells('count_lattice_in_ellipse', (2 * n1_max + 1) * (2 * n2_max + 1), cell_budget)

    for n1 in range(-n1_max, n1_max + 1):
        # G22 n2^2 + 2 G12 n1 n2 + (G11 n1^2 - D) <= 0
        reduced_disc = G22 * D - det * n1 * n1
        if reduced_disc < 0:
            continue
        root = math.isqrt(reduced_disc)
        lo = (-G12 * n1 - root - 1) // G22
        hi = -((G12 * n1 - root - 1) // G22)
        for n2 in range(lo, hi + 1):
            if G11 * n1 * n1 + 2 * G12 * n1 * n2 + G22 * n2 * n2 <= D:
                yield n1, n2


def count_lattice_in_ellipse(lattice: Lattice2, ellipse: Ellipse, cell_budget: Optional[int] = None) -> int:
    return sum(1 for _ in iter_ellipse_coefficients(lattice, ellipse, cell_budget))


def ellipse_points_span_plane(lattice: Lattice2, ellipse: Ellipse, cell_budget: Optional[int] = None) -> bool:
    """
    True when the lattice points in the ellipse are not all on one line through 0.

    Only then does ellipse_bound hold: the convex hull is a lattice polygon and
    Pick's theorem gives count <= 2 + 2 area / det. Thin ellipses along a short
    lattice vector break it, e.g. basis ((-5, 5), (4, -5)) with form
    (20, 0, 2/43) holds the 9 points k (1, 1), |k| <= 4, against a bound of 6.61.
    """
    first = None
    for n1, n2 in iter_ellipse_coefficients(lattice, ellipse, cell_budget):
        if first is None:
            if n1 or n2:
                first = (n1, n2)
        elif first[0] * n2 - first[1] * n1 != 0:
            return True
    return False


def ellipse_bound(lattice: Lattice2, ellipse: Ellipse) -> float:
    """4 (1 + area / det); asserted only where ellipse_points_span_plane holds."""
    return 4 * (1 + ellipse.area / abs(lattice.determinant))


def divisibility_lattice_det(m1: int, m2: int, m3: int, m4: int) -> int:
    """Index of {n : m_i | n_i (i <= 3), m4 | n1 + n2 + n3} in Z^3."""
    moduli = (m1, m2, m3, m4)
    if any(m < 1 for m in moduli):
        raise ValueError(f"moduli must be positive, got {moduli}")
    return math.prod(moduli) // math.gcd(*moduli)


def divisibility_lattice_index_bruteforce(m1: int, m2: int, m3: int, m4: int) -> int:
    """Same index, counted as L^3 over the number of lattice points in [0, L)^3 with L = lcm(m_i)."""
    moduli = (m1, m2, m3, m4)
    if any(m < 1 for m in moduli):
        raise ValueError(f"moduli must be positive, got {moduli}")
    L = math.lcm(*moduli)
    histograms = [np.bincount(np.arange(0, L, m) % m4, minlength=m4).astype(np.int64) for m in (m1, m2, m3)]
    residues = np.arange(m4)
    needed = (-(residues[:, None] + residues[None, :])) % m4
    points = int((np.outer(histograms[0], histograms[1]) * histograms[2][needed]).sum())
    return L ** 3 // points


def count_in_ap(lo: Real, hi: Real, modulus: int, residue: int) -> int:
    """#{n : lo < n <= hi, n = residue mod modulus}."""
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    lo, hi = to_fraction(lo), to_fraction(hi)
    if hi <= lo:
        return 0
    return math.floor((hi - residue) / modulus) - math.floor((lo - residue) / modulus)


def ap_range(lo: Real, hi: Real, modulus: int, residue: int) -> range:
    """The n counted by count_in_ap, in increasing order."""
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    # n > lo iff n > floor(lo) for integer n; ints skip the Fraction detour
    if not (isinstance(lo, int) and isinstance(hi, int)):
        lo, hi = math.floor(to_fraction(lo)), math.floor(to_fraction(hi))
    first = residue + modulus * ((lo - residue) // modulus + 1)
    return range(first, hi + 1, modulus)


def _dyadic_integers(K: Real) -> range:
    return DyadicRange(to_fraction(K)).integers()


def progression_product_count(K1: Real, K2: Real, K3: Real, a: int, q: int,
                              cell_budget: Optional[int] = None) -> int:
    """Triples n_i in (K_i, 2K_i] with n1 n2 n3 = a mod q."""
    if q < 1 or math.gcd(a, q) != 1:
        raise ValueError(f"need q >= 1 and hcf(a, q) = 1, got a={a}, q={q}")
    first, second = _dyadic_integers(K1), _dyadic_integers(K2)
    _check_cells('progression_product_count', len(first) * len(second), cell_budget)
    K3 = to_fraction(K3)
    count = 0
    for n1 in first:
        for n2 in second:
            partial = n1 * n2
            if math.gcd(partial, q) != 1:
                continue
            target = a * pow(partial, -1, q) % q if q > 1 else 0
            count += count_in_ap(K3, 2 * K3, q, target)
    return count


def progression_coprime_total(K1: Real, K2: Real, K3: Real, q: int, cell_budget: Optional[int] = None) -> int:
    """Triples n_i in (K_i, 2K_i] with hcf(n1 n2 n3, q) = 1."""
    ranges = [_dyadic_integers(K) for K in (K1, K2, K3)]
    _check_cells('progression_coprime_total', math.prod(len(r) for r in ranges), cell_budget)
    return sum(
        1
        for n1 in ranges[0]
        for n2 in ranges[1]
        for n3 in ranges[2]
        if math.gcd(n1 * n2 * n3, q) == 1
    )


def random_plane_query(rng: np.random.Generator) -> PlaneBoxQuery:
    while True:
        v = tuple(int(c) for c in rng.integers(-PLANE_MAX_COEFFICIENT, PLANE_MAX_COEFFICIENT + 1, size=3))
        if any(v) and math.gcd(*v) == 1:
            break
    H = tuple(Fraction(int(h), 10) for h in rng.integers(1, 10 * PLANE_MAX_HEIGHT + 1, size=3))
    return PlaneBoxQuery(v, H)


def random_lattice_and_ellipse(rng: np.random.Generator) -> Tuple[Lattice2, Ellipse]:
    while True:
        entries = [int(c) for c in rng.integers(-LATTICE_MAX_ENTRY, LATTICE_MAX_ENTRY + 1, size=4)]
        if entries[0] * entries[3] - entries[1] * entries[2] != 0:
            break
    lattice = Lattice2(((entries[0], entries[1]), (entries[2], entries[3])))
    while True:
        a = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
        c = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
        b = Fraction(int(rng.integers(-19, 20)), 20) * min(a, c)
        ellipse = Ellipse(a, b, c)
        if ellipse.area <= ELLIPSE_MAX_AREA:
            return lattice, ellipse


def _plane_trial(seed: np.random.SeedSequence) -> Dict:
    q = random_plane_query(np.random.default_rng(seed))
    count = count_primitive_on_plane(q)
    return {'v': q.v, 'H': tuple(str(h) for h in q.H), 'count': count, 'bound': plane_box_bound(q)}


def ellipse_row(lattice: Lattice2, ellipse: Ellipse) -> Dict:
    return {
        'basis': lattice.basis,
        'form': (str(ellipse.a), str(ellipse.b), str(ellipse.c)),
        'count': count_lattice_in_ellipse(lattice, ellipse),
        'bound': ellipse_bound(lattice, ellipse),
        'spans_plane': ellipse_points_span_plane(lattice, ellipse),
    }


def _ellipse_trial(seed: np.random.SeedSequence) -> Dict:
    return ellipse_row(*random_lattice_and_ellipse(np.random.default_rng(seed)))


@dataclass
class BoundCheckResult:
    check: str
    trials: int
    seed: int
    max_ratio: float
    violations: List[Dict] = field(default_factory=list)
    # trials where the bound is not claimed, e.g. collinear ellipse points
    outside_domain: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            'check': self.check,
            'trials': self.trials,
            'seed': self.seed,
            'violations': len(self.violations),
            'max_ratio': self.max_ratio,
            'outside_domain': len(self.outside_domain),
            'outside_domain_over_bound': sum(1 for row in self.outside_domain if row['count'] > row['bound']),
        }


class LatticeBoundChecker:
    """Seeded random drivers for the plane-box and ellipse bounds."""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers
        self.logger = self._setup_logger()
        self.check_log = []

    def _setup_logger(self) -> logging.Logger:
        return setup_logger(__name__)

    def _log_check(self, result: BoundCheckResult):
        entry = {'timestamp': datetime.now()}
        entry.update(result.to_dict())
        self.check_log.append(entry)
        self.logger.info(f"{result.check}: {result.trials} trials, {len(result.violations)} violations, "
                         f"max count/bound {result.max_ratio:.6f}")

    def _run(self, check: str, trial, trials: int, seed: int) -> BoundCheckResult:
        if trials < 0:
            raise ValueError(f"trials must be non-negative, got {trials}")
        children = np.random.SeedSequence(seed).spawn(trials)
        rows = ordered_map(trial, children, self.workers)
        covered = [row for row in rows if row.get('spans_plane', True)]
        outside = [row for row in rows if not row.get('spans_plane', True)]
        violations = [row for row in covered if row['count'] > row['bound']]
        max_ratio = max((row['count'] / row['bound'] for row in covered), default=0.0)
        result = BoundCheckResult(check, trials, seed, max_ratio, violations, outside)
        self._log_check(result)
        for row in violations:
            self.logger.error(f"{check} violated: {row}")
        for row in outside:
            if row['count'] > row['bound']:
                self.logger.warning(f"{check} exceeded on collinear points, outside its domain: {row}")
        return result

    def check_plane_bound(self, trials: int, seed: int) -> BoundCheckResult:
        return self._run('plane_box_bound', _plane_trial, trials, seed)

    def check_ellipse_bound(self, trials: int, seed: int) -> BoundCheckResult:
        return self._run('ellipse_bound', _ellipse_trial, trials, seed)

    def check_plane_query(self, q: PlaneBoxQuery) -> Dict:
        count = count_primitive_on_plane(q)
        bound = plane_box_bound(q)
        row = {'v': q.v, 'H': tuple(str(h) for h in q.H), 'count': count, 'bound': bound}
        self.logger.info(f"plane query {row}")
        return row

    @staticmethod
    def raise_on_violation(result: BoundCheckResult):
        if not result.passed:
            raise BoundViolationError(result.check, result.violations[0])

    def get_check_summary(self) -> pd.DataFrame:
        return pd.DataFrame(self.check_log)


def check_divisibility_lattices(max_product: int) -> List[Tuple[int, int, int, int]]:
    """Every (m1..m4) with product <= max_product where closed form and brute force disagree."""
    mismatches = []
    for m1 in range(1, max_product + 1):
        for m2 in range(1, max_product // m1 + 1):
            for m3 in range(1, max_product // (m1 * m2) + 1):
                for m4 in range(1, max_product // (m1 * m2 * m3) + 1):
                    if divisibility_lattice_det(m1, m2, m3, m4) != divisibility_lattice_index_bruteforce(m1, m2, m3, m4):
                        mismatches.append((m1, m2, m3, m4))
    return mismatches


def check_progression_averaging(q: int, K: Sequence[Real]) -> bool:
    """Sum over residues a coprime to q of the product count equals the coprime total."""
    by_residue = sum(progression_product_count(*K, a, q) for a in range(q) if math.gcd(a, q) == 1)
    return by_residue == progression_coprime_total(*K, q)

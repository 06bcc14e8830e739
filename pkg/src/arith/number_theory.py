"""
Exact elementary number theory shared by every counter.

All functions are pure and work on Python integers, which never wrap around;
factorisation is delegated to sympy (trial division is plenty at desk scale).
"""

import math
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import divisors, factorint, isprime, jacobi_symbol, primerange, totient

ExactInt = int


def hcf(values: Sequence[int]) -> int:
    if len(values) == 0:
        raise ValueError("hcf of an empty list is undefined")
    return math.gcd(*values)


def factorize(n: int) -> Dict[int, int]:
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    return {int(p): int(e) for p, e in factorint(n).items()}


def is_prime(n: int) -> bool:
    return bool(isprime(n))


def primes_up_to(limit: int) -> List[int]:
    return [int(p) for p in primerange(2, limit + 1)]


def mobius(n: int) -> int:
    exponents = factorize(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def is_squarefree(n: int) -> bool:
    return mobius(n) != 0


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"euler_phi expects a positive integer, got {n}")
    return int(totient(n))


def jacobi(a: int, n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    return int(jacobi_symbol(a, n))


def divisor_count_k(n: int, k: int) -> int:
    """Number of ordered k-tuples of positive integers with product n."""
    if n < 1 or k < 1:
        raise ValueError(f"divisor_count_k expects n, k >= 1, got n={n}, k={k}")
    result = 1
    for e in factorize(n).values():
        result *= math.comb(e + k - 1, k - 1)
    return result


def positive_divisors(n: int) -> List[int]:
    return [int(d) for d in divisors(n)]


def solve_linear_congruence(a: int, c: int, m: int) -> Optional[Tuple[int, int]]:
    """
    Solve a*t = c (mod m).

    Returns (residue, modulus) describing every solution, or None when the
    congruence has none.
    """
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    g = math.gcd(a, m)
    if c % g:
        return None
    reduced = m // g
    if reduced == 1:
        return 0, 1
    inverse = pow((a // g) % reduced, -1, reduced)
    return (c // g) * inverse % reduced, reduced


@lru_cache(maxsize=512)
def _square_root_counts(q: int) -> Tuple[int, ...]:
    counts = [0] * q
    for t in range(q):
        counts[t * t % q] += 1
    return tuple(counts)


def rho(q: int, a: int, b: int) -> int:
    """Number of t in [0, q) with t^2 a + b = 0 (mod q), by scanning t."""
    if q < 1:
        raise ValueError(f"rho expects q >= 1, got {q}")
    if math.gcd(a, q) == 1:
        # t^2 = -b/a; the square-count table is itself a scan over t
        target = (-b * pow(a, -1, q)) % q
        return _square_root_counts(q)[target]
    return sum(1 for t in range(q) if (t * t * a + b) % q == 0)


@lru_cache(maxsize=65536)
def _jacobi_divisor_sum(q: int, residue: int) -> int:
    total = 0
    for d in positive_divisors(q):
        if d % 2 == 0 or mobius(d) == 0:
            continue
        total += jacobi(residue, d)
    return total


def rho_jacobi(q: int, a: int, b: int) -> int:
    """Sum over d | q of mu(d)^2 (-ab/d); defined for odd q only."""
    if q < 1 or q % 2 == 0:
        raise ValueError(f"rho_jacobi is stated for odd q, got {q}")
    return _jacobi_divisor_sum(q, (-a * b) % q)


def rho_jacobi_bound(q: int, a: int, b: int) -> int:
    """4 * sum over d | q of mu(d)^2 (-ab/d), the symbol taken as 0 for even d."""
    if q < 1:
        raise ValueError(f"rho_jacobi_bound expects q >= 1, got {q}")
    return 4 * _jacobi_divisor_sum(q, (-a * b) % q)


def coprime_pairs(values: Iterable[int]) -> bool:
    items = list(values)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if math.gcd(items[i], items[j]) != 1:
                return False
    return True

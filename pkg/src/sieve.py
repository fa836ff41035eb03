"""Prime sieving and factorization helpers.

``simple_sieve`` marks composites in a numpy boolean table;
``prime_stream`` extends it segment by segment so callers can pull primes
lazily without a fixed upper limit.

Dependencies:
    numpy, math.
"""

from __future__ import annotations

import math
from typing import Dict, Iterator

import numpy as np

_FIRST_SEGMENT = 1 << 12


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= ``limit`` as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p : limit + 1 : p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def segment_primes(low: int, high: int) -> np.ndarray:
    """Primes in the half-open range ``[low, high)``.

    Args:
        low: Inclusive lower end, >= 2.
        high: Exclusive upper end.

    Returns:
        Sorted int64 array of the primes in range.

    Complexity:
        O((high - low) log log high + sqrt(high)).
    """
    if high <= low:
        return np.array([], dtype=np.int64)
    low = max(low, 2)
    mask = np.ones(high - low, dtype=bool)
    for p in simple_sieve(math.isqrt(high - 1)).tolist():
        start = max(p * p, ((low + p - 1) // p) * p)
        if start >= high:
            continue
        mask[start - low :: p] = False
    return (np.flatnonzero(mask) + low).astype(np.int64)


def prime_stream() -> Iterator[int]:
    """Yield 2, 3, 5, ... without end, sieving in doubling segments."""
    low = 2
    span = _FIRST_SEGMENT
    while True:
        for p in segment_primes(low, low + span).tolist():
            yield int(p)
        low += span
        span *= 2


def prime_count(limit: int) -> int:
    """Number of primes <= ``limit``."""
    return int(simple_sieve(limit).size)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}`` (trial division)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    factors: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors

"""Prime density facts, desk-scale factorization, and the random-prime baseline.

Every primality test performed anywhere in the package goes through
:func:`_count_test`, so callers can prove a code path ran none via
:func:`tally`.
"""

from __future__ import annotations

import math
from collections import Counter
from contextlib import contextmanager
from typing import Iterator

from .prng import PrngState, rand_mod, rand_update

TESTS: Counter = Counter()

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % d for d in range(2, int(p**0.5) + 1))]
# Deterministic for n < 3.3e24.
_DET_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _count_test(kind: str = "primality") -> None:
    TESTS[kind] += 1


@contextmanager
def tally() -> Iterator[Counter]:
    """Yield a Counter that, on exit, holds the tests performed inside the block."""
    before = TESTS.copy()
    delta: Counter = Counter()
    try:
        yield delta
    finally:
        delta.update(TESTS)
        delta.subtract(before)
        for k in [k for k, v in delta.items() if v == 0]:
            del delta[k]


def _mr_round(n: int, a: int, d: int, r: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _split_odd(n: int) -> tuple[int, int]:
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    return d, r


def miller_rabin(n: int, rounds: int = 40, state: PrngState | None = None) -> bool:
    """Probabilistic primality test with bases drawn from ``state``.

    ``False`` means composite for certain; ``True`` errs with probability at
    most ``4**-rounds``.  Without a state, the bases come from a fixed seed.
    """
    _count_test()
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:12]:
        if n % p == 0:
            return n == p
    if state is None:
        state = PrngState.from_seed(b"miller-rabin")
    d, r = _split_odd(n)
    s = state.s1
    for _ in range(rounds):
        a = 2 + rand_mod(s, n - 3)
        s = rand_update(s)
        if not _mr_round(n, a, d, r):
            return False
    return True


def is_probable_prime(n: int) -> bool:
    """Fixed-base Miller-Rabin; deterministic below 3.3e24."""
    _count_test()
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:12]:
        if n % p == 0:
            return n == p
    d, r = _split_odd(n)
    return all(_mr_round(n, a, d, r) for a in _DET_BASES if a % n)


def random_prime(bits: int, state: PrngState) -> int:
    """Random probable prime with exactly ``bits`` bits (odd candidates, top bit set)."""
    if bits < 2:
        raise ValueError(f"bits must be >= 2, got {bits}")
    top = 1 << (bits - 1)
    s = state.s0
    while True:
        n = top | rand_mod(s, top) | 1
        s = rand_update(s)
        if miller_rabin(n, 40, PrngState(s, state.s1)):
            return n


def _pollard_brent(n: int) -> int:
    # n odd composite, not a prime power of a small prime
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard-Brent failed on {n}")


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n >= 1`` as increasing ``(prime, multiplicity)`` pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    found: Counter = Counter()
    for p in _SMALL_PRIMES:
        while n % p == 0:
            found[p] += 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        x = stack.pop()
        if is_probable_prime(x):
            found[x] += 1
            continue
        r = math.isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        g = _pollard_brent(x)
        stack += [g, x // g]
    return sorted(found.items())


def is_b_fat(n: int, b: int) -> bool:
    """True iff ``n`` has a prime divisor ``p >= 2**b``."""
    if n < 1 or b < 1:
        raise ValueError("need n >= 1 and b >= 1")
    if n < (1 << b):
        return False
    return factorize(n)[-1][0] >= 1 << b


def _largest_prime_factors(limit: int) -> list[int]:
    lpf = list(range(limit))
    for p in range(2, limit):
        if lpf[p] == p:
            for k in range(2 * p, limit, p):
                lpf[k] = p
    # lpf now holds the largest prime factor, since larger p overwrite smaller
    return lpf


def count_b_fat(b: int) -> int:
    """Exact number of ``2b``-bit integers having a prime factor ``>= 2**b``."""
    if not 1 <= b <= 12:
        raise ValueError(f"enumeration only feasible for 1 <= b <= 12, got {b}")
    lo, hi = 1 << (2 * b - 1), 1 << (2 * b)
    lpf = _largest_prime_factors(hi)
    bound = 1 << b
    return sum(1 for n in range(lo, hi) if lpf[n] >= bound)


def count_multiples(p: int, b: int) -> int:
    """Number of multiples of ``p`` among the ``2b``-bit integers; needs ``p >= 2**b``."""
    if p < (1 << b):
        raise ValueError(f"need p >= 2^{b}, got {p}")
    lo, hi = 1 << (2 * b - 1), 1 << (2 * b)
    return (hi - 1) // p - (lo - 1) // p

"""Brute-force reference computations, independent of the package code paths."""

from __future__ import annotations

import random


def trial_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_sieve(limit: int) -> list[bool]:
    flags = [True] * limit
    flags[0:2] = [False, False]
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p::p] = [False] * len(range(p * p, limit, p))
    return flags


def rank_mod_p(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        for r in range(len(a)):
            if r != rank and a[r][c]:
                f = a[r][c] * inv % p
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def first_singular_hankel(seq: list[int], p: int, smax: int) -> int | None:
    """Smallest s >= 1 with H_s = [a_{i+j}] singular mod p, or None up to smax."""
    for s in range(1, smax + 1):
        if 2 * s - 1 > len(seq):
            return None
        h = [[seq[i + j] for j in range(s)] for i in range(s)]
        if rank_mod_p(h, p) < s:
            return s
    return None


def necklace_count(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over GF(q), by Moebius inversion."""
    def mu(k):
        f = trial_factor(k)
        return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)

    return sum(mu(k) * q ** (n // k) for k in range(1, n + 1) if n % k == 0) // n


def random_sparse_terms(rng: random.Random, t: int, D: int, H: int):
    exps = rng.sample(range(D), t)
    terms = []
    for e in exps:
        c = 0
        while c == 0:
            c = rng.randint(-H, H)
        terms.append((c, (e,)))
    return terms

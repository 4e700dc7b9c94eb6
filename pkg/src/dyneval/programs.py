"""Hosted algorithms written against the context interface.

Each program takes ``(ctx, x)`` and returns an int.  They run unchanged on
integer and polynomial contexts, prime or composite backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .sparsity import SparsePoly, mbb_from_sparse_poly, sparsity_program


def straight_line(ctx, coeffs):
    """Evaluate a polynomial at a random point; no zero tests, no inversions."""
    r = ctx.rand()
    acc = ctx.from_int(0)
    for c in reversed(coeffs):
        acc = ctx.add(ctx.mul(acc, r), ctx.from_int(c))
    return 0


def poly_zero_test(ctx, coeffs):
    """1 if the integer polynomial vanishes at each of three random points."""
    hits = 0
    for _ in range(3):
        r = ctx.rand()
        acc = ctx.from_int(0)
        for c in reversed(coeffs):
            acc = ctx.add(ctx.mul(acc, r), ctx.from_int(c))
        hits += ctx.is_zero(acc)
    return int(hits == 3)


def binomial_identity(ctx, k):
    """Randomized check that (r+1)^k equals its binomial expansion; returns 1 on a match."""
    from math import comb

    r = ctx.rand()
    lhs = ctx.from_int(1)
    base = ctx.add(r, ctx.from_int(1))
    for _ in range(k):
        lhs = ctx.mul(lhs, base)
    rhs = ctx.from_int(0)
    power = ctx.from_int(1)
    for i in range(k + 1):
        rhs = ctx.add(rhs, ctx.mul(ctx.from_int(comb(k, i)), power))
        power = ctx.mul(power, r)
    return int(ctx.is_zero(ctx.sub(lhs, rhs)))


def iterated_inversion(ctx, steps):
    """x <- 1/x + random; counts the steps where x was zero.  Splits often."""
    x = ctx.rand()
    zeros = 0
    for i in range(steps):
        if ctx.is_zero(x):
            zeros += 1
            x = ctx.add(ctx.from_int(i + 2), ctx.rand())
        else:
            x = ctx.add(ctx.inverse(x), ctx.rand())
    return zeros


def small_divisor_splits(ctx, limit):
    """Zero-test and invert every constant below ``limit``; forces many splits.

    Returns ⊥ (via Bottom) only if some constant vanishes modulo the final modulus.
    """
    acc = ctx.from_int(1)
    for c in range(2, limit):
        v = ctx.from_int(c)
        if not ctx.is_zero(v):
            acc = ctx.mul(acc, ctx.inverse(v))
    return int(ctx.is_zero(acc))


def invert_random(ctx, _x=None):
    """Invert a random element; ⊥ when it is zero after splitting."""
    r = ctx.rand()
    y = ctx.inverse(r)
    return int(ctx.is_zero(ctx.sub(ctx.mul(r, y), ctx.from_int(1))))


def gaussian_rank(ctx, rows):
    """Rank of an integer matrix by elimination over the context."""
    a = [[ctx.from_int(v) for v in row] for row in rows]
    nr, nc = len(a), len(a[0]) if a else 0
    rank = 0
    for col in range(nc):
        piv = None
        for r in range(rank, nr):
            if not ctx.is_zero(a[r][col]):
                piv = r
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = ctx.inverse(a[rank][col])
        for r in range(rank + 1, nr):
            f = ctx.mul(a[r][col], inv)
            a[r] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def bm_sparsity(ctx, poly: SparsePoly):
    """Sparsity counter on the explicit black box of ``poly``."""
    D = max(2, poly.degree() + 1)
    bb = mbb_from_sparse_poly(poly, D, max(2, poly.height))
    return sparsity_program(ctx, bb, D).t


def nonzero_certificate(ctx, x):
    """Decide whether the integer ``N`` is nonzero; returns 1 for "nonzero".

    Computes ``N * prod_{i=1..d} (r - i)`` at a random ``r`` and zero-tests it.
    Over GF(p) it errs only when ``p | N`` or ``r`` lands in ``{1..d}``, so it is
    ``(k, d / 2^b)``-correct with ``k`` the number of primes ``>= 2^b`` dividing ``N``.
    """
    n, d = x
    r = ctx.rand()
    v = ctx.from_int(n)
    for i in range(1, d + 1):
        v = ctx.mul(v, ctx.sub(r, ctx.from_int(i)))
    return 0 if ctx.is_zero(v) else 1


def random_is_zero(ctx, _x=None):
    """Sample one element and zero-test it."""
    return int(ctx.is_zero(ctx.rand()))


@dataclass(frozen=True)
class HostedProgram:
    name: str
    fn: Callable
    input: Any


_SPARSE = SparsePoly(1, [(3, 0), (-7, 5), (11, 9), (2, 14), (-1, 20)])

CORPUS = (
    HostedProgram("straight_line", straight_line, (3, -1, 4, 1, -5, 9, 2, 6)),
    HostedProgram("poly_zero_test", poly_zero_test, (0, 6, -5, 1)),
    HostedProgram("binomial_identity", binomial_identity, 12),
    HostedProgram("iterated_inversion", iterated_inversion, 24),
    HostedProgram("small_divisor_splits", small_divisor_splits, 60),
    HostedProgram("invert_random", invert_random, None),
    HostedProgram("gaussian_rank", gaussian_rank,
                  ((2, 4, 6, 8), (1, 3, 5, 7), (3, 7, 11, 15), (6, 0, 30, 210))),
    HostedProgram("bm_sparsity", bm_sparsity, _SPARSE),
    HostedProgram("nonzero_certificate", nonzero_certificate, (2 * 3 * 5 * 7 * 65537, 8)),
)

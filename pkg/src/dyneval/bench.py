"""Random-prime generation versus a full composite-modulus sparsity run.

Timings are informational only; the one hard check is that the composite
column performs no primality test.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass

from . import density
from .prng import PrngState
from .sparsity import SparsePoly, get_sparsity_integer, mbb_from_sparse_poly

BENCH_POLY = SparsePoly(1, [((-1) ** i * (1000 + 37 * i), 3 * i * i + i) for i in range(12)])


@dataclass
class BenchRow:
    bits: int
    trials: int
    prime_mean: float
    prime_stdev: float
    composite_mean: float
    composite_stdev: float
    composite_t: int
    composite_tests: int


def _timed(fn, trials: int) -> list[float]:
    fn(-1)  # warm-up, discarded
    out = []
    for i in range(trials):
        t0 = time.perf_counter()
        fn(i)
        out.append(time.perf_counter() - t0)
    return out


def bench(bits_list, trials: int = 3, seed: PrngState | None = None) -> list[BenchRow]:
    """One row per modulus bit length: ``bits``-bit prime vs composite run at ``b = bits // 2``."""
    if trials < 3:
        raise ValueError("need at least 3 trials")
    seed = seed or PrngState.from_seed(b"bench")
    D = BENCH_POLY.degree() + 1
    bb = mbb_from_sparse_poly(BENCH_POLY, D, BENCH_POLY.height)
    rows = []
    for bits in bits_list:
        if bits < 4:
            raise ValueError(f"bit length {bits} too small")
        b = bits // 2
        prime_times = _timed(lambda i: density.random_prime(bits, seed.fork(i + 1)), trials)
        results = []
        with density.tally() as used:
            comp_times = _timed(
                lambda i: results.append(get_sparsity_integer(bb, D, 2, seed.fork(i + 1), b=b)),
                trials)
        rows.append(BenchRow(
            bits, trials,
            statistics.fmean(prime_times), statistics.stdev(prime_times),
            statistics.fmean(comp_times), statistics.stdev(comp_times),
            max(r.t for r in results), sum(used.values())))
    return rows


def format_rows(rows: list[BenchRow]) -> str:
    head = f"{'bits':>6} {'prime_mean_s':>13} {'prime_sd':>10} {'composite_mean_s':>17} {'composite_sd':>13} {'t':>3}"
    lines = [head]
    for r in rows:
        lines.append(f"{r.bits:>6} {r.prime_mean:>13.6f} {r.prime_stdev:>10.6f} "
                     f"{r.composite_mean:>17.6f} {r.composite_stdev:>13.6f} {r.composite_t:>3}")
    return "\n".join(lines)


def rows_as_dicts(rows: list[BenchRow]) -> list[dict]:
    return [asdict(r) for r in rows]

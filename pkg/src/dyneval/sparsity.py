"""Counting the nonzero terms of an unknown sparse polynomial from a modular black box.

The black box is probed on a geometric sequence ``f(alpha^(i+1))`` and the
sequence is fed to Berlekamp-Massey, stopping at the first zero discrepancy
that certifies a singular Hankel matrix.  The routine is written once against
the context interface, so it runs over GF(q), modulo a random composite, or
modulo a random polynomial over GF(q) without change.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .dyncore import Bottom, DynContext, _Context
from .prng import coerce_state


@dataclass(frozen=True)
class SparsePoly:
    """Integer polynomial as ``(coeff, exponents)`` terms; zero terms dropped, like terms merged."""

    num_vars: int
    terms: tuple

    def __init__(self, num_vars: int, terms: Iterable[tuple[int, Iterable[int]]]):
        if num_vars < 1:
            raise ValueError("need at least one variable")
        merged: dict[tuple, int] = {}
        for c, e in terms:
            e = (e,) if isinstance(e, int) else tuple(e)
            if len(e) != num_vars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {num_vars} variables")
            merged[e] = merged.get(e, 0) + c
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "terms", tuple(sorted(
            ((c, e) for e, c in merged.items() if c != 0), key=lambda t: t[1])))

    @property
    def sparsity(self) -> int:
        return len(self.terms)

    def degree(self, var: int | None = None) -> int:
        """Max exponent of ``var`` (or max over all variables); -1 for zero."""
        if not self.terms:
            return -1
        if var is None:
            return max(max(e) for _, e in self.terms)
        return max(e[var] for _, e in self.terms)

    @property
    def height(self) -> int:
        return max((abs(c) for c, _ in self.terms), default=0)

    def reduce_mod(self, q: int) -> "SparsePoly":
        return SparsePoly(self.num_vars, [(c % q, e) for c, e in self.terms])


class PolyFileError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def parse_sparse_poly(text: str) -> SparsePoly:
    """Parse the ``nvars K`` / ``COEFF E1 ... EK`` text format."""
    nvars = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if nvars is None:
            if len(fields) != 2 or fields[0] != "nvars" or not re.fullmatch(r"\d+", fields[1]):
                raise PolyFileError(lineno, f"expected 'nvars K', got {raw!r}")
            nvars = int(fields[1])
            if nvars < 1:
                raise PolyFileError(lineno, "nvars must be positive")
            continue
        if len(fields) != nvars + 1:
            raise PolyFileError(lineno, f"expected {nvars + 1} fields, got {len(fields)}")
        if not re.fullmatch(r"[+-]?\d+", fields[0]):
            raise PolyFileError(lineno, f"bad coefficient {fields[0]!r}")
        if not all(re.fullmatch(r"\d+", f) for f in fields[1:]):
            raise PolyFileError(lineno, "exponents must be non-negative integers")
        terms.append((int(fields[0]), tuple(int(f) for f in fields[1:])))
    if nvars is None:
        raise PolyFileError(1, "missing 'nvars K' header")
    return SparsePoly(nvars, terms)


def format_sparse_poly(f: SparsePoly) -> str:
    lines = [f"nvars {f.num_vars}"]
    lines += [" ".join(map(str, (c,) + e)) for c, e in f.terms]
    return "\n".join(lines) + "\n"


def kronecker_substitute(f: SparsePoly, degree_bounds) -> SparsePoly:
    """Univariate image ``f(x, x^D1, x^(D1 D2), ...)``; needs ``bounds[i] > deg_i f``."""
    bounds = tuple(degree_bounds)
    if len(bounds) != f.num_vars:
        raise ValueError("one degree bound per variable required")
    for i, d in enumerate(bounds):
        if f.terms and f.degree(i) >= d:
            raise ValueError(f"degree bound {d} not above degree {f.degree(i)} in variable {i}")
    weights = []
    w = 1
    for d in bounds:
        weights.append(w)
        w *= d
    return SparsePoly(1, [(c, (sum(e_i * w_i for e_i, w_i in zip(e, weights)),))
                          for c, e in f.terms])


class ModularBlackBox:
    """Evaluates an unknown polynomial at any modulus and point; carries bounds D and H.

    ``evaluate`` must be a pure function of ``(modulus, point)``.  Moduli may be
    ints or :class:`~dyneval.polyfield.FieldPoly` values.
    """

    def __init__(self, evaluate, degree_bound: int, height_bound: int, num_vars: int = 1):
        self._evaluate = evaluate
        self.degree_bound = degree_bound
        self.height_bound = height_bound
        self.num_vars = num_vars

    def evaluate(self, modulus, point):
        return self._evaluate(modulus, tuple(point))


def _eval_terms(terms, modulus, point):
    acc = 0
    for c, e in terms:
        term = c
        for th, k in zip(point, e):
            if k:
                term = term * pow(th, k, modulus)
        acc = (acc + term) % modulus
    return acc


def mbb_from_sparse_poly(f: SparsePoly, D: int, H: int) -> ModularBlackBox:
    """Black box for an explicit polynomial; requires ``deg f < D`` and height ``<= H``."""
    if f.degree() >= D:
        raise ValueError(f"degree {f.degree()} not below bound {D}")
    if f.height > H:
        raise ValueError(f"height {f.height} exceeds bound {H}")
    terms = f.terms
    return ModularBlackBox(lambda m, pt: _eval_terms(terms, m, pt), D, H, f.num_vars)


def kronecker_black_box(bb: ModularBlackBox, degree_bounds) -> ModularBlackBox:
    """Univariate black box for ``f(x, x^D1, ...)`` built from a multivariate one."""
    bounds = tuple(degree_bounds)
    weights = [math.prod(bounds[:i]) for i in range(len(bounds))]

    def evaluate(m, pt):
        (x,) = pt
        return bb.evaluate(m, tuple(pow(x, w, m) for w in weights))

    return ModularBlackBox(evaluate, math.prod(bounds), bb.height_bound, 1)


def bit_length_bound(D: int, H: int) -> int:
    """``ceil(4 + 4 log2 D + log2 log2 H)``; ``H`` is clamped up to 2."""
    if D < 2:
        raise ValueError(f"degree bound must be >= 2, got {D}")
    H = max(H, 2)
    return math.ceil(4 + 4 * math.log2(D) + math.log2(math.log2(H)))


class BMResult(NamedTuple):
    t: int
    truncated: bool
    consumed: int


def bm_early_terminate(sequence: Iterable, ctx: _Context, max_terms: int) -> BMResult:
    """Berlekamp-Massey with early termination on the context's arithmetic.

    Stops at the first zero discrepancy met at a step ``n`` with ``2L <= n``
    (``L`` the current generator degree) and returns ``L``.  That step is the
    first singular Hankel matrix ``H_{L+1}``, reached after ``2L + 1`` terms.
    If ``2 * max_terms + 1`` terms pass without it, returns ``max_terms`` truncated.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    it: Iterator = iter(sequence)
    one = ctx.from_int(1)
    conn = [one]      # current connection polynomial, conn[0] = 1
    prev = [one]      # connection polynomial before the last length change
    L, shift, prev_d = 0, 1, one
    seen = []
    for n in range(2 * max_terms + 1):
        seen.append(next(it))
        d = seen[n]
        for i in range(1, L + 1):
            d = ctx.add(d, ctx.mul(conn[i], seen[n - i]))
        if ctx.is_zero(d):
            if 2 * L <= n:
                return BMResult(L, False, n + 1)
            shift += 1
            continue
        coef = ctx.mul(d, ctx.inverse(prev_d))
        new = conn + [ctx.from_int(0)] * max(0, len(prev) + shift - len(conn))
        for i, c in enumerate(prev):
            new[i + shift] = ctx.sub(new[i + shift], ctx.mul(coef, c))
        if 2 * L <= n:
            prev, prev_d, L, shift = conn, d, n + 1 - L, 1
        else:
            shift += 1
        conn = new
    return BMResult(max_terms, True, 2 * max_terms + 1)


class SparsityRun(NamedTuple):
    t: int
    truncated: bool
    probes: int
    modulus: object
    bottom: bool = False


def geometric_probes(ctx: _Context, bb: ModularBlackBox, alpha) -> Iterator:
    """Yields ``f(alpha), f(alpha^2), ...``.

    Starting at ``alpha^1`` keeps ``H_1 = [f(alpha)]`` random; from ``alpha^0``
    it would be the constant coefficient sum.
    """
    power = alpha
    while True:
        yield ctx.probe(bb, power)
        power = ctx.mul(power, alpha)


def sparsity_program(ctx: _Context, bb: ModularBlackBox, D: int | None = None) -> BMResult:
    """Hosted routine: random alpha, probes ``f(alpha^(i+1))``, early-terminated BM."""
    D = bb.degree_bound if D is None else D
    alpha = ctx.rand()
    return bm_early_terminate(geometric_probes(ctx, bb, alpha), ctx, max_terms=D)


def _run(ctx: _Context, bb: ModularBlackBox, D: int) -> SparsityRun:
    try:
        r = sparsity_program(ctx, bb, D)
    except Bottom:
        # one-sided undercount keeps max-of-runs amplification sound
        return SparsityRun(0, False, ctx.probes, ctx.modulus, bottom=True)
    return SparsityRun(r.t, r.truncated, ctx.probes, ctx.modulus)


def get_sparsity_mod_q(bb: ModularBlackBox, D: int, q: int, seed, *, b: int | None = None,
                       record: bool = False) -> SparsityRun:
    """Sparsity of ``f mod q`` for a prime ``q >= 16 D^4``; never above ``#f``."""
    if b is None:
        b = max(1, q.bit_length() - 1)
    ctx = DynContext.prime(q, b, seed, record=record)
    return _run(ctx, bb, D)


def get_sparsity_integer(bb: ModularBlackBox, D: int, H: int, seed, *, b: int | None = None,
                         record: bool = False) -> SparsityRun:
    """Sparsity over Z computed modulo a random ``2b``-bit composite; never above ``#f``."""
    if b is None:
        b = bit_length_bound(D, H)
    ctx = DynContext.composite(b, seed, record=record)
    return _run(ctx, bb, D)


def amplify_sparsity(bb: ModularBlackBox, D: int, H: int, reps: int = 20, seed=None, **kw) -> int:
    """Maximum over ``reps`` independent composite runs."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    state = coerce_state(seed)
    if reps == 1:
        return get_sparsity_integer(bb, D, H, state, **kw).t
    return max(get_sparsity_integer(bb, D, H, state.fork(i), **kw).t for i in range(reps))


def get_sparsity_gf(bb: ModularBlackBox, D: int, q: int, s: int, seed) -> SparsityRun:
    """Sparsity of ``f`` over GF(q) computed modulo a random monic degree-``2s`` polynomial."""
    from .polyfield import PolyContext

    ctx = PolyContext.composite(q, s, seed, record=False)
    return _run(ctx, bb, D)


def extension_degree(q: int, D: int) -> int:
    """Smallest ``s`` with ``q**s >= 16 D^4``."""
    s, need = 1, 16 * D**4
    while q**s < need:
        s += 1
    return s


def smallest_prime_at_least(n: int) -> int:
    from .density import is_probable_prime

    n = max(n, 2)
    while not is_probable_prime(n):
        n += 1
    return n


__all__ = [
    "BMResult", "ModularBlackBox", "PolyFileError", "SparsePoly", "SparsityRun",
    "amplify_sparsity", "bit_length_bound", "bm_early_terminate", "extension_degree",
    "format_sparse_poly", "geometric_probes", "get_sparsity_gf", "get_sparsity_integer",
    "get_sparsity_mod_q", "kronecker_black_box", "kronecker_substitute", "mbb_from_sparse_poly",
    "parse_sparse_poly", "smallest_prime_at_least", "sparsity_program",
]

"""Dynamic evaluation modulo a random monic polynomial over a prime field GF(q).

The polynomial analogue of :mod:`dyneval.dyncore`: a random monic modulus of
degree ``2s`` stands in for a random irreducible of degree ``s``, and no
irreducibility test is ever run on the main path.  Integers and polynomials
correspond through the q-adic expansion, lowest digit first.

Brute-force factorization (:func:`factor_poly`) exists for replay checks and
density counts only; it registers an ``irreducibility`` test in
:data:`dyneval.density.TESTS` on every call.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable

from . import density
from .dyncore import Bottom, ReplayReport, _Context, _same_output, run_hosted, traces_agree
from .prng import CorrelatedPrng, PrngState, coerce_state, rand_mod, rand_update


class FieldPoly:
    """Polynomial over GF(q), coefficients lowest degree first, no trailing zeros.

    Ints mix freely as constants: ``3 * f + 1`` works.  ``pow(f, e, m)`` is
    modular exponentiation.
    """

    __slots__ = ("q", "coeffs")

    def __init__(self, q: int, coeffs: Iterable[int] = ()):
        c = [x % q for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.q = q
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, q, coeffs):
        f = cls.__new__(cls)
        f.q = q
        f.coeffs = coeffs
        return f

    @classmethod
    def x(cls, q: int) -> "FieldPoly":
        return cls(q, (0, 1))

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def _coerce(self, other) -> "FieldPoly":
        if isinstance(other, FieldPoly):
            if other.q != self.q:
                raise ValueError(f"field mismatch: GF({self.q}) vs GF({other.q})")
            return other
        if isinstance(other, int):
            return FieldPoly(self.q, (other,))
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other) if isinstance(other, (int, FieldPoly)) else NotImplemented
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)

    def __bool__(self):
        return bool(self.coeffs)

    def __neg__(self):
        q = self.q
        return FieldPoly._raw(q, tuple((q - c) % q for c in self.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return FieldPoly(self.q, [x + y for x, y in itertools.zip_longest(a, b, fillvalue=0)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FieldPoly._raw(self.q, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return FieldPoly(self.q, out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = self.q
        r = list(self.coeffs)
        db = other.degree
        if len(r) <= db:
            return FieldPoly._raw(q, ()), self
        inv_lead = pow(other.lead, -1, q)
        b = other.coeffs
        quot = [0] * (len(r) - db)
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv_lead % q
            quot[k] = c
            if c:
                for j in range(db + 1):
                    r[k + j] = (r[k + j] - c * b[j]) % q
        return FieldPoly(q, quot), FieldPoly(q, r[:db])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __rmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other % self

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __pow__(self, e: int, mod=None):
        if e < 0:
            raise ValueError("negative exponent")
        result = FieldPoly(self.q, (1,))
        base = self if mod is None else self % mod
        if mod is not None:
            result = result % mod
        while e:
            if e & 1:
                result = result * base
                if mod is not None:
                    result = result % mod
            e >>= 1
            if e:
                base = base * base
                if mod is not None:
                    base = base % mod
        return result

    def monic(self) -> "FieldPoly":
        if self.is_zero():
            return self
        return self * pow(self.lead, -1, self.q)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.q
        return acc


def int_to_poly(n: int, q: int) -> FieldPoly:
    """q-adic digits of ``n >= 0`` as coefficients."""
    if n < 0:
        raise ValueError("expected a non-negative integer")
    digits = []
    while n:
        n, d = divmod(n, q)
        digits.append(d)
    return FieldPoly._raw(q, tuple(digits))


def poly_to_int(f: FieldPoly) -> int:
    n = 0
    for c in reversed(f.coeffs):
        n = n * f.q + c
    return n


def poly_gcd(f: FieldPoly, g: FieldPoly) -> FieldPoly:
    """Monic gcd; ``gcd(0, 0)`` is rejected."""
    if f.q != g.q:
        raise ValueError(f"field mismatch: GF({f.q}) vs GF({g.q})")
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def poly_inverse(a: FieldPoly, m: FieldPoly) -> FieldPoly:
    """Inverse of ``a`` modulo ``m`` by extended Euclid; ZeroDivisionError if none."""
    r0, r1 = m, a % m
    s0, s1 = FieldPoly(m.q), FieldPoly(m.q, (1,))
    while not r1.is_zero():
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
    if r0.degree != 0:
        raise ZeroDivisionError("not invertible")
    return (s0 * pow(r0.lead, -1, m.q)) % m


def new_modulus_poly(a: FieldPoly, m: FieldPoly) -> FieldPoly:
    """Monic divisor ``m'`` of ``m`` modulo which ``a`` is zero or invertible.

    Any irreducible factor of ``m`` with more than half its degree divides ``m'``.
    """
    g1 = poly_gcd(a % m, m)
    if 2 * g1.degree > m.degree:
        return g1
    b = pow(g1, m.degree, m)
    return (m // poly_gcd(b, m)).monic()


def monic_polys(q: int, deg: int) -> Iterable[FieldPoly]:
    for low in itertools.product(range(q), repeat=deg):
        yield FieldPoly._raw(q, tuple(reversed(low)) + (1,))


def factor_poly(f: FieldPoly, max_degree: int = 16) -> list[tuple[FieldPoly, int]]:
    """Monic irreducible factorization by trial division (desk-scale brute force)."""
    density._count_test("irreducibility")
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if f.degree > max_degree:
        raise ValueError(f"degree {f.degree} too large for brute-force factoring")
    f = f.monic()
    out = []
    d = 1
    while 2 * d <= f.degree:
        for g in monic_polys(f.q, d):
            k = 0
            while True:
                quo, rem = divmod(f, g)
                if not rem.is_zero():
                    break
                f, k = quo, k + 1
            if k:
                out.append((g, k))
        d += 1
    if f.degree > 0:
        out.append((f, 1))
    out.sort(key=lambda gk: (gk[0].degree, gk[0].coeffs[::-1]))
    return out


def _irreducibles_up_to(q: int, d: int) -> list[FieldPoly]:
    # sieve: a monic poly of degree k is irreducible iff no smaller irreducible divides it
    irr: list[FieldPoly] = []
    for k in range(1, d + 1):
        for f in monic_polys(q, k):
            if all(not (f % g).is_zero() for g in irr if 2 * g.degree <= k):
                irr.append(f)
    return irr


def _largest_factor_degree(f: FieldPoly, small: list[FieldPoly]) -> int:
    # ``small`` lists monic irreducibles by increasing degree, covering deg f // 2
    best = 0
    for g in small:
        if 2 * g.degree > f.degree:
            break
        while True:
            quo, rem = divmod(f, g)
            if not rem.is_zero():
                break
            f = quo
            best = max(best, g.degree)
    return max(best, f.degree)


def is_d_fat(f: FieldPoly, d: int, _small: list[FieldPoly] | None = None) -> bool:
    """True iff ``f`` has an irreducible factor of degree greater than ``d``."""
    density._count_test("irreducibility")
    if f.is_zero():
        raise ValueError("the zero polynomial has no factorization")
    f = f.monic()
    small = _small if _small is not None else _irreducibles_up_to(f.q, f.degree // 2)
    return _largest_factor_degree(f, small) > d


def count_d_fat(q: int, d: int) -> int:
    """Exact number of monic degree-``2d`` polynomials over GF(q) that are d-fat."""
    if d < 1 or q < 2:
        raise ValueError("need prime q and d >= 1")
    if q ** (2 * d) > 10**6:
        raise ValueError(f"q^(2d) = {q ** (2 * d)} too large to enumerate")
    small = _irreducibles_up_to(q, d)
    return sum(1 for f in monic_polys(q, 2 * d) if is_d_fat(f, d, small))


def sample_monic_poly(q: int, deg: int, state: PrngState | bytes) -> FieldPoly:
    """Monic polynomial of degree ``deg``, lower coefficients drawn from the s0 stream."""
    if deg < 1:
        raise ValueError(f"degree must be >= 1, got {deg}")
    s = state.s0 if isinstance(state, PrngState) else state
    low = []
    for _ in range(deg):
        low.append(rand_mod(s, q))
        s = rand_update(s)
    return FieldPoly._raw(q, tuple(low) + (1,))


def correlated_poly_sample(state: PrngState, t: FieldPoly, m: FieldPoly) -> FieldPoly:
    """Uniform residue modulo ``t`` from one s1 draw, correlated through ``m``.

    For ``t | m`` a residue modulo ``m`` (``q**deg m`` choices) is drawn and reduced;
    otherwise a residue modulo ``t`` is drawn directly.
    """
    q = t.q
    if (m % t).is_zero():
        return int_to_poly(rand_mod(state.s1, q ** m.degree), q) % t
    return int_to_poly(rand_mod(state.s1, q ** t.degree), q)


class _PolyPrng(CorrelatedPrng):
    def __init__(self, state: PrngState, q: int, s: int, initial_modulus=None):
        self.state = state
        self.b = s
        if initial_modulus is None:
            initial_modulus = sample_monic_poly(q, 2 * s, state)
        self.initial_modulus = initial_modulus

    def draw(self, t):
        x = correlated_poly_sample(self.state, t, self.initial_modulus)
        self.state = self.state.advance()
        return x


class PolyContext(_Context):
    """Polynomial context: irreducible backend (GF(q^deg φ)) or random monic degree-2s modulus."""

    @property
    def q(self) -> int:
        return self.modulus.q

    @classmethod
    def composite(cls, q: int, s: int, seed, *, initial_modulus: FieldPoly | None = None,
                  record: bool = True) -> "PolyContext":
        if s < 1:
            raise ValueError(f"s must be >= 1, got {s}")
        prng = _PolyPrng(coerce_state(seed), q, s, initial_modulus)
        return cls("composite", prng.initial_modulus, prng, s, record)

    @classmethod
    def irreducible(cls, phi: FieldPoly, s: int, seed, *, record: bool = True) -> "PolyContext":
        """Context over GF(q)[x]/(φ); φ is trusted to be irreducible."""
        if s < 1:
            raise ValueError(f"s must be >= 1, got {s}")
        if phi.degree < 1:
            raise ValueError("modulus must have positive degree")
        prng = _PolyPrng(coerce_state(seed), phi.q, s)
        return cls("prime", phi.monic(), prng, s, record)

    def _reduce(self, x) -> FieldPoly:
        if isinstance(x, int):
            x = FieldPoly(self.q, (x,))
        return x % self.modulus

    def _convert(self, n: int) -> FieldPoly:
        f = int_to_poly(abs(n), self.q)
        return (-f if n < 0 else f) % self.modulus

    def _split(self, x: FieldPoly) -> None:
        self.modulus = new_modulus_poly(x, self.modulus)

    def _is_zero_reduced(self, x: FieldPoly) -> bool:
        return x.is_zero()

    def _invert_reduced(self, x: FieldPoly) -> FieldPoly:
        if self.modulus.degree == 0:
            return FieldPoly(self.q)
        return poly_inverse(x, self.modulus)

    def _draw(self) -> FieldPoly:
        return self.prng.draw(self.modulus)


def replay_check_poly(program: Callable, x, q: int, s: int, seed) -> ReplayReport:
    """Polynomial analogue of :func:`dyneval.dyncore.replay_check`."""
    state = coerce_state(seed)
    ctx = PolyContext.composite(q, s, state)
    with density.tally() as used:
        out = run_hosted(program, ctx, x)
    m1 = ctx.modulus
    report = ReplayReport(ctx.initial_modulus, m1, out, [], {}, len(ctx.trace),
                          used["primality"] + used["irreducibility"])
    report.factors = [g for g, _ in factor_poly(m1)] if m1.degree > 0 else []
    for phi in report.factors:
        pctx = PolyContext.irreducible(phi, s, state)
        pout = run_hosted(program, pctx, x)
        same = traces_agree(ctx.trace, pctx.trace, lambda v, phi=phi: v % phi,
                            lambda mod, phi=phi: (mod % phi).is_zero())
        report.agree[phi] = same and _same_output(out, pout)
    return report


__all__ = [
    "Bottom", "FieldPoly", "PolyContext", "correlated_poly_sample", "count_d_fat",
    "factor_poly", "int_to_poly", "is_d_fat", "monic_polys", "new_modulus_poly",
    "poly_gcd", "poly_inverse", "poly_to_int", "replay_check_poly", "sample_monic_poly",
]

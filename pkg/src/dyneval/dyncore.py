"""Dynamic evaluation modulo a random, possibly composite integer.

Hosted algorithms are plain Python functions ``program(ctx, x)`` that touch
algebraic values only through the context: ``from_int``, ``add``/``sub``/``mul``,
``is_zero``, ``inverse``, ``rand`` and ``probe``.  The same function runs over
GF(p) with :meth:`DynContext.prime` or modulo a random ``2b``-bit integer with
:meth:`DynContext.composite`.  In the composite backend every zero test and
inversion first shrinks the modulus with :func:`new_modulus`, following only
the branch that keeps any prime factor ``p`` with ``p**2 > m``.

Algebraic values are bare ints.  A value created under an earlier, larger
modulus stays valid: every instruction re-reduces its operands modulo the
current modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple

from . import density
from .prng import CorrelatedPrng, PrngState, coerce_state

# Swap in a subquadratic GCD here if needed; correctness does not depend on it.
gcd: Callable[[int, int], int] = math.gcd


class NotInvertible(ArithmeticError):
    """``a`` shares a factor with the modulus."""


class Bottom(Exception):
    """Division by zero inside a hosted algorithm; the run outputs ⊥."""


class _BottomType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"

    def __reduce__(self):
        return (_BottomType, ())


BOTTOM = _BottomType()


def new_modulus(a: int, m: int) -> int:
    """Divisor ``m'`` of ``m`` modulo which ``a`` is zero or a unit.

    Any prime ``p`` with ``p | m`` and ``p*p > m`` also divides the result.
    """
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    g1 = gcd(a % m, m)
    if g1 * g1 > m:
        return g1
    b = pow(g1, m.bit_length() - 1, m)
    return m // gcd(b, m)


def mod_pow(a: int, e: int, m: int) -> int:
    if m < 1 or e < 0:
        raise ValueError("need m >= 1 and e >= 0")
    return pow(a, e, m)


def mod_inverse(a: int, m: int) -> int:
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if m == 1:
        return 0
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible modulo {m}") from None


class TraceEntry(NamedTuple):
    """One context instruction.

    ``values`` hold algebraic data (compared modulo p on replay); ``ints``
    hold integer-side data (compared exactly).
    """

    instr: str
    values: tuple
    ints: tuple
    modulus: Any


@dataclass
class _Context:
    """Shared instruction set and trace bookkeeping for integer and polynomial contexts."""

    kind: str
    modulus: Any
    prng: CorrelatedPrng
    b: int
    record: bool = True
    trace: list = field(default_factory=list)
    probes: int = 0

    @property
    def initial_modulus(self):
        return self.prng.initial_modulus

    @property
    def is_composite(self) -> bool:
        return self.kind == "composite"

    def _log(self, instr, values=(), ints=()):
        if self.record:
            self.trace.append(TraceEntry(instr, values, ints, self.modulus))

    # backend hooks
    def _reduce(self, x):
        raise NotImplementedError

    def _convert(self, n: int):
        raise NotImplementedError

    def _split(self, x) -> None:
        raise NotImplementedError

    def _is_zero_reduced(self, x) -> bool:
        raise NotImplementedError

    def _invert_reduced(self, x):
        raise NotImplementedError

    def _draw(self):
        raise NotImplementedError

    # algebraic RAM instructions
    def from_int(self, n: int):
        x = self._convert(n)
        self._log("int", (x,), (n,))
        return x

    def ring_op(self, op: str, x, y):
        x, y = self._reduce(x), self._reduce(y)
        if op == "add":
            z = x + y
        elif op == "sub":
            z = x - y
        elif op == "mul":
            z = x * y
        else:
            raise ValueError(f"unknown ring op {op!r}")
        z = self._reduce(z)
        self._log(op, (x, y, z))
        return z

    def add(self, x, y):
        return self.ring_op("add", x, y)

    def sub(self, x, y):
        return self.ring_op("sub", x, y)

    def mul(self, x, y):
        return self.ring_op("mul", x, y)

    def is_zero(self, x) -> bool:
        x = self._reduce(x)
        if self.is_composite:
            self._split(x)
        z = self._is_zero_reduced(self._reduce(x))
        self._log("zero", (x,), (z,))
        return z

    def inverse(self, x):
        """Inverse of ``x``; raises :class:`Bottom` if ``x`` is zero after splitting."""
        x = self._reduce(x)
        if self.is_composite:
            self._split(x)
        xr = self._reduce(x)
        if self._is_zero_reduced(xr):
            self._log("inv", (x,), (True,))
            raise Bottom(f"inverse of zero modulo {self.modulus}")
        y = self._invert_reduced(xr)
        self._log("inv", (x, y), (False,))
        return y

    def rand(self):
        x = self._draw()
        self._log("rand", (x,))
        return x

    def probe(self, bb, *point):
        """Evaluate a modular black box at ``point`` modulo the current modulus."""
        point = tuple(self._reduce(v) for v in point)
        y = self._reduce(bb.evaluate(self.modulus, point))
        self.probes += 1
        self._log("probe", point + (y,))
        return y

    def dump_trace(self) -> str:
        """Line-oriented trace: ``step instr modulus operand...``."""
        lines = []
        for i, e in enumerate(self.trace):
            ops = " ".join(str(v) for v in e.values + e.ints)
            lines.append(f"{i} {e.instr} {e.modulus} {ops}".rstrip())
        return "\n".join(lines)


class DynContext(_Context):
    """Integer context: prime backend (GF(p)) or composite backend (random ``2b``-bit m)."""

    @classmethod
    def composite(cls, b: int, seed, *, initial_modulus: int | None = None,
                  record: bool = True) -> "DynContext":
        """Context modulo a pseudorandom ``2b``-bit integer drawn from ``s0``.

        ``initial_modulus`` overrides the draw; tests use it to build adversarial moduli.
        """
        if b < 1:
            raise ValueError(f"b must be >= 1, got {b}")
        prng = CorrelatedPrng(coerce_state(seed), b, initial_modulus)
        return cls("composite", prng.initial_modulus, prng, b, record)

    @classmethod
    def prime(cls, p: int, b: int, seed, *, record: bool = True) -> "DynContext":
        """Context over GF(p).  The PRNG still fixes the ``2b``-bit m from ``s0``.

        ``p`` is trusted to be prime; no test is run.
        """
        if b < 1:
            raise ValueError(f"b must be >= 1, got {b}")
        if p < 2:
            raise ValueError(f"p must be a prime, got {p}")
        prng = CorrelatedPrng(coerce_state(seed), b)
        return cls("prime", p, prng, b, record)

    def _reduce(self, x: int) -> int:
        return x % self.modulus

    _convert = _reduce

    def _split(self, x: int) -> None:
        self.modulus = new_modulus(x, self.modulus)

    def _is_zero_reduced(self, x: int) -> bool:
        return x == 0

    def _invert_reduced(self, x: int) -> int:
        return mod_inverse(x, self.modulus)

    def _draw(self) -> int:
        return self.prng.draw(self.modulus)


def run_hosted(program: Callable, ctx: _Context, x=None):
    """Run ``program(ctx, x)``; returns its output or :data:`BOTTOM`."""
    try:
        return program(ctx, x)
    except Bottom:
        return BOTTOM


def traces_agree(composite: list, prime: list, reduce: Callable, divides: Callable) -> bool:
    """Entry-wise agreement of a composite trace with a prime-backend trace."""
    if len(composite) != len(prime):
        return False
    for c, p in zip(composite, prime):
        if c.instr != p.instr or c.ints != p.ints or len(c.values) != len(p.values):
            return False
        if not divides(c.modulus):
            return False
        if any(reduce(u) != v for u, v in zip(c.values, p.values)):
            return False
    return True


def _same_output(a, b) -> bool:
    if a is BOTTOM or b is BOTTOM:
        return a is b
    return a == b


@dataclass
class ReplayReport:
    initial_modulus: Any
    final_modulus: Any
    output: Any
    factors: list
    agree: dict
    trace_length: int
    composite_tests: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and all(self.agree.values())


MAX_FACTOR_BITS = 96


def replay_check(program: Callable, x, seed, b: int) -> ReplayReport:
    """Run under the composite backend, then re-run over GF(p) for each prime p | m'.

    Every trace entry and the output must agree modulo p.  ``composite_tests``
    counts primality tests performed during the composite run (expected 0).
    """
    state = coerce_state(seed)
    ctx = DynContext.composite(b, state)
    with density.tally() as used:
        out = run_hosted(program, ctx, x)
    m1 = ctx.modulus
    report = ReplayReport(ctx.initial_modulus, m1, out, [], {}, len(ctx.trace),
                          used["primality"])
    if m1.bit_length() > MAX_FACTOR_BITS:
        report.error = f"final modulus has {m1.bit_length()} bits; too large to factor"
        return report
    report.factors = [p for p, _ in density.factorize(m1)] if m1 > 1 else []
    for p in report.factors:
        pctx = DynContext.prime(p, b, state)
        pout = run_hosted(program, pctx, x)
        same = traces_agree(ctx.trace, pctx.trace, lambda v, p=p: v % p,
                            lambda mod, p=p: mod % p == 0)
        report.agree[p] = same and _same_output(out, pout)
    return report

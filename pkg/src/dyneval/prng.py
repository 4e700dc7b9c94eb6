"""Modular PRNG built on SHA-256 in counter mode, plus the correlated pair.

A *half state* is a 32-byte string. ``rand_mod(s, m)`` reads the blocks
``SHA256(s || i)`` for ``i = 0, 1, ...`` and rejection-samples a uniform
residue modulo ``m``; ``rand_update(s)`` hashes the state forward.

A :class:`PrngState` carries two halves.  ``s0`` is consumed only to draw the
initial modulus; every later draw comes from the ``s1`` stream.  Draws for a
modulus ``t`` dividing the initial modulus ``m`` are taken modulo ``m`` and
then reduced modulo ``t``, which makes draws at ``p | m' | m`` agree exactly
modulo ``p``.

Seeds given as hex strings are expanded with domain-separated hashing::

    s0 = SHA256(b"dyneval/s0" || seed_bytes)
    s1 = SHA256(b"dyneval/s1" || seed_bytes)

so a printed seed reproduces a run bit-for-bit on any platform.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

STATE_BYTES = 32
_BLOCK_BITS = 256


def _block(s: bytes, i: int) -> int:
    return int.from_bytes(hashlib.sha256(s + i.to_bytes(8, "big")).digest(), "big")


def rand_mod(s: bytes, m: int) -> int:
    """Uniform pseudorandom residue in ``[0, m)`` determined by ``(s, m)``."""
    if m <= 0:
        raise ValueError(f"modulus must be positive, got {m}")
    if m == 1:
        return 0
    nblocks = -(-m.bit_length() // _BLOCK_BITS)
    nbits = nblocks * _BLOCK_BITS
    limit = (1 << nbits) - ((1 << nbits) % m)
    i = 0
    while True:
        x = 0
        for _ in range(nblocks):
            x = (x << _BLOCK_BITS) | _block(s, i)
            i += 1
        if x < limit:
            return x % m


def rand_update(s: bytes) -> bytes:
    """Next half state; same length as ``s``."""
    return hashlib.sha256(b"dyneval/update" + s).digest()


def _expand(label: bytes, data: bytes) -> bytes:
    return hashlib.sha256(b"dyneval/" + label + data).digest()


@dataclass(frozen=True)
class PrngState:
    s0: bytes
    s1: bytes
    counter: int = 0

    def __post_init__(self):
        if len(self.s0) != STATE_BYTES or len(self.s1) != STATE_BYTES:
            raise ValueError("PRNG half states must be 32 bytes")
        if self.counter < 0:
            raise ValueError("counter must be non-negative")

    @classmethod
    def from_seed(cls, seed: str | bytes | int) -> "PrngState":
        """Build a state from a hex string, raw bytes, or a non-negative int."""
        if isinstance(seed, str):
            data = bytes.fromhex(seed)
        elif isinstance(seed, int):
            data = seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "big")
        else:
            data = bytes(seed)
        return cls(_expand(b"s0", data), _expand(b"s1", data))

    def advance(self) -> "PrngState":
        """State after one draw from the s1 stream."""
        return PrngState(self.s0, rand_update(self.s1), self.counter + 1)

    def fork(self, index: int) -> "PrngState":
        """Independent state for repetition ``index`` (fresh s0 and s1)."""
        tag = self.s0 + self.s1 + index.to_bytes(8, "big")
        return PrngState(_expand(b"fork0", tag), _expand(b"fork1", tag))


def coerce_state(seed) -> PrngState:
    return seed if isinstance(seed, PrngState) else PrngState.from_seed(seed)


def sample_initial_modulus(s0: bytes, b: int) -> int:
    """Uniform ``2b``-bit integer, i.e. in ``[2^(2b-1), 2^(2b))``, from ``s0`` alone."""
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    low = 1 << (2 * b - 1)
    return low + rand_mod(s0, low)


def correlated_sample(state: PrngState, t: int, m: int) -> int:
    """Draw modulo ``t`` from the s1 stream, correlated through the initial modulus ``m``.

    If ``t`` divides ``m`` the draw is taken modulo ``m`` and reduced modulo ``t``;
    otherwise it is taken modulo ``t`` directly.  Either way the caller advances the
    stream by exactly one position (``state.advance()``).
    """
    if t <= 0:
        raise ValueError(f"modulus must be positive, got {t}")
    if m % t == 0:
        return rand_mod(state.s1, m) % t
    return rand_mod(state.s1, t)


class CorrelatedPrng:
    """Stateful wrapper: fixes the initial modulus from ``s0`` and draws from ``s1``.

    Used unchanged by both backends; only the requested modulus differs.
    """

    def __init__(self, state: PrngState, b: int, initial_modulus: int | None = None):
        self.state = state
        self.b = b
        if initial_modulus is None:
            initial_modulus = sample_initial_modulus(state.s0, b)
        self.initial_modulus = initial_modulus

    def draw(self, t: int) -> int:
        x = correlated_sample(self.state, t, self.initial_modulus)
        self.state = self.state.advance()
        return x

import math
import random

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from dyneval import density
from dyneval.dyncore import (
    BOTTOM, Bottom, DynContext, NotInvertible, mod_inverse, mod_pow, new_modulus, replay_check,
    run_hosted,
)
from dyneval.programs import CORPUS, random_is_zero, small_divisor_splits
from dyneval.prng import PrngState
from oracles import trial_factor


@pytest.mark.parametrize("a,m,expected", [
    (0, 2, 2), (0, 30, 30), (0, 97, 97),
    (7, 30, 30),
    (2, 24, 3),
    (6, 30, 6),
    (3, 303, 101),
])
def test_new_modulus_examples(a, m, expected):
    assert new_modulus(a, m) == expected


def _check_triple(a, m):
    m2 = new_modulus(a, m)
    assert m % m2 == 0
    assert a % m2 == 0 or math.gcd(a, m2) == 1
    for p in trial_factor(m):
        if p * p > m:
            assert m2 % p == 0


@settings(max_examples=500, deadline=None)
@given(st.integers(1, 10**7), st.integers(0, 10**9))
def test_new_modulus_triple_property(m, a):
    _check_triple(a, m)


def test_new_modulus_triple_on_smooth_moduli():
    rng = random.Random(8)
    for _ in range(2000):
        m = math.prod(rng.choice([2, 3, 5, 7]) ** rng.randrange(4) for _ in range(4)) * rng.choice([1, 101, 9973])
        a = rng.randrange(m) * rng.choice([1, 2, 6, 30])
        _check_triple(a, m)


def test_mod_pow_and_inverse():
    assert mod_pow(2, 4, 24) == 16
    assert mod_pow(5, 0, 7) == 1 and mod_pow(5, 0, 1) == 0
    assert mod_pow(0, 5, 7) == 0
    assert mod_inverse(3, 7) == 5
    assert mod_inverse(1, 30) == 1
    with pytest.raises(NotInvertible):
        mod_inverse(6, 30)


def _ctx(m, seed="00"):
    return DynContext.composite(8, seed, initial_modulus=m)


def test_ctx_new_moduli():
    for s in range(20):
        assert DynContext.composite(1, s).modulus in (2, 3)
        m = DynContext.composite(8, s).modulus
        assert 2**15 <= m < 2**16
    c = DynContext.composite(16, "ab")
    p = DynContext.prime(65537, 16, "ab")
    assert p.initial_modulus == c.initial_modulus and p.modulus == 65537
    with pytest.raises(ValueError):
        DynContext.composite(0, "00")


def test_from_int_and_ring_ops():
    c = _ctx(30)
    assert c.from_int(-1) == 29 and c.from_int(30) == 0 and c.from_int(47) == 17
    assert c.add(29, 1) == 0
    assert c.mul(7, 8) == 26
    assert c.mul(13, 0) == 0
    assert c.sub(3, 5) == 28
    with pytest.raises(ValueError):
        c.ring_op("div", 1, 2)


def test_is_zero_splits():
    c = _ctx(30)
    assert c.is_zero(c.from_int(0)) and c.modulus == 30
    assert not c.is_zero(7) and c.modulus == 30
    c = _ctx(24)
    assert not c.is_zero(2) and c.modulus == 3


def test_inverse_and_bottom():
    c = _ctx(24)
    assert c.inverse(1) == 1
    assert c.inverse(2) == 2 and c.modulus == 3
    with pytest.raises(Bottom):
        c.inverse(0)
    assert c.trace[-1].ints == (True,)
    p = DynContext.prime(7, 2, "00")
    with pytest.raises(Bottom):
        p.inverse(14)


def test_modulus_one_is_degenerate_but_defined():
    c = _ctx(1)
    assert c.from_int(5) == 0
    assert c.is_zero(c.rand())
    with pytest.raises(Bottom):
        c.inverse(3)


def test_rand_determinism_and_congruence():
    a = DynContext.composite(16, "77")
    b = DynContext.composite(16, "77")
    assert [a.rand() for _ in range(10)] == [b.rand() for _ in range(10)]
    m = a.initial_modulus
    for p, _ in density.factorize(m):
        c, pr = DynContext.composite(16, "77"), DynContext.prime(p, 16, "77")
        for _ in range(10):
            assert c.rand() % p == pr.rand()


def test_trace_dump_format():
    c = _ctx(30)
    c.mul(c.from_int(7), c.from_int(8))
    lines = c.dump_trace().splitlines()
    assert lines[0] == "0 int 30 7 7"
    assert lines[2] == "2 mul 30 7 8 26"


def test_divisibility_chain_along_runs():
    for s in range(50):
        ctx = DynContext.composite(16, s)
        run_hosted(small_divisor_splits, ctx, 80)
        mods = [ctx.initial_modulus] + [e.modulus for e in ctx.trace]
        assert all(prev % nxt == 0 for prev, nxt in zip(mods, mods[1:]))


def test_large_prime_persists_on_adversarial_programs():
    rng = random.Random(21)
    for _ in range(100):
        p = 1000003
        k = rng.randrange(2, p)
        m = p * k
        for prog in CORPUS:
            ctx = DynContext.composite(20, rng.randbytes(8), initial_modulus=m)
            run_hosted(prog.fn, ctx, prog.input)
            assert all(e.modulus % p == 0 for e in ctx.trace)
            assert ctx.modulus % p == 0


def test_straight_line_program_agrees_for_every_initial_factor():
    prog = CORPUS[0]
    for s in range(20):
        r = replay_check(prog.fn, prog.input, s, 12)
        assert r.final_modulus == r.initial_modulus
        assert r.ok and set(r.agree) == {p for p, _ in density.factorize(r.initial_modulus)}


def test_invert_random_replays():
    prog = next(p for p in CORPUS if p.name == "invert_random")
    for s in range(1000):
        r = replay_check(prog.fn, None, s, 16)
        assert r.ok, (s, r)


def test_bottom_propagates_to_prime_backend():
    def always_bottom(ctx, _):
        r = ctx.rand()
        return ctx.inverse(ctx.sub(r, r))

    saw = 0
    for s in range(50):
        r = replay_check(always_bottom, None, s, 10)
        assert r.output is BOTTOM and r.ok
        saw += bool(r.factors)
    assert saw == 50


def test_replay_reports_unfactorable_modulus():
    r = replay_check(CORPUS[0].fn, CORPUS[0].input, "01", 60)
    assert r.error is not None and not r.ok


def test_deterministic_output_preserved():
    # bm_sparsity over any prime never exceeds the true count
    prog = next(p for p in CORPUS if p.name == "bm_sparsity")
    for s in range(300):
        out = run_hosted(prog.fn, DynContext.composite(16, s), prog.input)
        assert out is BOTTOM or out <= prog.input.sparsity


def _pathology_outcomes():
    # m = 30: enumerate the drawn residue r in [0, 30); record (final modulus, r mod 2)
    rows = []
    for r in range(30):
        m2 = new_modulus(r, 30)
        rows.append((m2, r % m2 == 0, r % 2))
    return rows


def test_m30_pathology_bias_for_small_prime():
    rows = [row for row in _pathology_outcomes() if row[0] % 2 == 0]
    zero_mod_2 = sum(1 for _, _, r2 in rows if r2 == 0)
    assert (zero_mod_2, len(rows)) == (7, 21)


def test_no_bias_for_large_prime_factor():
    # m = 6 * 37: 37^2 > m, so 37 always survives; the zero-test outcome over GF(37)
    # is then unbiased as s1 varies
    rng = random.Random(4)
    m = 6 * 37
    counts = [0] * 37
    n = 37 * 300
    for _ in range(n):
        ctx = DynContext.composite(4, PrngState(b"\x00" * 32, rng.randbytes(32)), initial_modulus=m)
        x = ctx.rand()
        ctx.is_zero(x)
        assert ctx.modulus % 37 == 0
        counts[x % 37] += 1
    expected = n / 37
    assert abs(counts[0] - expected) < 4 * math.sqrt(expected)
    assert 0.001 <= chisquare(counts).pvalue <= 0.999


def test_random_zero_test_replays():
    for s in range(200):
        assert replay_check(random_is_zero, None, s, 16).ok

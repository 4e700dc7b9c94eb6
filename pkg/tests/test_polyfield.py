import random

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare
from sympy import ZZ
from sympy.polys.galoistools import gf_factor

from dyneval import density
from dyneval.dyncore import BOTTOM, Bottom, run_hosted
from dyneval.polyfield import (
    FieldPoly, PolyContext, correlated_poly_sample, count_d_fat, factor_poly, int_to_poly,
    is_d_fat, monic_polys, new_modulus_poly, poly_gcd, poly_inverse, poly_to_int,
    replay_check_poly, sample_monic_poly,
)
from dyneval.programs import CORPUS, random_is_zero
from dyneval.prng import PrngState
from oracles import necklace_count

X2 = FieldPoly.x(2)


def _sympy_factors(f):
    _, facs = gf_factor(list(reversed(f.coeffs)), f.q, ZZ)
    return sorted(((FieldPoly(f.q, [int(c) for c in reversed(g)]), int(e)) for g, e in facs),
                  key=lambda ge: (ge[0].degree, ge[0].coeffs[::-1]))


def test_construction_and_degree():
    assert FieldPoly(2, [1, 0, 1, 0, 0]).coeffs == (1, 0, 1)
    assert FieldPoly(3, [3, 6]).is_zero() and FieldPoly(3).degree == -1
    assert FieldPoly(5, [-1]).coeffs == (4,)
    assert 3 * X2 + 1 == FieldPoly(2, [1, 1])


def test_gcd_examples():
    assert poly_gcd(X2**2 + X2, X2 + 1) == X2 + 1
    assert poly_gcd(X2**3 + X2 + 1, X2**2 + 1) == FieldPoly(2, [1])
    x3 = FieldPoly.x(3)
    assert poly_gcd(2 * (x3**2 - 1), 2 * x3 - 2) == x3 - 1
    with pytest.raises(ValueError):
        poly_gcd(FieldPoly(2), FieldPoly(2))
    with pytest.raises(ValueError):
        poly_gcd(X2, FieldPoly.x(3))


def test_new_modulus_poly_example():
    irr = X2**3 + X2 + 1
    assert new_modulus_poly(X2, X2 * irr) == irr
    assert new_modulus_poly(FieldPoly(2), X2 * irr) == X2 * irr


def _check_poly_triple(a, m):
    m2 = new_modulus_poly(a, m)
    assert (m % m2).is_zero()
    r = a % m2
    assert r.is_zero() or poly_gcd(r, m2).degree == 0
    for g, _ in _sympy_factors(m):
        if 2 * g.degree > m.degree:
            assert (m2 % g).is_zero()


@pytest.mark.parametrize("q", [2, 3, 5])
def test_new_modulus_poly_triple(q):
    rng = random.Random(q)
    for _ in range(300):
        deg = rng.randrange(1, 9)
        m = FieldPoly(q, [rng.randrange(q) for _ in range(deg)] + [1])
        a = FieldPoly(q, [rng.randrange(q) for _ in range(rng.randrange(12))])
        if rng.random() < 0.3:
            a = a * rng.choice(_sympy_factors(m))[0]
        _check_poly_triple(a, m)


def test_poly_inverse():
    m = X2**3 + X2 + 1
    for f in monic_polys(2, 2):
        assert (f * poly_inverse(f, m)) % m == 1
    with pytest.raises(ZeroDivisionError):
        poly_inverse(X2, X2 * (X2 + 1))


def test_int_poly_correspondence():
    assert int_to_poly(5, 2) == X2**2 + 1
    assert int_to_poly(0, 7).is_zero()
    for n in range(500):
        assert poly_to_int(int_to_poly(n, 3)) == n


_coeffs = st.lists(st.integers(0, 4), max_size=8)


@settings(max_examples=300, deadline=None)
@given(_coeffs, _coeffs, _coeffs)
def test_ring_axioms_gf5(a, b, c):
    f, g, h = FieldPoly(5, a), FieldPoly(5, b), FieldPoly(5, c)
    assert f + g == g + f and f * g == g * f
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f - f == 0 and -f + f == 0
    if not g.is_zero():
        quo, rem = divmod(f, g)
        assert quo * g + rem == f and rem.degree < g.degree
    assert pow(f, 3, X5m) == (f * f * f) % X5m


X5m = FieldPoly(5, [2, 0, 1, 1])


def test_evaluation():
    f = FieldPoly(7, [1, 2, 3])
    assert f(2) == (1 + 4 + 12) % 7


@pytest.mark.parametrize("q,deg", [(2, 6), (3, 4), (5, 3)])
def test_factor_poly_matches_sympy(q, deg):
    for f in monic_polys(q, deg):
        assert factor_poly(f) == _sympy_factors(f)


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_count_d_fat_matches_necklaces_and_bound(q, d):
    # d-fat of degree 2d: one irreducible factor of degree k in (d, 2d] times any monic of degree 2d - k
    expected = sum(necklace_count(q, k) * q ** (2 * d - k) for k in range(d + 1, 2 * d + 1))
    c = count_d_fat(q, d)
    assert c == expected
    assert c >= q ** (2 * d) / 4
    if (q, d) == (5, 3):
        assert c / q**6 > 0.5


def test_is_d_fat_examples():
    irr = X2**3 + X2 + 1
    assert is_d_fat(X2 * irr, 2)
    assert not is_d_fat((X2**2 + X2 + 1) ** 2, 2)
    with pytest.raises(ValueError):
        count_d_fat(5, 5)


def test_sample_monic_poly_deterministic_and_uniform():
    st0 = PrngState.from_seed("12")
    f = sample_monic_poly(3, 4, st0)
    assert f == sample_monic_poly(3, 4, st0) and f.degree == 4 and f.lead == 1
    rng = random.Random(6)
    counts = {}
    for _ in range(81 * 40):
        g = sample_monic_poly(3, 4, rng.randbytes(32))
        counts[g.coeffs] = counts.get(g.coeffs, 0) + 1
    assert len(counts) == 81
    assert 0.001 <= chisquare(list(counts.values())).pvalue <= 0.999


def test_correlated_poly_sample_chain():
    irr = X2**3 + X2 + 1
    m = irr * (X2**2 + X2 + 1) * X2
    st0 = PrngState.from_seed("77")
    for _ in range(100):
        big = correlated_poly_sample(st0, m, m)
        assert correlated_poly_sample(st0, irr, m) == big % irr
        st0 = st0.advance()


def test_poly_context_operations():
    m = X2 * (X2**3 + X2 + 1)
    ctx = PolyContext.composite(2, 2, "00", initial_modulus=m)
    assert ctx.from_int(5) == X2**2 + 1
    assert ctx.from_int(-5) == X2**2 + 1
    assert not ctx.is_zero(ctx.from_int(2)) and ctx.modulus == X2**3 + X2 + 1
    assert ctx.mul(ctx.from_int(2), ctx.inverse(ctx.from_int(2))) == 1
    with pytest.raises(Bottom):
        ctx.inverse(ctx.from_int(0))


def test_poly_context_random_modulus_shape():
    for s in range(20):
        ctx = PolyContext.composite(3, 4, s)
        assert ctx.modulus.degree == 8 and ctx.modulus.lead == 1


def test_poly_context_runs_no_irreducibility_test():
    with density.tally() as used:
        for s in range(30):
            for prog in CORPUS[:7]:
                run_hosted(prog.fn, PolyContext.composite(3, 3, s), prog.input)
    assert sum(used.values()) == 0


@pytest.mark.parametrize("prog", CORPUS[:7], ids=lambda p: p.name)
def test_replay_check_poly_corpus(prog):
    for s in range(15):
        rep = replay_check_poly(prog.fn, prog.input, 2, 3, s)
        assert rep.ok, (s, rep)


def test_replay_check_poly_random_zero():
    outs = set()
    for s in range(100):
        rep = replay_check_poly(random_is_zero, None, 3, 2, s)
        assert rep.ok
        outs.add(rep.output)
    assert outs <= {0, 1, BOTTOM}

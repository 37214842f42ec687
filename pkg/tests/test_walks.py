import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from expansionlab.algebra import IntMatrix, ModMatrix
from expansionlab.groups import elementary, enumerate_group, sanov
from expansionlab.walks import (Measure, convolve, first_return_counts,
                                flattening_profile, free_group_return_counts,
                                kesten_check, return_counts_distance_dp, reverse,
                                walk_distribution, walk_sequence, word_return_mass)


@pytest.fixture(scope="module")
def t5():
    return enumerate_group(sanov(), 5)


def naive_walk(S, q, l):
    """Law of s_1...s_l mod q by enumerating all |S|^l words."""
    out = {}
    for word in itertools.product(S.gens, repeat=l):
        m = IntMatrix.identity(S.d)
        for g in word:
            m = m @ g
        key = ModMatrix(m.entries, q).entries
        out[key] = out.get(key, 0) + 1
    return {k: Fraction(v, len(S) ** l) for k, v in out.items()}


def test_point_convolution(t5):
    a, b = 5, 17
    c = convolve(Measure.point(t5, a), Measure.point(t5, b))
    assert c[int(t5.mul(a, b))] == 1 and c.total() == 1


def test_uniform_absorbs(t5):
    nu = walk_distribution(t5, 3)
    u = Measure.uniform(t5)
    assert convolve(u, nu).same_as(u) and convolve(nu, u).same_as(u)


def test_return_after_two_steps(t5):
    chi = walk_distribution(t5, 1)
    assert convolve(chi, chi)[0] == Fraction(4, 16)


def test_reverse():
    t = enumerate_group(sanov(), 7)
    d = Measure.point(t)
    assert reverse(d).same_as(d)
    mu = walk_distribution(t, 3)
    assert reverse(mu).same_as(mu)
    x = Measure.counting(t, [1, 2, 5])
    assert reverse(reverse(x)).same_as(x)


def test_walk_distribution_matches_words():
    t = enumerate_group(sanov(), 7)
    for l in (0, 1, 2, 4):
        mu = walk_distribution(t, l)
        oracle = naive_walk(sanov(), 7, l)
        assert mu.total() == 1
        for i in mu.support():
            assert mu[i] == oracle[t.element(int(i)).entries]
        assert len(mu.support()) == len(oracle)


def test_walk_associativity(t5):
    for a, b in [(1, 2), (2, 3), (3, 3)]:
        assert walk_distribution(t5, a + b).same_as(convolve(walk_distribution(t5, a),
                                                              walk_distribution(t5, b)))


def test_norms_nonincreasing_mod_11():
    t = enumerate_group(sanov(), 11)
    norms = [mu.l2_squared() for mu in walk_sequence(t, 12)]
    assert all(a >= b for a, b in zip(norms, norms[1:]))
    assert all(isinstance(x, Fraction) for x in norms)


def test_contraction_exact(t5):
    rng = np.random.default_rng(0)
    nu = Measure.counting(t5, rng.choice(t5.size, 9, replace=False))
    mu = walk_distribution(t5, 2)
    assert convolve(mu, nu).l2_squared() <= nu.l2_squared()


def test_float_fallback(t5):
    mu = walk_distribution(t5, 6, exact_bits=8)
    assert not mu.exact and mu.total() == pytest.approx(1)
    assert np.allclose(mu.as_float(), walk_distribution(t5, 6).as_float(), atol=1e-15)


def test_tree_counts_agree():
    for k in (2, 3, 4, 6):
        assert free_group_return_counts(k, 14) == return_counts_distance_dp(k, 14)
    assert free_group_return_counts(4, 6)[2::2] == [4, 28, 232]
    assert first_return_counts(4, 4)[2] == 4


def test_word_return_mass_vs_group_table():
    # for small q the word measure and the group table agree
    t = enumerate_group(sanov(), 7)
    for n in (2, 4, 6):
        assert word_return_mass(sanov(), 7, n) == walk_distribution(t, n)[0]


def test_kesten_examples():
    r1 = kesten_check(sanov(), 101, 1)
    assert r1.bound == Fraction(12, 16) and r1.return_mass == Fraction(4, 16) and r1.ok
    r3 = kesten_check(sanov(), 1000, 3)
    assert r3.injective and r3.return_mass == Fraction(232, 4096) == r3.oracle
    assert r3.return_mass <= Fraction(27, 64)
    r0 = kesten_check(sanov(), 7, 0)
    assert r0.return_mass == 1 and r0.bound == 1 and r0.ok


def test_kesten_vacuous_when_not_injective():
    r = kesten_check(sanov(), 5, 3)
    assert not r.injective and r.ok is None
    assert r.return_mass > r.oracle          # collisions mod 5 add returns


def test_flattening_profile():
    t = enumerate_group(elementary(2), 2)
    rows = flattening_profile(t, 6)
    assert all(r["exact"] for r in rows)
    floor = 1 / math.sqrt(t.size)
    assert all(r["norm_2l"] >= floor - 1e-15 for r in rows)
    rows5 = flattening_profile(enumerate_group(sanov(), 5), 1)
    assert rows5[0]["norm_2l_squared"] == walk_distribution(enumerate_group(sanov(), 5), 2).l2_squared()


def test_flattening_at_uniform():
    # Sanov mod 3 is not bipartite, so chi^(2l) tends to uniform on all 24 elements
    rows = flattening_profile(enumerate_group(sanov(), 3), 40)
    assert rows[-1]["norm_2l"] == pytest.approx(1 / math.sqrt(24), rel=1e-9)
    assert abs(rows[-1]["delta"]) < 1e-8
    # mod 2 the elementary generators are involutions of S_3: even walks stay in A_3
    rows = flattening_profile(enumerate_group(elementary(2), 2), 40)
    assert rows[-1]["norm_2l"] == pytest.approx(1 / math.sqrt(3), rel=1e-9)

import itertools
import json

import numpy as np
import pytest

from expansionlab.algebra import IntMatrix, ModMatrix, group_order
from expansionlab.errors import ConfigError, NotADivisor, NotUnimodular, TooLarge
from expansionlab.groups import (GeneratorSet, elementary, enumerate_group, is_full,
                                 kernel_coset, load_generators, sanov, word_entry_bound)


def brute_word_max(S, length):
    best = 1 if length == 0 else 0
    for word in itertools.product(S.gens, repeat=length):
        m = IntMatrix.identity(S.d)
        for g in word:
            m = m @ g
        best = max(best, m.max_abs())
    return best


def test_generator_set_symmetrization():
    S = sanov()
    assert len(S) == 4 and S.is_symmetric()
    assert all(S.gens[j] == S.gens[i].inverse() for i, j in enumerate(S.inverse_positions()))
    with pytest.raises(NotUnimodular):
        GeneratorSet.from_matrices([[[2, 0], [0, 1]]])
    with pytest.raises(ConfigError):
        GeneratorSet.from_matrices([])
    again = GeneratorSet.from_matrices(json.loads(S.to_json())["generators"])
    assert again.gens == S.gens


def test_load_generators(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"d": 2, "generators": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}))
    S = load_generators(p)
    assert len(S) == 4 and S.is_symmetric()
    p.write_text("{}")
    with pytest.raises(ConfigError):
        load_generators(p)
    p.write_text("not json")
    with pytest.raises(ConfigError):
        load_generators(p)
    with pytest.raises(ConfigError):
        load_generators(tmp_path / "missing.json")


def test_enumerate_examples():
    assert enumerate_group(elementary(2), 2).size == 6
    ident = GeneratorSet.from_matrices([[[1, 0], [0, 1]]])
    assert enumerate_group(ident, 7).size == 1
    assert enumerate_group(sanov(), 2).size == 1


def test_table_invariants():
    t = enumerate_group(sanov(), 7)
    n = t.size
    keys = t.encode(t.elements)
    assert len(np.unique(keys)) == n
    assert t.element(0).is_identity()
    inv = t.gens.inverse_positions()
    for s in range(t.degree):
        for act in (t.left_action, t.right_action):
            assert np.array_equal(np.sort(act[s]), np.arange(n))
            assert np.array_equal(act[inv[s]][act[s]], np.arange(n))
    # action arrays reproduce matrix products
    gens = [ModMatrix(g.entries, 7) for g in t.gens]
    for i in range(0, n, 17):
        g = t.element(i)
        for s, gs in enumerate(gens):
            assert t.element(t.left_action[s][i]) == gs @ g
            assert t.element(t.right_action[s][i]) == g @ gs
        assert (t.element(t.inverse_index[i]) @ g).is_identity()


def test_mul_and_lift():
    t = enumerate_group(sanov(), 5)
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, t.size, 50), rng.integers(0, t.size, 50)
    for x, y, z in zip(a, b, t.mul(a, b)):
        assert t.element(z) == t.element(x) @ t.element(y)
    assert np.array_equal(t.multiplication_table[a, b], t.mul(a, b))
    for i in (0, 3, 77):
        lift = t.lift(i)
        assert lift.det() == 1 and ModMatrix(lift.entries, 5) == t.element(i)


def test_generator_order_independence():
    S = sanov()
    R = GeneratorSet.from_matrices(list(reversed(S.gens)), symmetrize=False)
    a, b = enumerate_group(S, 9), enumerate_group(R, 9)
    assert set(a.encode(a.elements)) == set(b.encode(b.elements))


def test_is_full():
    assert is_full(enumerate_group(elementary(2), 2))
    assert not is_full(enumerate_group(sanov(), 2))
    for q in (3, 5, 7, 9):
        assert is_full(enumerate_group(sanov(), q))


def test_kernel_coset():
    t = enumerate_group(elementary(2), 9)
    assert len(kernel_coset(t, 1)) == t.size
    assert list(kernel_coset(t, 9)) == [0]
    assert len(kernel_coset(t, 3)) == 27
    assert len(kernel_coset(t, 3)) * group_order(2, 3) == t.size
    with pytest.raises(NotADivisor):
        kernel_coset(t, 4)


def test_reduce_indices():
    big, small = enumerate_group(sanov(), 9), enumerate_group(sanov(), 3)
    red = big.reduce_indices(small)
    for i in range(0, big.size, 31):
        assert small.element(red[i]) == big.element(i).reduce(3)


def test_cap():
    with pytest.raises(TooLarge):
        enumerate_group(elementary(2), 31, cap=1000)


def test_word_entry_bound():
    S = sanov()
    assert word_entry_bound(S, 0) == 1
    assert word_entry_bound(S, 1) == 2
    for n in (2, 3, 4):
        assert word_entry_bound(S, n) == brute_word_max(S, n)
    assert word_entry_bound(S, 4) >= 2**4

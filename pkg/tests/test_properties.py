"""Property-based checks with hypothesis."""
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from expansionlab.algebra import IntMatrix, ModMatrix
from expansionlab.experiments import parse_range
from expansionlab.fourier import LieDist, fourier_transform
from expansionlab.groups import enumerate_group, sanov
from expansionlab.lie import LieVec, bracket, check_adjoint_identity, check_bracket_identity, \
    check_sum_identity, psi
from expansionlab.oracles import count_bracket_pairs, span_certificate, verify_certificate
from expansionlab.walks import Measure, convolve

small = st.integers(-3, 3)


@st.composite
def sl2z(draw, max_len=4):
    """Random word in the elementary matrices."""
    g = IntMatrix.identity(2)
    for _ in range(draw(st.integers(0, max_len))):
        k = draw(small)
        g = g @ (IntMatrix([[1, k], [0, 1]]) if draw(st.booleans()) else IntMatrix([[1, 0], [k, 1]]))
    return g


@st.composite
def congruence(draw, q):
    """Conjugate of a level-q unipotent, an element of Gamma_q."""
    g = draw(sl2z())
    u = IntMatrix([[1, q * draw(small)], [0, 1]])
    return g @ u @ g.inverse()


def lievec(d, q):
    n = d * d - 1
    return st.lists(st.integers(0, q - 1), min_size=n, max_size=n).map(
        lambda c: LieVec.from_coordinates(c, d, q))


@settings(max_examples=60, deadline=None)
@given(congruence(3), congruence(3))
def test_psi_additive(x, y):
    assert check_sum_identity(x, y, 3, 9)
    assert psi(x @ y, 3, 9) == psi(y @ x, 3, 9)


@settings(max_examples=60, deadline=None)
@given(sl2z(), congruence(5))
def test_psi_equivariant(g, x):
    assert check_adjoint_identity(g, x, 5, 25)


@settings(max_examples=40, deadline=None)
@given(congruence(3), congruence(3))
def test_psi_bracket(x, y):
    assert check_bracket_identity(x, y, 3, 3, 3)


@settings(max_examples=80, deadline=None)
@given(lievec(2, 9), lievec(2, 9), lievec(2, 9))
def test_bracket_lie_algebra(u, v, w):
    assert bracket(u, v) == -bracket(v, u)
    assert (bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v))).is_zero()


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: lievec(d, 7)))
def test_coordinates_roundtrip(v):
    assert LieVec.from_coordinates(v.coordinates(), v.d, v.q) == v


@settings(max_examples=60, deadline=None)
@given(sl2z(), st.sampled_from([4, 9, 10, 49]))
def test_mod_inverse(g, q):
    m = ModMatrix(g.entries, q)
    assert (m @ m.inverse()).is_identity() and m.det() == 1 % q


@given(st.integers(-20, 20), st.integers(-20, 40), st.integers(1, 5))
def test_parse_range(a, b, step):
    assert parse_range(f"{a}:{b}:{step}") == list(range(a, b + 1, step))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (5, 1)]), st.data())
def test_bracket_count_any_v(pm, data):
    p, m = pm
    v = data.draw(lievec(2, p**m))
    assert count_bracket_pairs(p, m, v).ok


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 11), (2, 13), (2, 19), (3, 11)]), st.data())
def test_certificates_verify(dp, data):
    d, p = dp
    x = data.draw(lievec(d, p).filter(lambda v: not v.is_zero()))
    y = data.draw(lievec(d, p))
    assert verify_certificate(span_certificate(p, d, x, y))


T5 = enumerate_group(sanov(), 5)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, T5.size - 1), min_size=1, max_size=12),
       st.lists(st.integers(0, T5.size - 1), min_size=1, max_size=12))
def test_convolution_contracts(a, b):
    mu, nu = Measure.counting(T5, a), Measure.counting(T5, b)
    c = convolve(mu, nu)
    assert c.total() == 1
    assert c.l2_squared() <= min(mu.l2_squared(), nu.l2_squared())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=125, max_size=125).filter(any))
def test_fourier_coefficients_bounded(weights):
    num = np.array(weights, dtype=np.int64).reshape(5, 5, 5)
    dist = LieDist(5, 2, num, int(num.sum()))
    F = fourier_transform(dist)
    assert abs(F[0, 0, 0] - 1) < 1e-12 and np.all(np.abs(F) <= 1 + 1e-12)
    assert dist.total() == Fraction(1)

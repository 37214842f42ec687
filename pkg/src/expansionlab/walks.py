"""Exact random-walk measures on Gamma/Gamma_q and the free-group oracle.

A :class:`Measure` stores integer numerators over one common denominator,
so convolution powers chi_S^{(l)} are exact rationals (denominator |S|^l).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ModulusMismatch
from .groups import GeneratorSet, GroupTable, _encode, word_entry_bound

__all__ = [
    "Measure", "convolve", "reverse", "walk_distribution", "walk_sequence",
    "KestenResult", "kesten_check", "return_counts_distance_dp",
    "first_return_counts", "free_group_return_counts", "word_return_mass",
    "flattening_profile", "EXACT_DENOMINATOR_BITS",
]

EXACT_DENOMINATOR_BITS = 512


def _int_array(values, bound: int) -> np.ndarray:
    # int64 while every partial sum stays below 2**62, Python ints otherwise
    if bound < 2**62:
        return np.asarray(values, dtype=np.int64)
    return np.asarray(values, dtype=object)


@dataclass(frozen=True)
class Measure:
    """Nonnegative measure on a group table: mass(g) = num[g] / den.

    With ``exact=False`` the numerators are floats and ``den`` is 1.
    """

    table: GroupTable
    num: np.ndarray
    den: int = 1
    exact: bool = True

    @classmethod
    def point(cls, table: GroupTable, i: int = 0) -> "Measure":
        num = np.zeros(table.size, dtype=np.int64)
        num[i] = 1
        return cls(table, num, 1)

    @classmethod
    def uniform(cls, table: GroupTable) -> "Measure":
        return cls(table, np.ones(table.size, dtype=np.int64), table.size)

    @classmethod
    def counting(cls, table: GroupTable, indices) -> "Measure":
        """Normalized counting measure chi_A."""
        idx = np.unique(np.asarray(indices))
        num = np.zeros(table.size, dtype=np.int64)
        num[idx] = 1
        return cls(table, num, len(idx))

    def total(self):
        s = sum(int(x) for x in self.num) if self.exact else float(self.num.sum())
        return Fraction(s, self.den) if self.exact else s

    def __getitem__(self, i):
        return Fraction(int(self.num[i]), self.den) if self.exact else float(self.num[i])

    def masses(self) -> list:
        return [self[i] for i in range(len(self.num))]

    def as_float(self) -> np.ndarray:
        if self.exact:
            if self.den < 2**1000:
                return self.num.astype(float) / self.den
            return np.array([float(Fraction(int(x), self.den)) for x in self.num])
        return np.asarray(self.num, dtype=float)

    def l2_squared(self):
        """Sum of squared masses, exact when the measure is."""
        if not self.exact:
            return float(np.dot(self.num, self.num))
        s = sum(int(x) * int(x) for x in self.num)
        return Fraction(s, self.den * self.den)

    def l2(self) -> float:
        return math.sqrt(self.l2_squared())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.num != 0)

    def same_as(self, other: "Measure") -> bool:
        """Exact equality of the underlying rational masses."""
        if self.table is not other.table:
            return False
        if self.exact and other.exact:
            return all(int(a) * other.den == int(b) * self.den for a, b in zip(self.num, other.num))
        return bool(np.allclose(self.as_float(), other.as_float(), rtol=0, atol=1e-15))


def _check_same(mu: Measure, nu: Measure):
    if mu.table is not nu.table:
        raise ModulusMismatch("measures live on different group tables")


def convolve(mu: Measure, nu: Measure) -> Measure:
    """(mu * nu)(g) = sum_h mu(g h^{-1}) nu(h)."""
    _check_same(mu, nu)
    t = mu.table
    allg = np.arange(t.size)
    exact = mu.exact and nu.exact
    if exact:
        out = _int_array(np.zeros(t.size, dtype=np.int64), mu.den * nu.den)
    else:
        out = np.zeros(t.size)
    mnum = mu.num if not exact or out.dtype != object else mu.num.astype(object)
    for h in nu.support():
        perm = t.mul(allg, t.inverse_index[h])       # g -> g h^{-1}
        out = out + mnum[perm] * (int(nu.num[h]) if exact else float(nu.num[h]))
    if exact:
        return Measure(t, out, mu.den * nu.den)
    return Measure(t, out * (1.0 / (mu.den * nu.den)), 1, exact=False)


def reverse(mu: Measure) -> Measure:
    """mu~(g) = mu(g^{-1})."""
    return Measure(mu.table, mu.num[mu.table.inverse_index], mu.den, mu.exact)


def _inverse_left(table) -> list[np.ndarray]:
    return [np.argsort(p) for p in table.left_action]


def walk_sequence(table: GroupTable, l_max: int, exact_bits: int = EXACT_DENOMINATOR_BITS):
    """Yield chi_S^{(l)} for l = 0..l_max.

    Exact while |S|^l <= 2**exact_bits, floating point beyond (the yielded
    measure then has ``exact=False``).
    """
    k = table.degree
    inv = _inverse_left(table)
    mu = Measure.point(table)
    yield mu
    num, den, exact = mu.num, 1, True
    for _ in range(l_max):
        if exact and (den * k).bit_length() > exact_bits:
            num, exact = num.astype(float) / den, False
            den = 1
        if exact:
            den *= k
            if den >= 2**62 and num.dtype != object:
                num = num.astype(object)
            num = sum(num[p] for p in inv)
            yield Measure(table, num, den)
        else:
            num = sum(num[p] for p in inv) / k
            yield Measure(table, num, 1, exact=False)


def walk_distribution(table: GroupTable, l: int, exact_bits: int = EXACT_DENOMINATOR_BITS) -> Measure:
    """chi_S^{(l)} pushed to the group table; l = 0 gives the point mass at 1."""
    if l < 0:
        raise ValueError("l must be >= 0")
    for mu in walk_sequence(table, l, exact_bits):
        pass
    return mu


# ---------------------------------------------------------------- free group

def return_counts_distance_dp(k: int, n_max: int) -> list[int]:
    """Closed walks of length 0..n_max at the root of the k-regular tree,
    by evolving the distance-from-root distribution."""
    dist = {0: 1}
    out = [1]
    for _ in range(n_max):
        nxt: dict[int, int] = {}
        for r, c in dist.items():
            if r == 0:
                nxt[1] = nxt.get(1, 0) + k * c
            else:
                nxt[r + 1] = nxt.get(r + 1, 0) + (k - 1) * c
                nxt[r - 1] = nxt.get(r - 1, 0) + c
        dist = nxt
        out.append(dist.get(0, 0))
    return out


def first_return_counts(k: int, n_max: int) -> list[int]:
    """F_n: walks of length n from the root returning to it for the first time at step n."""
    out = [0] * (n_max + 1)
    dist = {1: k} if n_max >= 1 else {}
    for n in range(2, n_max + 1):
        nxt: dict[int, int] = {}
        for r, c in dist.items():
            nxt[r + 1] = nxt.get(r + 1, 0) + (k - 1) * c
            nxt[r - 1] = nxt.get(r - 1, 0) + c
        out[n] = nxt.pop(0, 0)
        dist = nxt
    return out


def free_group_return_counts(k: int, n_max: int) -> list[int]:
    """W_n via the first-return recursion W_n = sum_j F_j W_{n-j}."""
    F = first_return_counts(k, n_max)
    W = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        W[n] = sum(F[j] * W[n - j] for j in range(1, n + 1))
    return W


def word_return_mass(S: GeneratorSet, q: int, length: int) -> Fraction:
    """pi_q[chi_S^{(length)}](1), by evolving the word measure on matrices
    mod q (no group table needed, so q can be large)."""
    d = S.d
    gens = np.array([g.tolist() for g in S.gens], dtype=np.int64) % q
    k = len(gens)
    mats = np.eye(d, dtype=np.int64)[None]
    counts = np.array([1], dtype=np.int64)
    for _ in range(length):
        cand = (np.matmul(mats[:, None], gens[None]) % q).reshape(-1, d, d)
        ccounts = np.repeat(counts, k)
        keys = _encode(cand, q)
        uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        counts = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(counts, inv.ravel(), ccounts)
        mats = cand[first]
    ident = np.eye(d, dtype=np.int64)
    hit = np.all(mats == ident, axis=(1, 2))
    return Fraction(int(counts[hit].sum()), k**length)


@dataclass(frozen=True)
class KestenResult:
    l0: int
    q: int
    return_mass: Fraction
    bound: Fraction
    injective: bool
    ok: bool | None          # None: vacuous (injectivity not certified)
    oracle: Fraction
    matches_oracle: bool | None
    entry_bound: int


def kesten_check(S: GeneratorSet, q: int, l0: int) -> KestenResult:
    """Return probability of the 2*l0 step walk mod q against Kesten's bound
    ((4|S|-4)/|S|^2)^l0 and against the free-group tree count."""
    k = len(S)
    bound = Fraction(4 * k - 4, k * k) ** l0
    mass = word_return_mass(S, q, 2 * l0)
    oracle = Fraction(free_group_return_counts(k, 2 * l0)[2 * l0], k ** (2 * l0))
    entry = word_entry_bound(S, 2 * l0)
    injective = 2 * entry < q
    if injective:
        return KestenResult(l0, q, mass, bound, True, mass <= bound, oracle, mass == oracle, entry)
    return KestenResult(l0, q, mass, bound, False, None, oracle, None, entry)


def flattening_profile(table: GroupTable, l_max: int) -> list[dict]:
    """For l = 1..l_max: exact ||chi^{(2l)}||_2, ||chi^{(4l)}||_2 and the
    realized exponent delta_l = log||chi^{(4l)}|| / log||chi^{(2l)}|| - 1."""
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    norms2 = [mu.l2_squared() for mu in walk_sequence(table, 4 * l_max)]
    rows = []
    for l in range(1, l_max + 1):
        a, b = norms2[2 * l], norms2[4 * l]
        la, lb = 0.5 * math.log(a), 0.5 * math.log(b)
        delta = lb / la - 1 if la != 0 else float("nan")
        rows.append({"l": l, "norm_2l": math.sqrt(a), "norm_4l": math.sqrt(b),
                     "norm_2l_squared": a, "norm_4l_squared": b, "delta": delta,
                     "exact": isinstance(a, Fraction)})
    return rows

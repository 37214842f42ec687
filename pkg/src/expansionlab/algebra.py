"""Exact integer / modular matrix arithmetic and moduli bookkeeping.

Matrices are small immutable value objects backed by tuples of Python
ints, so word products in SL_d(Z) never overflow.  Bulk work over whole
groups happens on ``(N, d, d)`` int64 arrays in :mod:`expansionlab.groups`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

from sympy import factorint

from .errors import NotADivisor, NotUnimodular, ModulusMismatch, ZeroInput

__all__ = [
    "Modulus", "IntMatrix", "ModMatrix", "as_modulus", "valuation",
    "project", "mod_mul", "mod_inv", "exact_divisor", "exponent_gauge",
    "weight", "split_modulus", "group_order",
]


@lru_cache(maxsize=4096)
def _factor(q: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(q).items()))


@dataclass(frozen=True)
class Modulus:
    """A positive integer together with its prime factorization."""

    q: int
    factors: tuple[tuple[int, int], ...] = field(compare=False, repr=False, default=())

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"modulus must be positive, got {self.q}")
        if not self.factors:
            object.__setattr__(self, "factors", _factor(self.q))

    def __int__(self):
        return self.q

    def __index__(self):
        return self.q

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def exponent(self, p: int) -> int:
        """m_p, zero when p does not divide q."""
        for r, m in self.factors:
            if r == p:
                return m
        return 0

    def divisors(self) -> list[int]:
        out = [1]
        for p, m in self.factors:
            out = [a * p**k for a in out for k in range(m + 1)]
        return sorted(out)

    def is_squarefree(self) -> bool:
        return all(m == 1 for _, m in self.factors)


def as_modulus(q) -> Modulus:
    return q if isinstance(q, Modulus) else Modulus(int(q))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ZeroInput("valuation of 0 is infinite")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _det(rows: Sequence[Sequence[int]]) -> int:
    # Bareiss fraction-free elimination; exact over Z.
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def _adjugate(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(rows)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            adj[j][i] = (-1) ** (i + j) * _det(minor)
    return adj


def _matmul(a, b):
    n = len(a)
    m = len(b[0])
    inner = len(b)
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(m)] for i in range(n)]


def _freeze(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in rows)


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix over Z with arbitrary-precision entries."""

    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries):
        object.__setattr__(self, "entries", _freeze(entries))
        d = len(self.entries)
        if any(len(r) != d for r in self.entries):
            raise ValueError("matrix must be square")

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(d)] for i in range(d)])

    @property
    def d(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(_matmul(self.entries, other.entries))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def det(self) -> int:
        return _det(self.entries)

    def inverse(self) -> "IntMatrix":
        """Exact inverse of an element of SL_d(Z) (the adjugate)."""
        if self.det() != 1:
            raise NotUnimodular(f"det = {self.det()} != 1")
        return IntMatrix(_adjugate(self.entries))

    def max_abs(self) -> int:
        return max(abs(x) for r in self.entries for x in r)

    def flat(self) -> tuple[int, ...]:
        return tuple(x for r in self.entries for x in r)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class ModMatrix:
    """Square matrix over Z/qZ with entries in canonical range [0, q)."""

    entries: tuple[tuple[int, ...], ...]
    q: int

    def __init__(self, entries, q):
        q = int(q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "entries", tuple(tuple(int(x) % q for x in r) for r in entries))

    @classmethod
    def identity(cls, d: int, q) -> "ModMatrix":
        return cls([[int(i == j) for j in range(d)] for i in range(d)], q)

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def modulus(self) -> Modulus:
        return Modulus(self.q)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _check(self, other):
        if other.q != self.q:
            raise ModulusMismatch(f"{self.q} vs {other.q}")

    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        self._check(other)
        return ModMatrix(_matmul(self.entries, other.entries), self.q)

    def __add__(self, other):
        self._check(other)
        return ModMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.q)

    def __sub__(self, other):
        self._check(other)
        return ModMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.q)

    def scale(self, c: int) -> "ModMatrix":
        return ModMatrix([[c * a for a in r] for r in self.entries], self.q)

    def det(self) -> int:
        return _det(self.entries) % self.q

    def inverse(self) -> "ModMatrix":
        return mod_inv(self)

    def reduce(self, q) -> "ModMatrix":
        q = int(q)
        if self.q % q:
            raise NotADivisor(f"{q} does not divide {self.q}")
        return ModMatrix(self.entries, q)

    def is_identity(self) -> bool:
        return self == ModMatrix.identity(self.d, self.q)

    def flat(self) -> tuple[int, ...]:
        return tuple(x for r in self.entries for x in r)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def project(g: IntMatrix, q) -> ModMatrix:
    """The residue map pi_q applied entrywise."""
    return ModMatrix(g.entries, int(q))


def mod_mul(a: ModMatrix, b: ModMatrix) -> ModMatrix:
    return a @ b


def mod_inv(a: ModMatrix) -> ModMatrix:
    """Inverse of a determinant-one matrix mod q, via the adjugate."""
    if a.det() != 1 % a.q:
        raise NotUnimodular(f"det = {a.det()} (mod {a.q}) != 1")
    return ModMatrix(_adjugate(a.entries), a.q)


def _entries_gcd(a) -> int:
    vals = [x for r in a.entries for x in r]
    g = reduce(math.gcd, vals, 0)
    q = getattr(a, "q", None)
    if q is not None:
        # residues: the class of 0 mod q is "divisible by everything dividing q"
        g = math.gcd(g, q)
        if all(x % q == 0 for x in vals):
            g = 0
    return g


def exact_divisor(a, Q) -> int:
    """The divisor q of Q with q || a, valuations clamped at m_p."""
    Q = as_modulus(Q)
    g = _entries_gcd(a)
    if g == 0:
        raise ZeroInput("q || 0 is undefined")
    out = 1
    for p, m in Q.factors:
        out *= p ** min(valuation(g, p), m)
    return out


def _check_divides(q: int, Q: Modulus):
    if q < 1 or Q.q % q:
        raise NotADivisor(f"{q} does not divide {Q.q}")


def exponent_gauge(q: int, Q) -> dict[int, float]:
    """E_p(q) = v_p(q) / m_p for each prime p | q."""
    Q = as_modulus(Q)
    _check_divides(q, Q)
    return {p: valuation(q, p) / m for p, m in Q.factors if q % p == 0}


def weight(q: int, Q) -> float:
    """w(q) = sum over p | q of m_p log p (natural log)."""
    Q = as_modulus(Q)
    _check_divides(q, Q)
    return sum(m * math.log(p) for p, m in Q.factors if q % p == 0)


def split_modulus(Q, L: int) -> tuple[int, int]:
    """(Q_s, Q_l): radical of the small-exponent part, full large-exponent part."""
    if L < 1:
        raise ValueError("L must be >= 1")
    Q = as_modulus(Q)
    qs = math.prod(p for p, m in Q.factors if m <= L)
    ql = math.prod(p**m for p, m in Q.factors if m > L)
    return qs, ql


def group_order(d: int, q) -> int:
    """|SL_d(Z/qZ)|, multiplicative over prime powers."""
    if d < 2:
        raise ValueError("d must be >= 2")
    Q = as_modulus(q)
    total = 1
    for p, m in Q.factors:
        total *= p ** ((m - 1) * (d * d - 1)) * p ** (d * (d - 1) // 2) * math.prod(p**k - 1 for k in range(2, d + 1))
    return total


def matrices_from(seq: Iterable) -> list[IntMatrix]:
    return [IntMatrix(m) for m in seq]

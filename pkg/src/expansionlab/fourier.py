"""Characters of sl_d(Z/q) and Fourier decay of conjugation-orbit measures.

Distributions live on the coordinate torus (Z/q)^(d^2-1) (coordinates as
in :meth:`LieVec.coordinates`).  The pairing of a frequency b with v is the
coordinate dot product, so nu^(b) = sum_v nu(v) e(<v, b>/q).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ModMatrix, as_modulus
from .errors import ModulusMismatch, NotInKernel, TooLarge
from .groups import GeneratorSet
from .lie import LieVec, conj_action

__all__ = [
    "LieDist", "pushforward", "fourier_transform", "fourier_coeff",
    "character_sum", "conductor", "decay_profile", "decay_by_conductor",
    "additive_convolve", "parseval_check", "convolution_theorem_check",
    "convolution_power_norms", "profile_csv", "DENSE_CAP",
]

DENSE_CAP = 20_000_000


def _ncoords(d: int) -> int:
    return d * d - 1


@dataclass(frozen=True)
class LieDist:
    """Measure on sl_d(Z/q): mass(v) = num[coords(v)] / den (dense array)."""

    q: int
    d: int
    num: np.ndarray
    den: int

    @property
    def shape(self):
        return (self.q,) * _ncoords(self.d)

    @classmethod
    def point(cls, v: LieVec) -> "LieDist":
        num = np.zeros((v.q,) * _ncoords(v.d), dtype=np.int64)
        num[v.coordinates()] = 1
        return cls(v.q, v.d, num, 1)

    @classmethod
    def uniform(cls, d: int, q: int) -> "LieDist":
        shape = (q,) * _ncoords(d)
        return cls(q, d, np.ones(shape, dtype=np.int64), q ** _ncoords(d))

    def mass(self) -> np.ndarray:
        return self.num / self.den

    def __getitem__(self, v: LieVec) -> Fraction:
        return Fraction(int(self.num[v.coordinates()]), self.den)

    def total(self) -> Fraction:
        return Fraction(int(self.num.sum()), self.den)

    def support_size(self) -> int:
        return int(np.count_nonzero(self.num))

    def l2_squared(self) -> Fraction:
        nz = self.num[self.num != 0]
        return Fraction(sum(int(x) ** 2 for x in nz), self.den**2)

    def same_as(self, other: "LieDist") -> bool:
        return (self.q, self.d) == (other.q, other.d) and bool(
            np.array_equal(self.num.astype(object) * other.den, other.num.astype(object) * self.den))


def _coordinate_action(g: ModMatrix, d: int, q: int) -> np.ndarray:
    """Matrix of v -> g v g^-1 on coordinate vectors (columns = images of basis)."""
    n = _ncoords(d)
    cols = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        cols.append(conj_action(g, LieVec.from_coordinates(e, d, q)).coordinates())
    return np.array(cols, dtype=np.int64).T


def _flat_permutation(M: np.ndarray, q: int, n: int) -> np.ndarray:
    """perm[i] = flat index of M @ coords(i)."""
    grids = np.indices((q,) * n).reshape(n, -1)
    img = (M @ grids) % q
    return np.ravel_multi_index(tuple(img), (q,) * n)


def pushforward(S: GeneratorSet, q, l: int, v0: LieVec) -> LieDist:
    """Exact law of g v0 g^-1 mod q for g ~ chi_S^(l).

    Evolved as a Markov chain: the law at step l is the average over s in S
    of the step l-1 law conjugated by s.
    """
    q = int(as_modulus(q))
    d = S.d
    if v0.q != q or v0.d != d:
        raise ModulusMismatch("v0 must lie in sl_d(Z/q)")
    for p in as_modulus(q).primes:
        if all(x % p == 0 for r in v0.entries for x in r):
            raise NotInKernel(f"v0 is divisible by {p}")
    if q ** _ncoords(d) > DENSE_CAP:
        raise TooLarge(f"dense torus of size {q ** _ncoords(d)} exceeds cap {DENSE_CAP}")
    return pushforward_from(LieDist.point(v0), S, l)


def fourier_transform(dist: LieDist) -> np.ndarray:
    """All coefficients nu^(b), b in (Z/q)^(d^2-1), via a dense DFT."""
    return np.conj(np.fft.fftn(dist.mass()))


def _as_frequency(b, dist: LieDist) -> tuple[int, ...]:
    if isinstance(b, LieVec):
        b = b.coordinates()
    b = tuple(int(x) % dist.q for x in b)
    if len(b) != _ncoords(dist.d):
        raise ValueError(f"frequency must have {_ncoords(dist.d)} coordinates")
    return b


def fourier_coeff(dist: LieDist, b) -> complex:
    """nu^(b) by a direct character sum over the support."""
    b = _as_frequency(b, dist)
    idx = np.nonzero(dist.num)
    phase = sum(int(bi) * ix for bi, ix in zip(b, idx)) % dist.q
    w = np.array([int(x) for x in dist.num[idx]], dtype=float) / dist.den
    return complex(np.sum(w * np.exp(2j * np.pi * phase / dist.q)))


def character_sum(dist: LieDist) -> np.ndarray:
    """Every coefficient by explicit sums over roots of unity (small q only)."""
    if dist.q > 13:
        raise TooLarge("explicit character sums are for q <= 13")
    n = _ncoords(dist.d)
    grids = np.indices(dist.shape).reshape(n, -1)
    mass = dist.mass().ravel()
    zeta = np.exp(2j * np.pi * np.arange(dist.q) / dist.q)
    out = np.empty(grids.shape[1], dtype=complex)
    for j in range(grids.shape[1]):
        out[j] = np.dot(mass, zeta[(grids[:, j] @ grids) % dist.q])
    return out.reshape(dist.shape)


def conductor(b, q: int) -> int:
    """q / gcd(q, b): the order of the character v -> e(<v, b>/q)."""
    g = q
    for x in b:
        g = math.gcd(g, int(x))
    return q // g


def decay_by_conductor(dist: LieDist) -> dict[int, float]:
    """max |nu^(b)| over b of each conductor q/gcd(q, b) > 1."""
    coeffs = np.abs(fourier_transform(dist))
    g = np.full(dist.shape, dist.q)
    for axis in np.indices(dist.shape):
        g = np.gcd(g, axis)
    cond = dist.q // g
    return {int(c): float(coeffs[cond == c].max()) for c in np.unique(cond) if c > 1}


def _profile_row(l: int, dist: LieDist) -> dict:
    coeffs = np.abs(fourier_transform(dist)).ravel()
    coeffs[0] = 0.0
    return {"l": l, "max_coeff": float(coeffs.max()), "l2_norm": math.sqrt(dist.l2_squared()),
            "support_size": dist.support_size()}


def decay_profile(S: GeneratorSet, q, v0: LieVec, l_list) -> list[dict]:
    """Rows l, max_{b != 0} |nu_l^(b)|, ||nu_l||_2, |supp nu_l|."""
    rows = []
    dist, done = pushforward(S, q, 0, v0), 0
    for l in sorted(set(int(l) for l in l_list)):
        dist, done = pushforward_from(dist, S, l - done), l
        rows.append(_profile_row(l, dist))
    return rows


def pushforward_from(dist: LieDist, S: GeneratorSet, steps: int) -> LieDist:
    """Continue the conjugation chain of :func:`pushforward` by ``steps``."""
    q, d = dist.q, dist.d
    n = _ncoords(d)
    perms = [_flat_permutation(_coordinate_action(ModMatrix(s.entries, q), d, q), q, n) for s in S.gens]
    num = dist.num.ravel()
    den = dist.den
    for _ in range(steps):
        den *= len(perms)
        if num.dtype != object and den >= 2**62:
            num = num.astype(object)
        new = np.zeros_like(num)
        for perm in perms:
            new[perm] += num
        num = new
    return LieDist(q, d, num.reshape(dist.shape), den)


def additive_convolve(a: LieDist, b: LieDist) -> LieDist:
    """(a + b)(v) = sum_w a(v - w) b(w), exactly."""
    if (a.q, a.d) != (b.q, b.d):
        raise ModulusMismatch("distributions on different tori")
    anum = a.num.astype(object) if a.num.dtype == object or b.num.dtype == object else a.num
    out = np.zeros(a.shape, dtype=anum.dtype)
    for w in zip(*np.nonzero(b.num)):
        out = out + np.roll(anum, shift=w, axis=tuple(range(len(w)))) * b.num[w]
    return LieDist(a.q, a.d, out, a.den * b.den)


def parseval_check(dist: LieDist, tol: float = 1e-10):
    """(sum |mass|^2, q^-n sum |nu^|^2, agree to tol)."""
    lhs = float(dist.l2_squared())
    coeffs = fourier_transform(dist)
    rhs = float(np.sum(np.abs(coeffs) ** 2)) / dist.q ** _ncoords(dist.d)
    return lhs, rhs, abs(lhs - rhs) <= tol


def convolution_theorem_check(a: LieDist, b: LieDist, tol: float = 1e-10):
    """max |(a + b)^ - a^ b^|, and whether it is below tol."""
    err = float(np.max(np.abs(fourier_transform(additive_convolve(a, b))
                              - fourier_transform(a) * fourier_transform(b))))
    return err, err <= tol


def convolution_power_norms(dist: LieDist, C_max: int = 8) -> list[dict]:
    """||nu^[C]||_2 for C = 1..C_max via Parseval (nu^[C]^ = nu^^C), with the
    support lower bound ||nu^[C]||_2^-2."""
    coeffs = np.abs(fourier_transform(dist)) ** 2
    n = dist.q ** _ncoords(dist.d)
    rows = []
    for C in range(1, C_max + 1):
        sq = float(np.sum(coeffs**C)) / n
        rows.append({"C": C, "l2_norm": math.sqrt(sq), "support_lower_bound": 1.0 / sq})
    return rows


def profile_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()

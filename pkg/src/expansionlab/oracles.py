"""Brute-force and constructive checks of the counting and covering identities.

* exhaustive bracket-pair counts in sl_2(Z/p^m) against the closed formula
* the solution structure of the coordinate bracket equations
* constructive certificates that sums of +-conjugates of any nonzero x
  reach every element of sl_d(F_p)
* the multiplicativity statistic of a set-theoretic section
  SL_d(F_p) -> SL_d(Z/p^2)
* the commutator lifting step between congruence levels
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import ModMatrix, group_order, valuation
from .errors import (BadHypothesis, NoConjugatorFound, SmallPrime,
                     UnsupportedCharacteristic)
from .groups import (_encode, batched_adjugate_mod, batched_det_mod, elementary,
                     enumerate_group)
from .lie import LieVec, conj_action

__all__ = [
    "BracketCount", "bracket_count_formula", "bracket_histogram",
    "count_bracket_pairs", "count_y_solutions", "solution_structure_check",
    "SpanCertificate", "span_certificate", "verify_certificate",
    "conjugation_span_rank", "linear_span_solve", "find_lambda",
    "find_inverse_square_triple", "find_inverse_square_witness", "find_square_triple", "canonical_section",
    "SectionStat", "section_multiplicativity_stat",
    "section_commutes_with_inversion", "DinaiResult", "dinai_lift_check",
    "lie_divisibility_class",
]


# ------------------------------------------------------------ bracket counts

def bracket_count_formula(p: int, m: int, k: int) -> int:
    """|A_m(v)| for p^k || v (k < m), and for v = 0 (k = m)."""
    if k < m:
        return p ** (3 * m + k) + p ** (3 * m + k - 1) - p ** (3 * m - 1) - p ** (3 * m - 2)
    return p ** (4 * m) + p ** (4 * m - 1) + p ** (4 * m - 2) - p ** (3 * m - 1) - p ** (3 * m - 2)


def _sl2_stack(n: int) -> np.ndarray:
    """All of sl_2(Z/n) as (n^3, 2, 2), index ((h*n)+e)*n+f for h E11-E22 + e E12 + f E21."""
    h, e, f = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    h, e, f = h.ravel(), e.ravel(), f.ravel()
    return np.stack([np.stack([h, e], -1), np.stack([f, (-h) % n], -1)], 1).astype(np.int64)


def _sl2_index(M: np.ndarray, n: int) -> np.ndarray:
    return (M[..., 0, 0] * n + M[..., 0, 1]) * n + M[..., 1, 0]


@lru_cache(maxsize=8)
def bracket_histogram(p: int, m: int) -> np.ndarray:
    """counts[v] = #{(u1, u2) in sl_2(Z/p^m)^2 : [u1, u2] = v}, exhaustively."""
    n = p**m
    U = _sl2_stack(n)
    N = len(U)
    hist = np.zeros(N, dtype=np.int64)
    chunk = max(1, 1_500_000 // N)
    for start in range(0, N, chunk):
        u1 = U[start:start + chunk, None]
        br = (np.matmul(u1, U[None]) - np.matmul(U[None], u1)) % n
        hist += np.bincount(_sl2_index(br, n).ravel(), minlength=N)
    hist.flags.writeable = False
    return hist


def lie_divisibility_class(v: LieVec, p: int, m: int) -> int:
    """k with p^k || v, capped at m (k = m means v = 0)."""
    vals = [x for r in v.entries for x in r if x % p**m]
    if not vals:
        return m
    return min(min(valuation(x, p) for x in vals), m)


@dataclass(frozen=True)
class BracketCount:
    p: int
    m: int
    k: int
    count: int
    formula_value: int

    @property
    def ok(self) -> bool:
        return self.count == self.formula_value


def count_bracket_pairs(p: int, m: int, v: LieVec,
                        formula: Callable[[int, int, int], int] = bracket_count_formula) -> BracketCount:
    """Exhaustive |A_m(v)| next to the closed formula."""
    if p == 2:
        raise UnsupportedCharacteristic("the counting formula is stated for odd p")
    if v.d != 2 or v.q != p**m:
        raise ValueError("v must lie in sl_2(Z/p^m)")
    hist = bracket_histogram(p, m)
    idx = (v[0, 0] * p**m + v[0, 1]) * p**m + v[1, 0]
    k = lie_divisibility_class(v, p, m)
    return BracketCount(p, m, k, int(hist[idx]), formula(p, m, k))


def count_y_solutions(p: int, m: int, a, x) -> int:
    """#{y in (Z/p^m)^3} solving
        x2 y3 - x3 y2 = a1,  2 x1 y2 - 2 x2 y1 = a2,  2 x3 y1 - 2 x1 y3 = a3."""
    n = p**m
    y1, y2, y3 = (g.ravel() for g in np.meshgrid(*[np.arange(n)] * 3, indexing="ij"))
    x1, x2, x3 = x
    a1, a2, a3 = a
    ok = ((x2 * y3 - x3 * y2 - a1) % n == 0) & ((2 * x1 * y2 - 2 * x2 * y1 - a2) % n == 0) \
        & ((2 * x3 * y1 - 2 * x1 * y3 - a3) % n == 0)
    return int(ok.sum())


def solution_structure_check(p: int, m: int, a1: int, a2: int, a3: int) -> bool:
    """For every x with p not dividing (x1, x2, x3): the bracket equations
    have exactly p^m solutions y when 2 x1 a1 + x3 a2 + x2 a3 = 0, else none."""
    if p == 2:
        raise UnsupportedCharacteristic("odd p only")
    n = p**m
    for x in itertools.product(range(n), repeat=3):
        if all(c % p == 0 for c in x):
            continue
        dep = (2 * x[0] * a1 + x[2] * a2 + x[1] * a3) % n == 0
        if count_y_solutions(p, m, (a1, a2, a3), x) != (n if dep else 0):
            return False
    return True


# --------------------------------------------------------- span certificates

def _diag(vals, p) -> ModMatrix:
    d = len(vals)
    return ModMatrix([[vals[i] if i == j else 0 for j in range(d)] for i in range(d)], p)


def find_lambda(p: int, d: int) -> int:
    """Smallest lambda in [2, p) with lambda^d != +-1 mod p."""
    for lam in range(2, p):
        if pow(lam, d, p) not in (1, p - 1):
            return lam
    raise SmallPrime(f"no lambda with lambda^{d} != +-1 mod {p}")


def find_inverse_square_triple(p: int) -> tuple[int, int, int]:
    """Ascending search for nonzero l3 <= l4 <= l5 with
    l3^-2 + l4^-2 + l5^-2 = 0 and l3^2 + l4^2 + l5^2 != 0 mod p."""
    for t in itertools.combinations_with_replacement(range(1, p), 3):
        if sum(pow(x, -2, p) for x in t) % p == 0 and sum(x * x for x in t) % p:
            return t
    raise SmallPrime(f"no inverse-square triple mod {p}")


def find_inverse_square_witness(p: int, max_len: int = 6) -> tuple[int, ...]:
    """Shortest ascending tuple (length >= 3) with sum l^-2 = 0, sum l^2 != 0.

    Triples do not exist for every prime (none mod 7 or mod 13); there a
    longer tuple does the same job at a proportionally longer certificate.
    """
    for n in range(3, max_len + 1):
        for t in itertools.combinations_with_replacement(range(1, p), n):
            if sum(pow(x, -2, p) for x in t) % p == 0 and sum(x * x for x in t) % p:
                return t
    raise SmallPrime(f"no inverse-square tuple of length <= {max_len} mod {p}")


@lru_cache(maxsize=None)
def _square_triples(p: int) -> dict[int, tuple[int, int, int]]:
    out: dict[int, tuple[int, int, int]] = {}
    for t in itertools.combinations_with_replacement(range(1, p), 3):
        out.setdefault(sum(x * x for x in t) % p, t)
    return out


def find_square_triple(p: int, r: int) -> tuple[int, int, int]:
    """Nonzero l6 <= l7 <= l8 (first in ascending order) with sum of squares = r."""
    try:
        return _square_triples(p)[r % p]
    except KeyError:
        raise SmallPrime(f"{r} is not a sum of three nonzero squares mod {p}") from None


def _signed_permutations(d: int, p: int):
    for perm in itertools.permutations(range(d)):
        m = [[0] * d for _ in range(d)]
        for col, row in enumerate(perm):
            m[row][col] = 1
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        if inversions % 2:
            for r in range(d):
                m[r][0] = -m[r][0]
        yield ModMatrix(m, p)


def _placing_permutation(i: int, j: int, d: int, p: int) -> tuple[ModMatrix, int]:
    """Signed permutation h (det 1) with h e_0 = +-e_i, h e_1 = +-e_j, and the
    sign eps with h E_01 h^{-1} = eps E_ij."""
    rest = [r for r in range(d) if r not in (i, j)]
    perm = [i, j] + rest
    m = [[0] * d for _ in range(d)]
    for col, row in enumerate(perm):
        m[row][col] = 1
    inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    flip = 2 if d >= 3 else 0
    if inversions % 2:
        for r in range(d):
            m[r][flip] = -m[r][flip]
    h = ModMatrix(m, p)
    eps = (m[i][0] * m[j][1]) % p
    return h, eps


def _unit(i, j, d, p) -> LieVec:
    return LieVec([[int(r == i and c == j) for c in range(d)] for r in range(d)], p)


@dataclass
class SpanCertificate:
    """target = sum over terms of sign * g x g^{-1} (mod p)."""

    p: int
    d: int
    base: LieVec
    target: LieVec
    terms: list[tuple[int, ModMatrix]] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.terms)

    def value(self) -> LieVec:
        acc = LieVec.zero(self.d, self.p)
        cache: dict = {}
        for sign, g in self.terms:
            key = g.entries
            if key not in cache:
                cache[key] = conj_action(g, self.base)
            acc = acc + cache[key].scale(sign)
        return acc

    def to_json(self) -> str:
        return json.dumps({
            "p": self.p, "d": self.d, "base": self.base.tolist(), "target": self.target.tolist(),
            "terms": [{"sign": s, "conjugator": g.tolist()} for s, g in self.terms],
            "witnesses": self.witnesses,
        })

    @classmethod
    def from_json(cls, text: str) -> "SpanCertificate":
        obj = json.loads(text)
        p, d = obj["p"], obj["d"]
        terms = [(t["sign"], ModMatrix(t["conjugator"], p)) for t in obj["terms"]]
        return cls(p, d, LieVec(obj["base"], p), LieVec(obj["target"], p), terms,
                   obj.get("witnesses", {}))


def verify_certificate(cert: SpanCertificate) -> bool:
    """Exact re-evaluation and the 100 d^2 length bound."""
    return cert.value() == cert.target and cert.length <= 100 * cert.d**2


def _conj_terms(terms, g):
    return [(s, g @ c) for s, c in terms]


def _terms_value(terms, x: LieVec) -> LieVec:
    acc = LieVec.zero(x.d, x.q)
    for s, c in terms:
        acc = acc + conj_action(c, x).scale(s)
    return acc


def _find_offdiag_conjugator(x: LieVec, p: int) -> ModMatrix:
    d = x.d
    ident = ModMatrix.identity(d, p)
    shears = [ident]
    for i in range(d):
        for j in range(d):
            if i != j:
                u = [[int(r == c) for c in range(d)] for r in range(d)]
                u[i][j] = 1
                shears.append(ModMatrix(u, p))
    for P in _signed_permutations(d, p):
        for U in shears:
            g = P @ U
            if conj_action(g, x)[0, 1]:
                return g
    raise NoConjugatorFound(f"no conjugate of {x.tolist()} has a nonzero (1,2) entry")


def span_certificate(p: int, d: int, x: LieVec, target: LieVec) -> SpanCertificate:
    """Write ``target`` as a signed sum of conjugates of ``x`` following the
    explicit diagonal-conjugation construction.

    Stages (each a signed sum of conjugates of the previous stage):
      x1 = g1 x g1^-1 - g1^-1 x g1,  g1 = diag(l^(1-d), l, ..., l), l^d != +-1
           (kills every entry not in row 1 / column 1, keeps x1(1,2) != 0)
      x2 = g2 x1 g2^-1 + x1,         g2 = diag(-1, -1, 1, ..., 1)
      x3 = sum_{i=3,4,5} g_i x2 g_i^-1 = a3 E_12,   g_i = diag(l_i, 1/l_i, 1, ...)
           (a longer tuple of l_i when no triple exists mod p)
      a E_12 = sum_{i=6,7,8} g_i x3 g_i^-1,  l6^2 + l7^2 + l8^2 = a / a3
    then signed permutations move a E_12 to every E_ij, and conjugating by
    1 - E_{i+1,i} supplies the diagonal part.
    """
    if p == 2 or p <= d:
        raise SmallPrime(f"p={p} too small for d={d}")
    if x.q != p or target.q != p or x.d != d or target.d != d:
        raise ValueError("x and target must lie in sl_d(F_p)")
    if x.is_zero():
        raise ValueError("x must be nonzero")
    cert = SpanCertificate(p, d, x, target)
    if target.is_zero():
        return cert

    g0 = _find_offdiag_conjugator(x, p)
    lam = find_lambda(p, d)
    g1 = _diag([pow(lam, 1 - d, p)] + [lam] * (d - 1), p)
    stage1 = [(1, g1 @ g0), (-1, g1.inverse() @ g0)]
    x1 = _terms_value(stage1, x)
    assert x1[0, 1] != 0
    assert all(x1[i, j] == 0 for i in range(d) for j in range(d) if (i == 0) == (j == 0))

    g2 = _diag([p - 1, p - 1] + [1] * (d - 2), p)
    stage2 = _conj_terms(stage1, g2) + stage1
    x2 = _terms_value(stage2, x)
    a1 = x2[0, 1]
    assert a1 != 0

    lams = find_inverse_square_witness(p)
    stage3 = []
    for li in lams:
        stage3 += _conj_terms(stage2, _diag([li, pow(li, -1, p)] + [1] * (d - 2), p))
    x3 = _terms_value(stage3, x)
    a3 = x3[0, 1]
    assert a3 != 0 and x3 == _unit(0, 1, d, p).scale(a3)
    cert.witnesses = {"g0": g0.tolist(), "lambda": lam, "l345": list(lams), "a1": a1, "a3": a3,
                      "l678": {}}

    def multiple_of_E12(a: int):
        trip = find_square_triple(p, a * pow(a3, -1, p))
        cert.witnesses["l678"][str(a % p)] = list(trip)
        out = []
        for li in trip:
            out += _conj_terms(stage3, _diag([li, pow(li, -1, p)] + [1] * (d - 2), p))
        return out

    def place(c: int, i: int, j: int):
        h, eps = _placing_permutation(i, j, d, p)
        return _conj_terms(multiple_of_E12(c * eps), h)

    terms = []
    # diagonal: coefficient of E_ii - E_{i+1,i+1} via 1 - E_{i+1,i}
    coords = target.coordinates()
    hcoef = coords[d * (d - 1):]
    achieved = LieVec.zero(d, p)
    for i, c in enumerate(hcoef):
        if c % p == 0:
            continue
        u = ModMatrix.identity(d, p) - ModMatrix(_unit(i + 1, i, d, p).entries, p)
        part = _conj_terms(place(c, i, i + 1), u)
        terms += part
        piece = [[0] * d for _ in range(d)]
        piece[i][i + 1], piece[i][i], piece[i + 1][i + 1], piece[i + 1][i] = 1, 1, -1, -1
        achieved = achieved + LieVec(piece, p).scale(c)
    residual = target - achieved
    for i in range(d):
        for j in range(d):
            if i != j and residual[i, j]:
                terms += place(residual[i, j], i, j)
    cert.terms = terms
    return cert


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    return len(_echelon(rows, p)[0])


def _echelon(rows, p):
    basis: list[list[int]] = []
    pivots: list[int] = []
    for r in rows:
        r = [x % p for x in r]
        for b, piv in zip(basis, pivots):
            if r[piv]:
                f = r[piv]
                r = [(x - f * y) % p for x, y in zip(r, b)]
        nz = next((i for i, x in enumerate(r) if x), None)
        if nz is not None:
            inv = pow(r[nz], -1, p)
            r = [(x * inv) % p for x in r]
            for bi, b in enumerate(basis):
                if b[nz]:
                    f = b[nz]
                    basis[bi] = [(y - f * z) % p for y, z in zip(b, r)]
            basis.append(r)
            pivots.append(nz)
    return basis, pivots


def _conjugate_closure(x: LieVec, p: int) -> list[LieVec]:
    """Conjugates of x spanning the F_p-span of its orbit."""
    d = x.d
    gens = [ModMatrix(g.entries, p) for g in elementary(d).gens]
    found = [x]
    rows = [list(x.coordinates())]
    frontier = [x]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = conj_action(g, v)
                if _rank_mod_p(rows + [list(w.coordinates())], p) > len(_echelon(rows, p)[0]):
                    rows.append(list(w.coordinates()))
                    found.append(w)
                    nxt.append(w)
        frontier = nxt
    return found


def conjugation_span_rank(x: LieVec, p: int) -> int:
    """Dimension over F_p of the span of {g x g^{-1}}, by linear algebra."""
    return _rank_mod_p([list(v.coordinates()) for v in _conjugate_closure(x, p)], p)


def linear_span_solve(x: LieVec, target: LieVec, p: int):
    """Coefficients c_i with target = sum c_i v_i over conjugates v_i of x, or None."""
    vecs = _conjugate_closure(x, p)
    n = len(vecs)
    D = len(target.coordinates())
    # augmented columns: solve V^T c = t by elimination on [V^T | t]
    A = [[vecs[i].coordinates()[r] for i in range(n)] + [target.coordinates()[r]] for r in range(D)]
    basis, pivots = _echelon(A, p)
    if any(piv == n for piv in pivots):
        return None
    c = [0] * n
    for b, piv in zip(basis, pivots):
        c[piv] = b[n]
    return vecs, c


# ------------------------------------------------------ section statistic

def canonical_section(elements: np.ndarray, p: int) -> np.ndarray:
    """Least-residue lift to Z/p^2, with row 1 scaled by (1 - p t) where
    det(lift) = 1 + p t, giving determinant 1 mod p^2."""
    p2 = p * p
    lift = np.array(elements, dtype=np.int64) % p
    det = batched_det_mod(lift, p2)
    t = ((det - 1) // p) % p
    out = lift.copy()
    out[:, 0, :] = (out[:, 0, :] * ((1 - p * t) % p2)[:, None]) % p2
    return out


@dataclass(frozen=True)
class SectionStat:
    p: int
    multiplicative_pairs: int
    pairs: int
    exhaustive: bool

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.multiplicative_pairs, self.pairs)


def section_multiplicativity_stat(p: int, sample="exhaustive", seed: int = 0, d: int = 2) -> SectionStat:
    """Share of pairs (x, y) in SL_d(F_p)^2 with psi(xy) = psi(x) psi(y) in SL_d(Z/p^2)."""
    table = enumerate_group(elementary(d), p)
    psi = canonical_section(table.elements, p)
    p2 = p * p
    n = table.size
    if sample == "exhaustive":
        hits = 0
        chunk = max(1, 2_000_000 // n)
        allg = np.arange(n)
        for start in range(0, n, chunk):
            xs = np.arange(start, min(n, start + chunk))
            prod = np.matmul(psi[xs][:, None], psi[None]) % p2
            xy = table.mul(xs[:, None], allg[None, :])
            hits += int(np.all(prod == psi[xy], axis=(2, 3)).sum())
        return SectionStat(p, hits, n * n, True)
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, n, int(sample))
    ys = rng.integers(0, n, int(sample))
    prod = np.matmul(psi[xs], psi[ys]) % p2
    hits = int(np.all(prod == psi[table.mul(xs, ys)], axis=(1, 2)).sum())
    return SectionStat(p, hits, int(sample), False)


def section_commutes_with_inversion(p: int, d: int = 2) -> bool:
    table = enumerate_group(elementary(d), p)
    psi = canonical_section(table.elements, p)
    inv = batched_adjugate_mod(psi, p * p)
    return bool(np.array_equal(psi[table.inverse_index], inv))


# ------------------------------------------------------ commutator lifting

@dataclass(frozen=True)
class DinaiResult:
    covers: bool
    classes_reached: int
    classes_needed: int
    well_defined: bool
    pairs_checked: int


def _as_stack(A, N) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return A.astype(np.int64) % N
    return np.array([a.tolist() if hasattr(a, "tolist") else a for a in A], dtype=np.int64) % N


def _in_kernel(M: np.ndarray, level: int) -> np.ndarray:
    d = M.shape[-1]
    return np.all((M - np.eye(d, dtype=np.int64)) % level == 0, axis=(1, 2))


def _covers_level(M: np.ndarray, lo: int, hi: int) -> bool:
    """M . Gamma_hi = Gamma_lo: every element in Gamma_lo and all classes mod hi hit."""
    d = M.shape[-1]
    if not np.all(_in_kernel(M, lo)):
        return False
    need = group_order(d, hi) // (group_order(d, lo) if lo > 1 else 1)
    return len(np.unique(_encode(M % hi, hi))) == need


def _commutators(X: np.ndarray, Y: np.ndarray, N: int) -> np.ndarray:
    Xi, Yi = batched_adjugate_mod(X, N), batched_adjugate_mod(Y, N)
    a = np.matmul(X[:, None], Y[None])
    b = np.matmul(Xi[:, None], Yi[None])
    return (np.matmul(a % N, b % N) % N).reshape(-1, X.shape[-1], X.shape[-1])


def _random_kernel_element(rng, d, level, N):
    w = rng.integers(0, N, size=(d, d))
    m = (np.eye(d, dtype=np.int64) + level * w) % N
    det = int(batched_det_mod(m[None], N)[0])
    m[0] = (m[0] * pow(det, -1, N)) % N
    return m


def dinai_lift_check(p: int, i: int, j: int, k: int, A1, A2, n_pairs: int = 50,
                     seed: int = 0) -> DinaiResult:
    """If A1.Gamma_{p^(i+k)} = Gamma_{p^i} and A2.Gamma_{p^(j+k)} = Gamma_{p^j},
    the 2-fold product of {[a1, a2]} covers Gamma_{p^(i+j)} mod Gamma_{p^(i+j+k)}.

    A1, A2 are given mod N = p^(i+j+k).  Also checks that [a1, a2] mod N only
    depends on a1 mod p^(i+k) and a2 mod p^(j+k), on seeded random lifts.
    """
    N = p ** (i + j + k)
    X, Y = _as_stack(A1, N), _as_stack(A2, N)
    d = X.shape[-1]
    for M in (X, Y):
        if not np.all(batched_det_mod(M, N) == 1 % N):
            raise BadHypothesis("elements must have determinant 1 mod N")
    if not _covers_level(X, p**i, p ** (i + k)) or not _covers_level(Y, p**j, p ** (j + k)):
        raise BadHypothesis("A1 or A2 does not cover its congruence quotient")
    C = _commutators(X, Y, N)
    C = C[np.unique(_encode(C, N), return_index=True)[1]]
    prods = (np.matmul(C[:, None], C[None]) % N).reshape(-1, d, d)
    prods = prods[_in_kernel(prods, p ** (i + j))]
    reached = len(np.unique(_encode(prods, N)))
    need = group_order(d, N) // group_order(d, p ** (i + j))

    rng = np.random.default_rng(seed)
    same = 0
    for _ in range(n_pairs):
        a1 = X[rng.integers(len(X))]
        a2 = Y[rng.integers(len(Y))]
        a1b = (a1 @ _random_kernel_element(rng, d, p ** (i + k), N)) % N
        a2b = (a2 @ _random_kernel_element(rng, d, p ** (j + k), N)) % N
        c1 = _commutators(a1[None], a2[None], N)[0]
        c2 = _commutators(a1b[None], a2b[None], N)[0]
        same += bool(np.array_equal(c1, c2))
    return DinaiResult(reached == need, reached, need, same == n_pairs, n_pairs)

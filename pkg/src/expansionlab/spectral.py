"""The convolution operator T(mu) = chi_S * mu and its spectrum.

T acts on functions on a finite group (or any vertex set with a symmetric
family of permutations) by (T mu)(g) = (1/|S|) sum_s mu(s^{-1} g).
Generators are counted with multiplicity, so colliding generators give
parallel edges and generators congruent to 1 give self-loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainEmpty, NoConvergence, TooLarge, BadLevels
from .groups import GeneratorSet, GroupTable, enumerate_group, kernel_coset
from .walks import walk_distribution

__all__ = [
    "SpectralReport", "apply_T", "is_bipartite", "lambda2", "dense_operator",
    "dense_spectrum", "kernel_block_spectrum", "full_spectrum",
    "eigenvalue_clusters", "trace_identity_check", "expansion_exact",
    "cheeger_bounds", "spectrum_inclusion_check", "DENSE_CAP",
]

DENSE_CAP = 3000


@dataclass
class SpectralReport:
    q: int | None
    group_order: int
    degree: int
    lambda2: float
    iterations: int
    residual: float
    bipartite: bool = False
    history: list[float] = field(default_factory=list, repr=False)


def _inverse_perms(graph) -> list[np.ndarray]:
    cache = getattr(graph, "_inv_left", None)
    if cache is None:
        cache = [np.argsort(p) for p in graph.left_action]
        try:
            graph._inv_left = cache
        except AttributeError:
            pass
    return cache


def apply_T(graph, mu: np.ndarray) -> np.ndarray:
    """(T mu)(g) = (1/k) sum_s mu(s^{-1} g); works on float or Fraction arrays."""
    mu = np.asarray(mu)
    if mu.shape != (graph.left_action.shape[1],):
        raise ValueError(f"vector of length {mu.shape} for a graph on {graph.left_action.shape[1]} vertices")
    inv = _inverse_perms(graph)
    acc = mu[inv[0]]
    for p in inv[1:]:
        acc = acc + mu[p]
    return acc / len(inv)


def is_bipartite(graph) -> tuple[bool, np.ndarray | None]:
    """2-colouring by BFS; returns (bipartite, +-1 colour vector)."""
    n = graph.left_action.shape[1]
    colour = np.zeros(n, dtype=np.int64)
    colour[0] = 1
    frontier = np.array([0])
    while frontier.size:
        nbrs = graph.left_action[:, frontier]                 # (k, F)
        want = -np.broadcast_to(colour[frontier], nbrs.shape)
        got = colour[nbrs]
        if np.any((got != 0) & (got != want)):
            return False, None
        fresh = got == 0
        colour[nbrs[fresh]] = want[fresh]
        frontier = np.unique(nbrs[fresh])
    return True, colour.astype(float)


def lambda2(graph, tol: float = 1e-10, max_iter: int = 1_000_000, seed: int = 0,
            record_history: bool = False) -> SpectralReport:
    """Largest eigenvalue of T on the orthogonal complement of the constants.

    Power iteration on the positive semidefinite operator (I + T)/2, with
    the constant vector (and the bipartite sign vector, when present)
    projected out at every step.  Stops when ||T x - rho x|| < tol.
    """
    n = graph.left_action.shape[1]
    bip, sign = is_bipartite(graph)
    deflate = [np.full(n, 1 / math.sqrt(n))]
    if bip:
        deflate.append(sign / math.sqrt(n))
    if n <= len(deflate):
        raise DomainEmpty(f"no non-trivial eigenvalue on {n} vertices")

    def project(v):
        for u in deflate:
            v = v - (u @ v) * u
        return v

    rng = np.random.default_rng(seed)
    x = project(rng.standard_normal(n))
    x /= np.linalg.norm(x)
    history = []
    rho, res = float("nan"), float("inf")
    for it in range(1, max_iter + 1):
        y = apply_T(graph, x)
        rho = float(x @ y)
        res = float(np.linalg.norm(y - rho * x))
        if record_history:
            history.append(rho)
        if res < tol:
            break
        x = project(0.5 * (x + y))
        x /= np.linalg.norm(x)
    else:
        raise NoConvergence(f"no convergence after {max_iter} iterations (residual {res:.3e})",
                            estimate=rho)
    return SpectralReport(getattr(graph, "q", None), n, graph.left_action.shape[0], rho, it, res,
                          bip, history)


def dense_operator(graph, cap: int = DENSE_CAP) -> np.ndarray:
    """T as a dense matrix: T[g, h] = #{s : s h = g} / k."""
    k, n = graph.left_action.shape
    if n > cap:
        raise TooLarge(f"{n} vertices exceed the dense cap {cap}")
    T = np.zeros((n, n))
    cols = np.arange(n)
    for p in graph.left_action:
        np.add.at(T, (p, cols), 1.0)
    return T / k


def dense_spectrum(graph, cap: int = DENSE_CAP) -> np.ndarray:
    """All eigenvalues of T, descending."""
    return np.linalg.eigvalsh(dense_operator(graph, cap))[::-1]


def _psi_coordinates(mats: np.ndarray, q1: int, m: int) -> np.ndarray:
    """Coordinates of Psi_{q1}^{q1 m} for a stack of matrices = 1 mod q1."""
    d = mats.shape[-1]
    a = ((mats - np.eye(d, dtype=np.int64)) // q1) % m
    off = [a[:, i, j] for i in range(d) for j in range(d) if i != j]
    diag = [a[:, : i + 1, : i + 1].diagonal(axis1=1, axis2=2).sum(axis=1) % m for i in range(d - 1)]
    return np.stack(off + diag, axis=1)


def kernel_block_spectrum(table: GroupTable, coarse: GroupTable) -> np.ndarray:
    """Full spectrum of T on the table mod q2, block-diagonalized over the
    characters of the abelian kernel Gamma_{q1}/Gamma_{q2} (q1 | q2 | q1^2).

    Right translation by the kernel commutes with T, so l^2(G) splits into
    one |G/N|-dimensional block per character of N.  Characters are read off
    through Psi: chi_b(n) = e(<b, Psi(n)> / (q2/q1)).
    """
    q2, q1 = table.q, coarse.q
    if q2 % q1 or (q1 * q1) % q2:
        raise BadLevels(f"need q1 | q2 | q1^2, got {q1}, {q2}")
    d, m = table.d, q2 // q1
    D = d * d - 1
    red = table.reduce_indices(coarse)
    C = coarse.size
    if len(kernel_coset(table, q1)) != m**D or len(np.unique(red)) != C:
        raise BadLevels("table does not contain the full kernel / does not surject")
    _, rep = np.unique(red, return_index=True)                # rep[c]: first element over class c
    allg = np.arange(table.size)
    kern = table.mul(table.inverse_index[rep[red]], allg)      # rep^{-1} g
    coords = _psi_coordinates(table.elements[kern], q1, m)      # (N, D)
    bs = np.stack(np.meshgrid(*[np.arange(m)] * D, indexing="ij"), axis=-1).reshape(-1, D)
    k = table.degree
    inv = _inverse_perms(table)
    M = np.zeros((len(bs), C, C), dtype=complex)
    rows = np.arange(C)
    for p in inv:
        h = p[rep]                                              # s^{-1} rep_{c'}
        phase = np.exp(2j * np.pi * (bs @ coords[h].T) / m)     # (B, C)
        for bi in range(len(bs)):
            np.add.at(M[bi], (rows, red[h]), phase[bi])
    M /= k
    eig = np.linalg.eigvalsh(M).ravel()
    return np.sort(eig)[::-1]


def full_spectrum(table: GroupTable, cap: int = DENSE_CAP, coarse: GroupTable | None = None) -> np.ndarray:
    if table.size <= cap:
        return dense_spectrum(table, cap)
    if coarse is None:
        raise TooLarge(f"{table.size} elements exceed the dense cap {cap}")
    return kernel_block_spectrum(table, coarse)


def eigenvalue_clusters(eigs, tol: float = 1e-8) -> list[tuple[float, int]]:
    """Group sorted eigenvalues into (value, numerical multiplicity) clusters."""
    eigs = np.sort(np.asarray(eigs))[::-1]
    out: list[list] = []
    for e in eigs:
        if out and abs(out[-1][2] - e) <= tol:
            out[-1][1] += 1
            out[-1][2] = e
        else:
            out.append([e, 1, e])
    return [(float(v), c) for v, c, _ in out]


def trace_identity_check(table: GroupTable, l: int, cap: int = DENSE_CAP):
    """Tr(T^{2l}) against |G| * ||chi_S^{(l)}||_2^2, both as exact rationals.

    The left side sums return counts over the standard basis using integer
    powers of the adjacency matrix; the right side comes from the exact
    walk measure.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    k, n = table.left_action.shape
    if n > cap:
        raise TooLarge(f"{n} elements exceed cap {cap}")
    dtype = np.int64 if n * k ** (2 * l) < 2**62 else object
    A = np.zeros((n, n), dtype=dtype)
    cols = np.arange(n)
    for p in table.left_action:
        np.add.at(A, (p, cols), 1)
    P = np.eye(n, dtype=dtype)
    for _ in range(l):
        P = A @ P
    trace = sum(int(x) for x in (P * P.T).sum(axis=0))        # sum_g <A^l e_g, (A^l)^T e_g>
    lhs = Fraction(trace, k ** (2 * l))
    rhs = n * walk_distribution(table, l).l2_squared()
    return lhs, rhs, lhs == rhs


def expansion_exact(graph, cap: int = 24) -> Fraction:
    """min |dX| / |X| over nonempty X with |X| <= |V|/2, by exhaustive bitmasks.

    |dX| counts pairs (x in X, s in S) with s x outside X, i.e. boundary
    edges of the |S|-regular multigraph.
    """
    k, n = graph.left_action.shape
    if n > cap:
        raise TooLarge(f"{n} vertices exceed the exhaustive cap {cap}")
    if n < 2:
        raise DomainEmpty("no admissible X with |X| <= |V|/2")
    best_num, best_den = None, None
    total = 1 << n
    chunk = 1 << min(n, 20)
    for start in range(1, total, chunk):
        X = np.arange(start, min(total, start + chunk), dtype=np.uint32)
        size = np.bitwise_count(X).astype(np.int64)
        keep = size <= n // 2
        X, size = X[keep], size[keep]
        if X.size == 0:
            continue
        boundary = np.zeros(X.size, dtype=np.int64)
        for perm in graph.left_action:
            img = np.zeros_like(X)
            for v in range(n):
                img |= ((X >> np.uint32(v)) & np.uint32(1)) << np.uint32(perm[v])
            boundary += np.bitwise_count(img & ~X)
        i = int(np.argmin(boundary / size))
        if best_num is None or boundary[i] * best_den < best_num * size[i]:
            best_num, best_den = int(boundary[i]), int(size[i])
    return Fraction(best_num, best_den)


def cheeger_bounds(report: SpectralReport) -> tuple[float, float]:
    """(k(1 - lambda2)/2, k sqrt(2(1 - lambda2))) for the edge expansion."""
    k, lam = report.degree, report.lambda2
    gap = max(0.0, 1.0 - lam)
    return k * gap / 2, k * math.sqrt(2 * gap)


def spectrum_inclusion_check(S: GeneratorSet, q1: int, q2: int, tol: float = 1e-8,
                             cap: int = DENSE_CAP, detail: bool = False):
    """Every eigenvalue of T_{q1} lies within tol of an eigenvalue of T_{q2}."""
    if q2 % q1:
        raise BadLevels(f"{q1} does not divide {q2}")
    t1 = enumerate_group(S, q1)
    e1 = dense_spectrum(t1, cap)
    if q1 == q2:
        e2 = e1
    else:
        t2 = enumerate_group(S, q2)
        coarse = t1 if (q1 * q1) % q2 == 0 else None
        e2 = full_spectrum(t2, cap, coarse)
    e2s = np.sort(e2)
    pos = np.clip(np.searchsorted(e2s, e1), 1, len(e2s) - 1)
    gaps = np.minimum(np.abs(e2s[pos - 1] - e1), np.abs(e2s[pos] - e1))
    if len(e2s) == 1:
        gaps = np.abs(e2s[0] - e1)
    ok = bool(np.all(gaps <= tol))
    if detail:
        return ok, {"q1": q1, "q2": q2, "n1": len(e1), "n2": len(e2), "max_gap": float(gaps.max())}
    return ok

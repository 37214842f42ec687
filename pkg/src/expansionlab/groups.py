"""BFS enumeration of pi_q(<S>) as an indexed group table.

The Cayley graph is kept implicit: for every generator we store the
permutation of element indices induced by left and by right
multiplication.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .algebra import IntMatrix, ModMatrix, group_order
from .errors import ConfigError, NotADivisor, NotUnimodular, TooLarge

__all__ = [
    "GeneratorSet", "GroupTable", "PermutationGraph", "enumerate_group",
    "is_full", "kernel_coset", "word_entry_bound", "sanov", "elementary",
    "load_generators", "batched_det_mod", "batched_adjugate_mod",
    "cycle_graph", "complete_graph", "DEFAULT_CAP",
]

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class GeneratorSet:
    d: int
    gens: tuple[IntMatrix, ...]
    symmetrized: bool = False

    def __post_init__(self):
        for g in self.gens:
            if g.d != self.d:
                raise ConfigError(f"generator of size {g.d} in a d={self.d} set")
            if g.det() != 1:
                raise NotUnimodular(f"generator {g.tolist()} has det {g.det()}")

    @classmethod
    def from_matrices(cls, mats, symmetrize: bool = True) -> "GeneratorSet":
        gens = [m if isinstance(m, IntMatrix) else IntMatrix(m) for m in mats]
        if not gens:
            raise ConfigError("empty generator set")
        d = gens[0].d
        if symmetrize:
            for g in list(gens):
                gi = g.inverse()
                if gi not in gens:
                    gens.append(gi)
        return cls(d, tuple(gens), symmetrize)

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def is_symmetric(self) -> bool:
        return all(g.inverse() in self.gens for g in self.gens)

    def inverse_positions(self) -> list[int]:
        """Position of s^{-1} in the list for every s (requires symmetry)."""
        return [self.gens.index(g.inverse()) for g in self.gens]

    def to_json(self) -> str:
        base = self.gens
        if self.symmetrized:
            base = self.gens[: _n_original(self.gens)]
        return json.dumps({"d": self.d, "generators": [g.tolist() for g in base],
                           "symmetrize": self.symmetrized})


def _n_original(gens) -> int:
    # the symmetrized list is originals followed by the new inverses
    n = len(gens)
    for k in range(1, n + 1):
        head = list(gens[:k])
        tail = head[:]
        for g in head:
            gi = g.inverse()
            if gi not in tail:
                tail.append(gi)
        if tuple(tail) == tuple(gens):
            return k
    return n


def load_generators(path) -> GeneratorSet:
    """Read a generator-set JSON file: {"d", "generators", "symmetrize"}."""
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read generator file {path}: {exc}") from exc
    if not isinstance(cfg, dict) or not cfg.get("generators"):
        raise ConfigError(f"{path}: no generators")
    gs = GeneratorSet.from_matrices(cfg["generators"], symmetrize=bool(cfg.get("symmetrize", True)))
    if "d" in cfg and cfg["d"] != gs.d:
        raise ConfigError(f"{path}: declared d={cfg['d']} but matrices are {gs.d}x{gs.d}")
    return gs


def sanov() -> GeneratorSet:
    """[[1,2],[0,1]], [[1,0],[2,1]] and their inverses (free, Zariski dense)."""
    return GeneratorSet.from_matrices([[[1, 2], [0, 1]], [[1, 0], [2, 1]]])


def elementary(d: int = 2) -> GeneratorSet:
    """Elementary matrices 1 + E_{i,i+1}, 1 + E_{i+1,i} and inverses."""
    mats = []
    for i in range(d - 1):
        for a, b in ((i, i + 1), (i + 1, i)):
            m = [[int(r == c) for c in range(d)] for r in range(d)]
            m[a][b] = 1
            mats.append(m)
    return GeneratorSet.from_matrices(mats)


def batched_det_mod(M: np.ndarray, q: int) -> np.ndarray:
    """Determinants mod q of a stack (N, d, d) of int64 matrices."""
    d = M.shape[-1]
    if d == 1:
        return M[:, 0, 0] % q
    if d == 2:
        return (M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]) % q
    out = np.zeros(M.shape[0], dtype=np.int64)
    for j in range(d):
        minor = np.delete(np.delete(M, 0, axis=1), j, axis=2)
        term = (M[:, 0, j] * batched_det_mod(minor, q)) % q
        out = (out + term) if j % 2 == 0 else (out - term)
    return out % q


def batched_adjugate_mod(M: np.ndarray, q: int) -> np.ndarray:
    d = M.shape[-1]
    adj = np.empty_like(M)
    if d == 2:
        adj[:, 0, 0] = M[:, 1, 1]
        adj[:, 1, 1] = M[:, 0, 0]
        adj[:, 0, 1] = -M[:, 0, 1]
        adj[:, 1, 0] = -M[:, 1, 0]
        return adj % q
    for i in range(d):
        for j in range(d):
            minor = np.delete(np.delete(M, i, axis=1), j, axis=2)
            sign = 1 if (i + j) % 2 == 0 else -1
            adj[:, j, i] = sign * batched_det_mod(minor, q)
    return adj % q


@dataclass
class PermutationGraph:
    """Vertex set 0..n-1 with one permutation per (symmetric) generator.

    ``left_action[s][v]`` is the neighbour of ``v`` along generator ``s``.
    """

    left_action: np.ndarray

    @property
    def size(self) -> int:
        return self.left_action.shape[1]

    @property
    def degree(self) -> int:
        return self.left_action.shape[0]


def cycle_graph(n: int) -> PermutationGraph:
    v = np.arange(n)
    return PermutationGraph(np.stack([(v + 1) % n, (v - 1) % n]))


def complete_graph(n: int) -> PermutationGraph:
    v = np.arange(n)
    return PermutationGraph(np.stack([(v + k) % n for k in range(1, n)]))


@dataclass
class GroupTable:
    """Indexed enumeration of pi_q(<S>); index 0 is the identity."""

    q: int
    gens: GeneratorSet
    elements: np.ndarray          # (N, d, d) int64, residues in [0, q)
    right_action: np.ndarray      # (k, N): index of g*s
    left_action: np.ndarray       # (k, N): index of s*g
    inverse_index: np.ndarray     # (N,)
    parent: np.ndarray            # BFS tree: element = elements[parent] * gens[parent_gen]
    parent_gen: np.ndarray
    _sorted_keys: np.ndarray = field(repr=False)
    _sort_idx: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.gens.d

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def __len__(self):
        return self.size

    @property
    def degree(self) -> int:
        return len(self.gens)

    def encode(self, mats: np.ndarray) -> np.ndarray:
        return _encode(mats, self.q)

    def index_of_keys(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        if not np.array_equal(self._sorted_keys[pos], keys):
            raise KeyError("matrix not in the table")
        return self._sort_idx[pos]

    def index_of_arrays(self, mats: np.ndarray) -> np.ndarray:
        return self.index_of_keys(self.encode(np.asarray(mats, dtype=np.int64) % self.q))

    def index_of(self, m) -> int:
        arr = np.array(m.entries if hasattr(m, "entries") else m, dtype=np.int64)[None]
        return int(self.index_of_arrays(arr)[0])

    def element(self, i: int) -> ModMatrix:
        return ModMatrix(self.elements[i].tolist(), self.q)

    def mul(self, a, b) -> np.ndarray:
        """Indices of elements[a] @ elements[b] (broadcasting index arrays)."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        prod = np.matmul(self.elements[a.ravel()], self.elements[b.ravel()]) % self.q
        return self.index_of_arrays(prod).reshape(a.shape)

    @cached_property
    def multiplication_table(self) -> np.ndarray:
        """Flat (N, N) int32 table; only built when N^2 <= 1e8."""
        n = self.size
        if n * n > 100_000_000:
            raise TooLarge(f"multiplication table would have {n * n} entries")
        out = np.empty((n, n), dtype=np.int32)
        chunk = max(1, 2_000_000 // n)
        cols = np.arange(n)
        for start in range(0, n, chunk):
            rows = np.arange(start, min(n, start + chunk))
            out[rows] = self.mul(rows[:, None], cols[None, :])
        return out

    def lift(self, i: int) -> IntMatrix:
        """An integer matrix in SL_d(Z) (a word in S) reducing to element i."""
        word = []
        while i != 0:
            word.append(int(self.parent_gen[i]))
            i = int(self.parent[i])
        g = IntMatrix.identity(self.d)
        for s in reversed(word):
            g = g @ self.gens.gens[s]
        return g

    def word(self, i: int) -> list[int]:
        out = []
        while i != 0:
            out.append(int(self.parent_gen[i]))
            i = int(self.parent[i])
        return out[::-1]

    def reduce_indices(self, other: "GroupTable") -> np.ndarray:
        """For each element here, the index of its image in a table mod q' | q."""
        if self.q % other.q:
            raise NotADivisor(f"{other.q} does not divide {self.q}")
        return other.index_of_arrays(self.elements % other.q)


def _encode(mats: np.ndarray, q: int) -> np.ndarray:
    flat = mats.reshape(mats.shape[0], -1)
    if float(q) ** flat.shape[1] >= 2.0**63:
        raise TooLarge(f"q^{flat.shape[1]} does not fit a 64-bit key")
    weights = q ** np.arange(flat.shape[1], dtype=np.int64)
    return flat @ weights


def enumerate_group(S: GeneratorSet, q, cap: int = DEFAULT_CAP) -> GroupTable:
    """Breadth-first enumeration of the subgroup of SL_d(Z/q) generated by S."""
    q = int(q)
    if q < 2:
        raise ValueError("q must be >= 2")
    d = S.d
    gens = np.array([g.tolist() for g in S.gens], dtype=np.int64) % q
    k = len(gens)
    ident = np.eye(d, dtype=np.int64)[None]
    levels = [ident]
    parents = [np.array([0])]
    pgens = [np.array([-1])]
    seen = np.sort(_encode(ident, q))
    frontier = ident
    total = 1
    offset = 0
    while frontier.shape[0]:
        cand = (np.matmul(frontier[:, None], gens[None]) % q).reshape(-1, d, d)
        keys = _encode(cand, q)
        _, first = np.unique(keys, return_index=True)
        first.sort()
        fresh = first[~np.isin(keys[first], seen, assume_unique=False)]
        new = cand[fresh]
        total += new.shape[0]
        if total > cap:
            raise TooLarge(f"group mod {q} exceeds cap {cap}")
        levels.append(new)
        parents.append(offset + fresh // k)
        pgens.append(fresh % k)
        offset += frontier.shape[0]
        seen = np.sort(np.concatenate([seen, keys[fresh]]))
        frontier = new
    elements = np.concatenate(levels)
    keys = _encode(elements, q)
    sort_idx = np.argsort(keys)
    sorted_keys = keys[sort_idx]

    def lookup(mats):
        kk = _encode(mats, q)
        return sort_idx[np.searchsorted(sorted_keys, kk)]

    right = np.stack([lookup(np.matmul(elements, g) % q) for g in gens])
    left = np.stack([lookup(np.matmul(g, elements) % q) for g in gens])
    inv = lookup(batched_adjugate_mod(elements, q))
    return GroupTable(q, S, elements, right, left, inv,
                      np.concatenate(parents), np.concatenate(pgens),
                      sorted_keys, sort_idx)


def is_full(table: GroupTable, d: int | None = None) -> bool:
    """True iff the table is all of SL_d(Z/qZ)."""
    return table.size == group_order(d or table.d, table.q)


def kernel_coset(table: GroupTable, qprime: int) -> np.ndarray:
    """Indices of elements congruent to the identity mod q' (Gamma_{q'}/Gamma_q)."""
    if table.q % qprime:
        raise NotADivisor(f"{qprime} does not divide {table.q}")
    ident = np.eye(table.d, dtype=np.int64)
    mask = np.all((table.elements - ident) % qprime == 0, axis=(1, 2))
    return np.flatnonzero(mask)


def word_entry_bound(S: GeneratorSet, length: int, cap: int = 2_000_000) -> int:
    """Maximum |entry| over all products of exactly ``length`` generators."""
    if length < 0:
        raise ValueError("length must be >= 0")
    current = {IntMatrix.identity(S.d).entries}
    for _ in range(length):
        nxt = set()
        for m in current:
            for s in S.gens:
                nxt.add((IntMatrix(m) @ s).entries)
        if len(nxt) > cap:
            raise TooLarge(f"{len(nxt)} distinct words exceed cap {cap}")
        current = nxt
    return max(abs(x) for m in current for r in m for x in r)

"""sl_d(Z/qZ), the congruence quotient maps Psi and the adjoint action.

For q1 | q2 | q1^2 the map

    Psi_{q1}^{q2}(g) = ((g - 1) / q1)  mod  q2/q1

identifies Gamma_{q1}/Gamma_{q2} with the additive group sl_d(Z/(q2/q1)).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .algebra import IntMatrix, ModMatrix, _matmul
from .errors import BadLevels, ModulusMismatch, NotInKernel

__all__ = [
    "LieVec", "CongruenceElement", "E", "lie_basis", "bracket", "psi",
    "conj_action", "check_sum_identity", "check_adjoint_identity",
    "check_bracket_identity", "psi_identity_check", "coset_representatives",
    "all_lie_vectors",
]


@dataclass(frozen=True)
class LieVec:
    """Trace-zero d x d matrix over Z/qZ."""

    entries: tuple[tuple[int, ...], ...]
    q: int

    def __init__(self, entries, q):
        q = int(q)
        ent = tuple(tuple(int(x) % q for x in r) for r in entries)
        if sum(ent[i][i] for i in range(len(ent))) % q:
            raise ValueError(f"trace is not 0 mod {q}: {ent}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "entries", ent)

    @classmethod
    def zero(cls, d, q):
        return cls([[0] * d for _ in range(d)], q)

    @classmethod
    def from_coordinates(cls, coords, d, q) -> "LieVec":
        """Inverse of :meth:`coordinates`."""
        m = [[0] * d for _ in range(d)]
        off = [(i, j) for i in range(d) for j in range(d) if i != j]
        for (i, j), c in zip(off, coords[: len(off)]):
            m[i][j] = c
        h = list(coords[len(off):])
        # v = sum_i h_i (E_ii - E_{i+1,i+1})
        for i in range(d):
            m[i][i] = (h[i] if i < d - 1 else 0) - (h[i - 1] if i > 0 else 0)
        return cls(m, q)

    @property
    def d(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _check(self, other):
        if self.q != other.q or self.d != other.d:
            raise ModulusMismatch(f"sl_{self.d}(Z/{self.q}) vs sl_{other.d}(Z/{other.q})")

    def __add__(self, other):
        self._check(other)
        return LieVec([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.q)

    def __sub__(self, other):
        self._check(other)
        return LieVec([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.q)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: int) -> "LieVec":
        return LieVec([[c * a for a in r] for r in self.entries], self.q)

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)

    def coordinates(self) -> tuple[int, ...]:
        """Coordinates in the basis {E_ij : i != j} + {E_ii - E_{i+1,i+1}}.

        Off-diagonal entries come first in row-major order; the coefficient
        of E_ii - E_{i+1,i+1} is the partial diagonal sum v_11 + ... + v_ii.
        """
        d, q = self.d, self.q
        off = tuple(self.entries[i][j] for i in range(d) for j in range(d) if i != j)
        diag = tuple(sum(self.entries[k][k] for k in range(i + 1)) % q for i in range(d - 1))
        return off + diag

    def reduce(self, q) -> "LieVec":
        q = int(q)
        if self.q % q:
            raise BadLevels(f"{q} does not divide {self.q}")
        return LieVec(self.entries, q)

    def tolist(self):
        return [list(r) for r in self.entries]


def E(i: int, j: int, d: int, q) -> ModMatrix:
    """Matrix unit E_{i,j} (0-based indices) over Z/qZ."""
    return ModMatrix([[int(r == i and c == j) for c in range(d)] for r in range(d)], q)


def lie_basis(d: int, q) -> list[LieVec]:
    """The basis E_ij (i != j) followed by E_ii - E_{i+1,i+1}."""
    out = [LieVec(E(i, j, d, q).entries, q) for i in range(d) for j in range(d) if i != j]
    for i in range(d - 1):
        out.append(LieVec((E(i, i, d, q) - E(i + 1, i + 1, d, q)).entries, q))
    return out


def all_lie_vectors(d: int, q) -> Iterator[LieVec]:
    q = int(q)
    for coords in itertools.product(range(q), repeat=d * d - 1):
        yield LieVec.from_coordinates(coords, d, q)


def bracket(u: LieVec, v: LieVec) -> LieVec:
    """[u, v] = uv - vu."""
    u._check(v)
    uv = _matmul(u.entries, v.entries)
    vu = _matmul(v.entries, u.entries)
    return LieVec([[a - b for a, b in zip(r, s)] for r, s in zip(uv, vu)], u.q)


@dataclass(frozen=True)
class CongruenceElement:
    """An integer lift g in Gamma_{level}, i.e. g = 1 mod level."""

    g: IntMatrix
    level: int

    def __post_init__(self):
        if self.g.det() != 1:
            raise NotInKernel("not an element of SL_d(Z)")
        _require_kernel(self.g.entries, self.level)


def _require_kernel(entries, q1):
    for i, r in enumerate(entries):
        for j, x in enumerate(r):
            if (x - (i == j)) % q1:
                raise NotInKernel(f"entry ({i},{j}) = {x} is not {int(i == j)} mod {q1}")


def _check_levels(q1: int, q2: int):
    if q1 < 1 or q2 % q1 or (q1 * q1) % q2:
        raise BadLevels(f"need q1 | q2 | q1^2, got q1={q1}, q2={q2}")


def psi(x, q1: int, q2: int) -> LieVec:
    """Psi_{q1}^{q2}(x) in sl_d(Z/(q2/q1)).

    ``x`` may be an :class:`IntMatrix`, a :class:`CongruenceElement`, or a
    :class:`ModMatrix` whose modulus is a multiple of ``q2``.
    """
    q1, q2 = int(q1), int(q2)
    _check_levels(q1, q2)
    if isinstance(x, CongruenceElement):
        if x.level % q1:
            raise NotInKernel(f"element of level {x.level} is not in Gamma_{q1}")
        x = x.g
    if isinstance(x, ModMatrix) and x.q % q2:
        raise BadLevels(f"residues mod {x.q} do not determine the class mod {q2}")
    ent = x.entries
    _require_kernel(ent, q1)
    d = len(ent)
    return LieVec([[(ent[i][j] - (i == j)) // q1 for j in range(d)] for i in range(d)], q2 // q1)


def conj_action(g, v: LieVec) -> LieVec:
    """g v g^{-1} mod q.  ``g`` may be an IntMatrix or a ModMatrix whose
    modulus is a multiple of v.q."""
    if isinstance(g, IntMatrix):
        gm = ModMatrix(g.entries, v.q)
    else:
        if g.q % v.q:
            raise ModulusMismatch(f"conjugator mod {g.q} cannot act on sl_d(Z/{v.q})")
        gm = ModMatrix(g.entries, v.q)
    if gm.d != v.d:
        raise ModulusMismatch("dimension mismatch")
    out = _matmul(_matmul(gm.entries, v.entries), gm.inverse().entries)
    return LieVec(out, v.q)


def _as_mod(x, N):
    return ModMatrix(x.entries if not isinstance(x, CongruenceElement) else x.g.entries, N)


def check_sum_identity(x, y, q1: int, q2: int) -> bool:
    """Psi(xy) == Psi(x) + Psi(y)."""
    _check_levels(q1, q2)
    if isinstance(x, ModMatrix) or isinstance(y, ModMatrix):
        xy = _as_mod(x, q2) @ _as_mod(y, q2)
    else:
        xy = _lift(x) @ _lift(y)
    return psi(xy, q1, q2) == psi(x, q1, q2) + psi(y, q1, q2)


def check_adjoint_identity(g, x, q1: int, q2: int) -> bool:
    """Psi(g x g^{-1}) == pi_{q2/q1}(g) Psi(x) pi_{q2/q1}(g^{-1})."""
    _check_levels(q1, q2)
    if isinstance(g, IntMatrix) and not isinstance(x, ModMatrix):
        lhs = psi(g @ _lift(x) @ g.inverse(), q1, q2)
    else:
        gm = _as_mod(g, q2)
        lhs = psi(gm @ _as_mod(x, q2) @ gm.inverse(), q1, q2)
    return lhs == conj_action(g if isinstance(g, IntMatrix) else _as_mod(g, q2), psi(x, q1, q2))


def check_bracket_identity(x, y, q1: int, q2: int, q3: int) -> bool:
    """Psi_{q1q2}^{q1q2q3}([x, y]_group) == [Psi_{q1}^{q1q3}(x), Psi_{q2}^{q2q3}(y)]."""
    if q1 % q3 or q2 % q3:
        raise BadLevels(f"need q3 | q1 and q3 | q2, got ({q1},{q2},{q3})")
    if isinstance(x, ModMatrix) or isinstance(y, ModMatrix):
        N = q1 * q2 * q3
        xm, ym = _as_mod(x, N), _as_mod(y, N)
        comm = xm @ ym @ xm.inverse() @ ym.inverse()
    else:
        xi, yi = _lift(x), _lift(y)
        comm = xi @ yi @ xi.inverse() @ yi.inverse()
    lhs = psi(comm, q1 * q2, q1 * q2 * q3)
    return lhs == bracket(psi(x, q1, q1 * q3), psi(y, q2, q2 * q3))


def _lift(x):
    return x.g if isinstance(x, CongruenceElement) else x


def psi_identity_check(kind: str, *witnesses, levels) -> bool:
    """Dispatch to the sum / adjoint / bracket identity checks."""
    if kind == "sum":
        return check_sum_identity(*witnesses, *levels)
    if kind == "adjoint":
        return check_adjoint_identity(*witnesses, *levels)
    if kind == "bracket":
        return check_bracket_identity(*witnesses, *levels)
    raise ValueError(f"unknown identity {kind!r}")


def coset_representatives(d: int, q1: int, q2: int, level: int | None = None) -> list[ModMatrix]:
    """One representative of each class of Gamma_{q1}/Gamma_{q2}, obtained by
    inverting Psi: 1 + q1*w for w in sl_d(Z/(q2/q1)).

    Representatives are returned mod ``level`` (default q2; must be a
    multiple of q2).  The first row is rescaled by det^{-1}, which is 1 mod
    q2, so each representative has determinant exactly 1 mod ``level``.
    """
    _check_levels(q1, q2)
    N = q2 if level is None else int(level)
    if N % q2:
        raise BadLevels(f"level {N} is not a multiple of q2={q2}")
    reps = []
    for w in all_lie_vectors(d, q2 // q1):
        m = [[(i == j) + q1 * w[i, j] for j in range(d)] for i in range(d)]
        x = ModMatrix(m, N)
        det = x.det()
        if det != 1 % N:
            c = pow(det, -1, N)
            x = ModMatrix([[c * a for a in x.entries[0]]] + [list(r) for r in x.entries[1:]], N)
        reps.append(x)
    return reps


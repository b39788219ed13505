"""Linear codes over F2, F3, F4 and the predicates used by the engines.

A code is stored through a k x n generator matrix of rank k.  Weight data
is computed geometrically: the distinct normalized nonzero columns are the
points of a multiset in PG(k-1, q), and the codeword belonging to a
message h has weight equal to the number of columns not on the hyperplane
h . x = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .gf import FieldSpec, field_for, matmul, normalize_rows, rank, rref

__all__ = [
    "RankDeficientError",
    "LinearCode",
    "PointMultiset",
    "all_vectors",
    "projective_points",
    "vector_index",
    "systematize",
    "codeword_weights",
    "min_distance",
    "dual_distance",
    "meets_dual_distance",
    "column_multiset",
    "is_divisible",
    "is_even",
    "is_self_orthogonal",
    "is_projective",
    "minimal_codeword_count",
    "dual",
]

# dual distance by enumeration of the dual code is used up to this many words
_DUAL_ENUM_LIMIT = 1 << 20


class RankDeficientError(ValueError):
    """The supplied generator matrix does not have full row rank."""


@lru_cache(maxsize=64)
def all_vectors(q: int, k: int) -> np.ndarray:
    """All of F_q^k; row i holds the base-q digits of i, least significant first."""
    idx = np.arange(q**k, dtype=np.int64)
    out = np.empty((q**k, k), dtype=np.uint8)
    for j in range(k):
        out[:, j] = idx % q
        idx //= q
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def projective_points(q: int, k: int) -> np.ndarray:
    """Normalized representatives (first nonzero entry 1) of PG(k-1, q)."""
    v = all_vectors(q, k)
    nz = v != 0
    has = nz.any(axis=1)
    lead = v[np.arange(len(v)), np.argmax(nz, axis=1)]
    pts = v[has & (lead == 1)]
    pts.setflags(write=False)
    return pts


def vector_index(v: np.ndarray, q: int) -> np.ndarray:
    """Inverse of :func:`all_vectors` along the last axis."""
    v = np.asarray(v, dtype=np.int64)
    w = q ** np.arange(v.shape[-1], dtype=np.int64)
    return v @ w


@dataclass(frozen=True)
class PointMultiset:
    """Column multiset of a code as normalized projective points."""

    q: int
    k: int
    points: tuple[tuple[int, ...], ...]
    mults: tuple[int, ...]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(zip(self.points, self.mults))

    @property
    def size(self) -> int:
        return sum(self.mults)

    def min_multiplicity(self) -> int:
        return min(self.mults) if self.mults else 0


class LinearCode:
    """A k-dimensional subspace of F_q^n given by a generator matrix.

    Equality and hashing are by subspace (same q, same n and the same
    reduced row echelon form), not by the particular generator matrix.
    """

    __slots__ = ("_gen", "q", "__dict__")

    def __init__(self, gen, q: int, *, check: bool = True):
        f = field_for(q)
        g = np.array(gen, dtype=np.uint8, copy=True)
        if g.ndim != 2:
            raise ValueError("generator matrix must be two-dimensional")
        if check:
            if g.size and int(g.max()) >= q:
                raise ValueError(f"entry out of range for F{q}")
            k, n = g.shape
            if k < 1 or n < k:
                raise RankDeficientError(f"need 1 <= k <= n, got k={k}, n={n}")
            if rank(g, f) != k:
                raise RankDeficientError("generator matrix is rank deficient")
        g.setflags(write=False)
        self._gen = g
        self.q = q

    @classmethod
    def from_rows(cls, rows: Sequence[str] | str, q: int) -> "LinearCode":
        """Build from strings of digits, e.g. ``["1011", "0110"]`` or ``"1011 0110"``."""
        if isinstance(rows, str):
            rows = rows.split()
        return cls([[int(ch) for ch in r] for r in rows], q)

    # basic shape ---------------------------------------------------------
    @property
    def gen(self) -> np.ndarray:
        return self._gen

    @property
    def field(self) -> FieldSpec:
        return field_for(self.q)

    @property
    def k(self) -> int:
        return self._gen.shape[0]

    @property
    def n(self) -> int:
        return self._gen.shape[1]

    def __repr__(self) -> str:
        rows = " ".join("".join(map(str, r)) for r in self._gen)
        return f"LinearCode(q={self.q}, n={self.n}, k={self.k}, rows='{rows}')"

    @cached_property
    def rref(self) -> np.ndarray:
        r, _ = rref(self._gen, self.field)
        r.setflags(write=False)
        return r

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return (
            self.q == other.q
            and self._gen.shape == other._gen.shape
            and np.array_equal(self.rref, other.rref)
        )

    def __hash__(self) -> int:
        return hash((self.q, self._gen.shape, self.rref.tobytes()))

    def rows_as_strings(self) -> list[str]:
        return ["".join(map(str, r)) for r in self._gen]

    # geometry ------------------------------------------------------------
    @cached_property
    def _point_data(self):
        """(points m x k, multiplicities, column -> point index or -1, column scale)."""
        f = self.field
        cols = self._gen.T
        normed = normalize_rows(cols, f)
        nonzero = cols.any(axis=1)
        col_point = np.full(self.n, -1, dtype=np.int64)
        if nonzero.any():
            pts, inverse, mult = np.unique(
                normed[nonzero], axis=0, return_inverse=True, return_counts=True
            )
            col_point[nonzero] = inverse.reshape(-1)
        else:
            pts = np.zeros((0, self.k), dtype=np.uint8)
            mult = np.zeros(0, dtype=np.int64)
        first = np.argmax(cols != 0, axis=1)
        scale = np.where(nonzero, cols[np.arange(self.n), first], 0).astype(np.uint8)
        return pts.astype(np.uint8), mult.astype(np.int64), col_point, scale

    @property
    def zero_coords(self) -> list[int]:
        return [int(i) for i in np.nonzero(self._point_data[2] < 0)[0]]

    @property
    def effective_length(self) -> int:
        return self.n - len(self.zero_coords)

    @cached_property
    def hyperplane_weights(self) -> np.ndarray:
        """Weight of the codeword of each normalized message (order of projective_points)."""
        pts, mult, _, _ = self._point_data
        msgs = projective_points(self.q, self.k)
        if len(pts) == 0:
            return np.zeros(len(msgs), dtype=np.int64)
        off = matmul(msgs, pts.T, self.field) != 0
        w = off.astype(np.int64) @ mult
        w.setflags(write=False)
        return w

    @cached_property
    def weight_enumerator(self) -> tuple[int, ...]:
        counts = np.bincount(self.hyperplane_weights, minlength=self.n + 1)
        a = [int(c) * (self.q - 1) for c in counts[: self.n + 1]]
        a[0] += 1
        return tuple(a)

    @cached_property
    def min_distance(self) -> int:
        return int(self.hyperplane_weights.min())

    @cached_property
    def dual_distance(self) -> int:
        return _dual_distance(self)

    def codewords(self) -> np.ndarray:
        """All q^k codewords, row i encoding message all_vectors(q, k)[i]."""
        return matmul(all_vectors(self.q, self.k), self._gen, self.field)

    def contains(self, words: np.ndarray) -> np.ndarray:
        """Membership test for rows of ``words`` via the parity-check matrix."""
        words = np.atleast_2d(np.asarray(words, dtype=np.uint8))
        if self.k == self.n:
            return np.ones(len(words), dtype=bool)
        h = dual(self).gen
        return ~(matmul(words, h.T, self.field).any(axis=1))

    def systematic(self) -> tuple["LinearCode", list[int]]:
        g, perm = systematize(self._gen, self.q)
        return LinearCode(g, self.q, check=False), perm


# ------------------------------------------------------------------ helpers


def systematize(g, q: int) -> tuple[np.ndarray, list[int]]:
    """Return ``(G', perm)`` with ``G' = (I_k | A)`` spanning the column-permuted code.

    Column ``i`` of ``G'`` is column ``perm[i]`` of the row-reduced input.
    """
    f = field_for(q)
    g = np.asarray(g, dtype=np.uint8)
    r, piv = rref(g, f)
    if len(piv) < g.shape[0]:
        raise RankDeficientError("generator matrix is rank deficient")
    rest = [j for j in range(g.shape[1]) if j not in set(piv)]
    perm = list(piv) + rest
    return r[:, perm].copy(), perm


def codeword_weights(c: LinearCode) -> tuple[int, ...]:
    return c.weight_enumerator


def min_distance(c: LinearCode) -> int:
    return c.min_distance


def dual_distance(c: LinearCode) -> int:
    return c.dual_distance


def meets_dual_distance(c: LinearCode, bound: int) -> bool:
    """``dual_distance(c) >= bound``, where a zero dual (k = n) meets every bound."""
    return c.k == c.n or c.dual_distance >= bound


def column_multiset(c: LinearCode) -> PointMultiset:
    pts, mult, _, _ = c._point_data
    return PointMultiset(
        c.q, c.k, tuple(tuple(int(x) for x in p) for p in pts), tuple(int(m) for m in mult)
    )


def is_projective(c: LinearCode) -> bool:
    _, mult, col_point, _ = c._point_data
    return bool((col_point >= 0).all() and (mult == 1).all())


def is_divisible(c: LinearCode, delta: int) -> bool:
    if delta < 1:
        raise ValueError("divisor must be positive")
    return bool((c.hyperplane_weights % delta == 0).all())


def is_even(c: LinearCode) -> bool:
    return is_divisible(c, 2)


def is_self_orthogonal(c: LinearCode, form: str = "euclidean") -> bool:
    f = c.field
    g = c.gen
    if form == "euclidean":
        other = g
    elif form == "hermitian":
        if c.q != 4:
            raise ValueError("the hermitian form needs q = 4")
        other = f.frob_t[1][g]
    else:
        raise ValueError(f"unknown form {form!r}")
    return not matmul(g, other.T, f).any()


def dual(c: LinearCode) -> LinearCode:
    """Generator of the euclidean dual, in the original coordinate order."""
    f = c.field
    k, n = c.k, c.n
    if k == n:
        raise ValueError("the dual of the full space is the zero code")
    g, perm = systematize(c.gen, c.q)
    a = g[:, k:]
    h = np.zeros((n - k, n), dtype=np.uint8)
    h[:, perm[:k]] = f.neg_t[a.T]
    h[:, perm[k:]] = np.eye(n - k, dtype=np.uint8)
    return LinearCode(h, c.q, check=False)


def _dual_distance(c: LinearCode) -> int:
    pts, mult, col_point, _ = c._point_data
    if (col_point < 0).any():
        return 1
    if (mult > 1).any():
        return 2
    if c.k == c.n:
        # dual is {0}; conventionally infinite, report n + 1
        return c.n + 1
    if c.q ** (c.n - c.k) <= _DUAL_ENUM_LIMIT:
        return dual(c).min_distance
    # smallest set of linearly dependent columns
    f = c.field
    for t in range(3, c.k + 2):
        for sub in combinations(range(c.n), t):
            if rank(c.gen[:, sub], f) < t:
                return t
    return c.k + 1


def minimal_codeword_count(c: LinearCode) -> int:
    """Number of nonzero codewords whose support properly contains no other support.

    Scalar multiples share a support and are counted individually.
    """
    msgs = projective_points(c.q, c.k)
    words = matmul(msgs, c.gen, c.field) != 0
    b = words.astype(np.int32)
    size = b.sum(axis=1)
    inter = b @ b.T
    inside = (inter == size[None, :]) & (size[None, :] < size[:, None])
    minimal = ~inside.any(axis=1)
    return int(minimal.sum()) * (c.q - 1)


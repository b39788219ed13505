"""Brute-force classification for tiny parameters (reference for tests).

Every k-dimensional subspace of F_q^n is listed through its reduced row
echelon generator matrix and represented by the sorted indices of its
codewords.  Equivalence classes are the connected components of the graph
joining each subspace to its images under a generating set of the group of
semilinear isometries: two transpositions generating the symmetric group,
scaling of one coordinate by a primitive element, and the Frobenius map.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import prod

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .code import LinearCode, all_vectors, vector_index
from .gf import field_for, matmul

__all__ = ["OracleRefused", "OracleResult", "brute_classes", "subspace_count", "FEASIBLE_LIMIT"]

FEASIBLE_LIMIT = 1_500_000


class OracleRefused(ValueError):
    """Parameters too large for exhaustive enumeration."""


@dataclass(frozen=True)
class OracleResult:
    count: int
    representatives: tuple[LinearCode, ...]


def subspace_count(q: int, n: int, k: int) -> int:
    num = prod(q**n - q**i for i in range(k))
    den = prod(q**k - q**i for i in range(k))
    return num // den


def _rref_batches(q: int, n: int, k: int):
    for piv in combinations(range(n), k):
        pset = set(piv)
        free = [(i, j) for i in range(k) for j in range(piv[i] + 1, n) if j not in pset]
        vals = all_vectors(q, len(free))
        g = np.zeros((len(vals), k, n), dtype=np.uint8)
        for i, p in enumerate(piv):
            g[:, i, p] = 1
        for t, (i, j) in enumerate(free):
            g[:, i, j] = vals[:, t]
        yield g


def _generators(q: int, n: int) -> list[np.ndarray]:
    """Vector-index maps of generators of the isometry group of F_q^n."""
    f = field_for(q)
    vecs = all_vectors(q, n)
    out = []
    perms = []
    if n > 1:
        perms.append([1, 0] + list(range(2, n)))
        perms.append(list(range(1, n)) + [0])
    for p in perms:
        img = np.empty_like(vecs)
        img[:, p] = vecs
        out.append(vector_index(img, q))
    if q > 2:
        img = vecs.copy()
        img[:, 0] = f.mul_t[f.primitive, img[:, 0]]
        out.append(vector_index(img, q))
    if f.aut_order > 1:
        out.append(vector_index(f.frob_t[1][vecs], q))
    return out


def brute_classes(
    q: int,
    n: int,
    k: int,
    *,
    dmin: int = 1,
    ddual: int = 1,
    delta: int = 1,
    selforth: str | None = None,
    limit: int = FEASIBLE_LIMIT,
) -> OracleResult:
    """Count inequivalent [n, k]_q codes with the given properties.

    ``ddual`` supports the values 1 (anything), 2 (no zero coordinate) and
    3 (projective).  Representatives are returned in a deterministic order.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if ddual > 3:
        raise ValueError("the oracle supports dual distance bounds up to 3")
    if subspace_count(q, n, k) > limit:
        raise OracleRefused(f"{subspace_count(q, n, k)} subspaces exceed the limit {limit}")
    f = field_for(q)
    msgs = all_vectors(q, k)
    wt_of = (all_vectors(q, n) != 0).sum(axis=1)
    keys, gens = [], []
    for g in _rref_batches(q, n, k):
        words = matmul(msgs, g, f)  # (b, q^k, n)
        idx = np.sort(vector_index(words, q), axis=1)
        w = wt_of[idx[:, 1:]]
        ok = w.min(axis=1) >= dmin
        if delta > 1:
            ok &= (w % delta == 0).all(axis=1)
        if ddual >= 2:
            ok &= words.any(axis=1).all(axis=1)
        if ddual >= 3:
            for a, b in combinations(range(n), 2):
                ca, cb = g[:, :, a], g[:, :, b]
                for lam in range(1, q):
                    ok &= ~(f.mul_t[lam, ca] == cb).all(axis=1)
        if selforth is not None:
            other = g if selforth == "euclidean" else f.frob_t[1][g]
            gram = matmul(g, np.transpose(other, (0, 2, 1)), f)
            ok &= ~gram.reshape(len(g), -1).any(axis=1)
        if ok.any():
            keys.append(idx[ok])
            gens.append(g[ok])
    if not keys:
        return OracleResult(0, ())
    keys = np.concatenate(keys)
    mats = np.concatenate(gens)
    nsub = len(keys)
    table = {row.tobytes(): i for i, row in enumerate(keys)}
    src, dst = [], []
    for gmap in _generators(q, n):
        img = np.sort(gmap[keys], axis=1)
        tgt = np.fromiter((table[r.tobytes()] for r in img), dtype=np.int64, count=nsub)
        src.append(np.arange(nsub))
        dst.append(tgt)
    if src:
        s, d = np.concatenate(src), np.concatenate(dst)
        graph = coo_matrix((np.ones(len(s)), (s, d)), shape=(nsub, nsub))
        ncomp, labels = connected_components(graph, directed=True, connection="weak")
    else:
        ncomp, labels = nsub, np.arange(nsub)
    first = np.full(ncomp, -1, dtype=np.int64)
    for i in range(nsub - 1, -1, -1):
        first[labels[i]] = i
    reps = tuple(LinearCode(mats[i], q, check=False) for i in sorted(first))
    return OracleResult(int(ncomp), reps)

"""Isomorph-free generation of linear codes by canonical augmentation.

Two growth directions are implemented:

* ``classify_col`` appends one column at a time to a generator ``(I_k | A)``;
  the parent of a code is obtained by deleting a coordinate of its special
  orbit.
* ``classify_row`` appends a row ``(a | 0 ... 0 | 1)`` to ``(A | I_s)``,
  raising length and dimension together; the parent is obtained by
  shortening at a coordinate of the special orbit.

Candidate extensions are reduced to orbit representatives under the
automorphism group of the parent, cheap distance filters run before the
canonical-form based parent test.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .canon import (
    AutGroup,
    CanonicalResult,
    _Geometry,
    canonical_form,
    canonical_from_geometry,
)
from .code import (
    LinearCode,
    all_vectors,
    is_divisible,
    is_self_orthogonal,
    meets_dual_distance,
    projective_points,
    systematize,
    vector_index,
)
from .gf import field_for, mat_inverse, matmul, normalize_rows, rref

__all__ = [
    "AugTask",
    "EngineUnsupported",
    "VectorOrbitRep",
    "induced_matrix_action",
    "vector_orbit_reps",
    "parent_test",
    "classify_col",
    "classify_row",
    "ROW_SPACE_LIMIT",
    "RunStats",
    "shard_of",
]

# largest q^(n-k) for which the row engine enumerates extension vectors
ROW_SPACE_LIMIT = 1 << 22


class EngineUnsupported(ValueError):
    """The requested engine cannot handle these parameters."""


@dataclass(frozen=True)
class AugTask:
    q: int
    n: int
    k: int
    d: int = 1
    ddual: int = 2
    delta: int = 1
    selforth: str | None = None

    def __post_init__(self):
        if self.q not in (2, 3, 4):
            raise ValueError("q must be 2, 3 or 4")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n (got k={self.k}, n={self.n})")
        if self.d < 1 or self.ddual < 1 or self.delta < 1:
            raise ValueError("distance bounds and divisor must be positive")
        if self.selforth not in (None, "euclidean", "hermitian"):
            raise ValueError(f"unknown form {self.selforth!r}")
        if self.selforth == "hermitian" and self.q != 4:
            raise ValueError("the hermitian form needs q = 4")

    @property
    def feasible(self) -> bool:
        return self.d <= self.n - self.k + 1

    @property
    def pads_zeros(self) -> bool:
        """With no dual distance requirement, shorter codes padded by zero columns count."""
        return self.ddual <= 1

    def accepts(self, c: LinearCode) -> bool:
        """Direct check of every target property (used for final filtering and tests)."""
        if (c.q, c.n, c.k) != (self.q, self.n, self.k):
            return False
        if c.min_distance < self.d or not meets_dual_distance(c, self.ddual):
            return False
        if self.delta > 1 and not is_divisible(c, self.delta):
            return False
        if self.selforth and not is_self_orthogonal(c, self.selforth):
            return False
        return True


@dataclass(frozen=True)
class VectorOrbitRep:
    vector: tuple[int, ...]
    size: int


@dataclass
class RunStats:
    level_counts: dict[int, int] = field(default_factory=dict)
    candidates: int = 0
    canonical_calls: int = 0


# ------------------------------------------------------------ group actions


def induced_matrix_action(aut: AutGroup, g: np.ndarray, q: int) -> list[tuple[np.ndarray, int]]:
    """For each generator, the matrix ``A`` with ``frob^a(G M) = A G``."""
    f = field_for(q)
    g = np.asarray(g, dtype=np.uint8)
    _, piv = rref(g, f)
    if len(piv) != g.shape[0]:
        raise ValueError("generator matrix is rank deficient")
    binv = mat_inverse(g[:, piv], f)
    out = []
    for phi in aut.generators:
        y = phi.apply_matrix(g)
        a = matmul(y[:, piv], binv, f)
        if not np.array_equal(matmul(a, g, f), y):
            raise ValueError("generator does not fix the code")
        out.append((a, phi.aut))
    return out


def _components(nv: int, maps: list[np.ndarray]) -> np.ndarray:
    if not maps:
        return np.arange(nv)
    src = np.tile(np.arange(nv), len(maps))
    dst = np.concatenate(maps)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(nv, nv))
    return connected_components(graph, directed=True, connection="weak")[1]


def _reps_from_labels(labels: np.ndarray, skip_zero: bool) -> tuple[np.ndarray, np.ndarray]:
    """Smallest index of each component and the component sizes."""
    idx = np.arange(len(labels))
    if skip_zero:
        idx = idx[1:]
    lab = labels[idx]
    order = np.lexsort((idx, lab))
    lab_s = lab[order]
    start = np.r_[True, lab_s[1:] != lab_s[:-1]]
    reps = idx[order][start]
    sizes = np.diff(np.r_[np.nonzero(start)[0], len(lab_s)])
    srt = np.argsort(reps)
    return reps[srt], sizes[srt]


def _row_images(phi, g: np.ndarray, vecs: np.ndarray, q: int) -> np.ndarray:
    """Action of a parent automorphism on appended rows ``(a | 0 | 1)``, by index."""
    f = field_for(q)
    s, total = g.shape
    r = total - s
    padded = np.zeros((len(vecs), total), dtype=np.uint8)
    padded[:, :r] = vecs
    img = phi.apply_matrix(padded)
    u, w = img[:, :r], img[:, r:]
    red = f.add_t[u, f.neg_t[matmul(w, g[:, :r], f)]] if s else u
    return vector_index(red, q)


def vector_orbit_reps(aut: AutGroup, g: np.ndarray, q: int, side: str = "column") -> list[VectorOrbitRep]:
    """Orbit representatives of extension vectors under the parent's automorphisms.

    ``side="column"``: nonzero vectors of F_q^k appended as a new column of
    ``g``.  ``side="row"``: vectors ``a`` of F_q^(n-k) appended as the row
    ``(a | 0 | 1)`` to ``g = (A | I_k)``.
    """
    f = field_for(q)
    g = np.asarray(g, dtype=np.uint8)
    if side == "column":
        k = g.shape[0]
        vecs = all_vectors(q, k)
        maps = []
        for a, al in induced_matrix_action(aut, g, q):
            img = f.frob_t[(-al) % f.aut_order][matmul(vecs, a.T, f)]
            maps.append(vector_index(img, q))
        labels = _components(len(vecs), maps)
        reps, sizes = _reps_from_labels(labels, skip_zero=True)
    elif side == "row":
        s, total = g.shape
        vecs = all_vectors(q, total - s)
        maps = [_row_images(phi, g, vecs, q) for phi in aut.generators]
        labels = _components(len(vecs), maps)
        reps, sizes = _reps_from_labels(labels, skip_zero=False)
    else:
        raise ValueError("side must be 'column' or 'row'")
    return [VectorOrbitRep(tuple(int(x) for x in vecs[i]), int(z)) for i, z in zip(reps, sizes)]


# -------------------------------------------------------------- parent test


def _special_decision(geo: _Geometry, coord: int, *, row_rule: bool):
    """Fast partial decision from the root refinement; returns (verdict or None)."""
    p = int(geo.col_point[coord])
    if p < 0:
        return False
    coloop = geo.coloop
    if coloop[p]:
        # only relevant to row growth: accepted iff every point is a coloop
        return bool(row_rule and coloop.all())
    pc, _ = geo.root()
    if pc[p] != 0:
        return False
    if np.count_nonzero(pc == 0) == 1:
        return True
    return None


def parent_test(child: LinearCode, added_coord: int, *, row_rule: bool = False) -> bool:
    """Is ``added_coord`` in the special orbit of ``child``?

    With ``row_rule`` (row growth) a child whose nonzero coordinates all
    carry weight-one codewords, so that no special orbit exists, is
    accepted when the added coordinate is one of them.
    """
    return _parent_test(child, added_coord, row_rule)[0]


def _parent_test(child: LinearCode, coord: int, row_rule: bool) -> tuple[bool, CanonicalResult | None]:
    geo = _Geometry(child)
    quick = _special_decision(geo, coord, row_rule=row_rule)
    if quick is False:
        return False, None
    res = canonical_from_geometry(geo)
    if quick is True:
        return True, res
    if res.special is None:
        return bool(row_rule and coord in res.o_b), res
    return coord in res.special, res


# ------------------------------------------------------------ sharding


def shard_of(c: LinearCode, total: int) -> int:
    """Deterministic shard index from isometry-invariant data."""
    pts, mult, col_point, _ = c._point_data
    blob = repr((c.q, c.n, c.k, c.weight_enumerator, sorted(mult.tolist()), int((col_point < 0).sum())))
    return int.from_bytes(hashlib.sha256(blob.encode()).digest()[:8], "big") % total


@dataclass
class _Node:
    code: LinearCode
    res: CanonicalResult


def _node(c: LinearCode) -> _Node:
    return _Node(c, canonical_form(c))


# ------------------------------------------------------- column-by-column


def _col_children(node: _Node, d_level: int, ddual: int, stats: RunStats) -> Iterator[_Node]:
    c = node.code
    q, k = c.q, c.k
    f = c.field
    pp = projective_points(q, k)
    lookup = np.full(q**k, -1, dtype=np.int64)
    lookup[vector_index(pp, q)] = np.arange(len(pp))
    maps = []
    for nmat, a in node.res.aut.point_maps:
        img = matmul(f.frob_t[a][pp], nmat.T, f)
        maps.append(lookup[vector_index(normalize_rows(img, f), q)])
    labels = _components(len(pp), maps)
    reps, _ = _reps_from_labels(labels, skip_zero=False)
    cand = pp[reps]
    if ddual >= 3:
        pts = c._point_data[0]
        have = set(vector_index(pts, q).tolist())
        keep = np.array([i not in have for i in vector_index(cand, q).tolist()], dtype=bool)
        cand = cand[keep]
    if len(cand) == 0:
        return
    if d_level > 1:
        hw = c.hyperplane_weights
        hit = matmul(pp, cand.T, f) != 0
        new_min = (hw[:, None] + hit).min(axis=0)
        cand = cand[new_min >= d_level]
    stats.candidates += len(cand)
    n1 = c.n
    for x in cand:
        child = LinearCode(np.hstack([c.gen, x[:, None]]), q, check=False)
        if ddual >= 4 and not meets_dual_distance(child, ddual):
            continue
        stats.canonical_calls += 1
        ok, res = _parent_test(child, n1, False)
        if ok:
            yield _Node(child, res)


def _pad(c: LinearCode, n: int) -> LinearCode:
    if c.n == n:
        return c
    g = np.hstack([c.gen, np.zeros((c.k, n - c.n), dtype=np.uint8)])
    return LinearCode(g, c.q, check=False)


def _final_ok(task: AugTask, c: LinearCode) -> bool:
    if c.min_distance < task.d:
        return False
    if task.delta > 1 and not is_divisible(c, task.delta):
        return False
    if task.selforth and not is_self_orthogonal(c, task.selforth):
        return False
    if not task.pads_zeros and not meets_dual_distance(c, task.ddual):
        return False
    return True


def classify_col(
    task: AugTask,
    seeds: Iterable[LinearCode] | None = None,
    *,
    stats: RunStats | None = None,
    shard: tuple[int, int] | None = None,
    on_level: Callable[[int, list[LinearCode]], None] | None = None,
    emit_levels: bool = False,
) -> Iterator[LinearCode]:
    """All inequivalent codes for ``task``, grown column by column.

    ``seeds`` must be a complete list of inequivalent [n0, k] codes
    satisfying the level constraints; by default growth starts at the
    identity matrix.  With ``emit_levels`` the codes accepted by the final
    filters are emitted at every length (not padded), which yields a whole
    column of a table in one run.  ``shard=(i, t)`` keeps only the subtrees
    assigned to shard ``i`` of ``t`` at the first branching level.
    """
    stats = stats if stats is not None else RunStats()
    if not task.feasible and not task.pads_zeros and not emit_levels:
        return
    q, n, k = task.q, task.n, task.k
    if seeds is None:
        level = [_node(LinearCode(np.eye(k, dtype=np.uint8), q, check=False))]
    else:
        level = []
        for s in seeds:
            if s.k != k or s.q != q:
                raise ValueError("seed parameters do not match the task")
            g, _ = systematize(s.gen, q)
            level.append(_node(LinearCode(g, q, check=False)))
    if not level:
        return
    length = level[0].code.n
    sharded = shard is None

    def level_d(m: int) -> int:
        return max(1, task.d - (n - m))

    def emit(nodes: list[_Node], m: int):
        if not sharded and shard[0] != 0:
            return
        for nd in nodes:
            c = nd.code
            if emit_levels:
                t = AugTask(q, m, k, task.d, task.ddual, task.delta, task.selforth)
                if _final_ok(t, c):
                    yield c
            elif m == n or task.pads_zeros:
                if _final_ok(task, c):
                    yield _pad(c, n)

    stats.level_counts[length] = len(level)
    if on_level:
        on_level(length, [nd.code for nd in level])
    yield from emit(level, length)
    while length < n and level:
        if not sharded and (len(level) > 1 or length == n - 1):
            i, t = shard
            level = [nd for nd in level if shard_of(nd.code, t) == i]
            sharded = True
        d_next = level_d(length + 1)
        nxt: list[_Node] = []
        for nd in level:
            nxt.extend(_col_children(nd, d_next, task.ddual, stats))
        length += 1
        level = nxt
        stats.level_counts[length] = len(level)
        if on_level:
            on_level(length, [nd.code for nd in level])
        yield from emit(level, length)


# ---------------------------------------------------------- row-by-row


def _row_reps(node: _Node | None, r: int, q: int) -> np.ndarray:
    f = field_for(q)
    if node is None:
        out = np.zeros((r + 1, r), dtype=np.uint8)
        for w in range(r + 1):
            out[w, :w] = 1
        return out
    vecs = all_vectors(q, r)
    g = node.code.gen
    maps = [_row_images(phi, g, vecs, q) for phi in node.res.aut.generators]
    if q > 2:
        maps.append(vector_index(f.mul_t[f.primitive, vecs], q))
    labels = _components(len(vecs), maps)
    reps, _ = _reps_from_labels(labels, skip_zero=False)
    return vecs[reps]


def _row_children(node: _Node | None, task: AugTask, s: int, stats: RunStats) -> Iterator[_Node]:
    q = task.q
    f = field_for(q)
    r = task.n - task.k
    cand = _row_reps(node, r, q)
    if node is None:
        a_part = np.zeros((0, r), dtype=np.uint8)
    else:
        a_part = node.code.gen[:, :r]
    # minimum distance: words m*(A|I) + (x|0|1) for all m
    if task.d > 1:
        msgs = all_vectors(q, s)
        ca = matmul(msgs, a_part, f) if s else np.zeros((1, r), dtype=np.uint8)
        wm = (msgs != 0).sum(axis=1) if s else np.zeros(1, dtype=np.int64)
        keep = np.ones(len(cand), dtype=bool)
        step = max(1, (1 << 22) // max(1, len(ca) * max(r, 1)))
        for lo in range(0, len(cand), step):
            blk = cand[lo : lo + step]
            summed = f.add_t[ca[:, None, :], blk[None, :, :]]
            w = (summed != 0).sum(axis=2) + wm[:, None] + 1
            keep[lo : lo + step] = w.min(axis=0) >= task.d
        cand = cand[keep]
    need_dual = max(1, task.ddual - (task.k - (s + 1)))
    stats.candidates += len(cand)
    total = r + s + 1
    for x in cand:
        g = np.zeros((s + 1, total), dtype=np.uint8)
        if s:
            g[:s, : r + s] = node.code.gen
        g[s, :r] = x
        g[s, total - 1] = 1
        child = LinearCode(g, q, check=False)
        if need_dual >= 2 and not meets_dual_distance(child, need_dual):
            continue
        if task.delta > 1 and not is_divisible(child, task.delta):
            continue
        if task.selforth and not is_self_orthogonal(child, task.selforth):
            continue
        stats.canonical_calls += 1
        ok, res = _parent_test(child, total - 1, True)
        if ok:
            yield _Node(child, res if res is not None else canonical_form(child))


def classify_row(
    task: AugTask,
    seeds: Iterable[LinearCode] | None = None,
    *,
    stats: RunStats | None = None,
    shard: tuple[int, int] | None = None,
    on_level: Callable[[int, list[LinearCode]], None] | None = None,
) -> Iterator[LinearCode]:
    """All inequivalent codes for ``task``, grown one row (and one column) at a time.

    Seeds, if given, are a complete list of inequivalent [r+s, s] codes for
    some ``s`` with ``r = n - k``; they are brought into the form ``(A | I_s)``.
    """
    stats = stats if stats is not None else RunStats()
    q, n, k = task.q, task.n, task.k
    r = n - k
    if q**r > ROW_SPACE_LIMIT:
        raise EngineUnsupported(f"q^(n-k) = {q**r} exceeds the row engine limit {ROW_SPACE_LIMIT}")
    if not task.feasible:
        return
    if seeds is None:
        level: list[_Node | None] = [None]
        s = 0
    else:
        level = []
        s = None
        for c in seeds:
            if c.q != q or c.n - c.k != r:
                raise ValueError("seed parameters do not match the task")
            g, _ = systematize(c.gen, q)
            g = np.hstack([g[:, c.k :], g[:, : c.k]])
            level.append(_node(LinearCode(g, q, check=False)))
            s = c.k
        if s is None:
            return
    sharded = shard is None
    while s < k and level:
        if not sharded and (len(level) > 1 or s == k - 1):
            i, t = shard
            level = [nd for nd in level if nd is None or shard_of(nd.code, t) == i]
            sharded = True
        nxt: list[_Node] = []
        for nd in level:
            nxt.extend(_row_children(nd, task, s, stats))
        s += 1
        level = nxt
        stats.level_counts[r + s] = len(level)
        if on_level:
            on_level(r + s, [nd.code for nd in level])
    if not sharded and shard[0] != 0:
        return
    for nd in level:
        if nd is not None and _final_ok(task, nd.code):
            yield nd.code

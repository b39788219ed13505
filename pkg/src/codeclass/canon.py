"""Canonical forms, automorphism groups and coordinate orbits of linear codes.

The search works on the geometric picture of a code: the distinct
normalized columns (points of PG(k-1, q)) with multiplicities, plus a count
of zero columns.  A colour refinement between points and all hyperplanes is
followed by an individualize-and-refine search tree.  At each leaf the
ordered points are turned into a normal form by row reduction followed by a
choice of diagonal scaling and field automorphism; the smallest leaf wins.
Leaves that coincide with the first or the best leaf yield automorphisms,
which are used to prune the tree in the usual way.

Semilinear point maps are pairs ``(N, a)`` acting as ``x -> N @ frob^a(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .code import LinearCode, projective_points
from .gf import FieldSpec, field_for, mat_inverse, matmul, rref

__all__ = [
    "SemilinearIsometry",
    "AutGroup",
    "CanonicalResult",
    "coordinate_invariant",
    "canonical_form",
    "are_equivalent",
    "random_isometry",
]


# --------------------------------------------------------------- isometries


@dataclass(frozen=True)
class SemilinearIsometry:
    """Coordinate map ``v -> w`` with ``w[perm[i]] = frob^aut(scalars[i] * v[i])``."""

    perm: tuple[int, ...]
    scalars: tuple[int, ...]
    aut: int = 0
    q: int = 2

    @classmethod
    def identity(cls, n: int, q: int) -> "SemilinearIsometry":
        return cls(tuple(range(n)), (1,) * n, 0, q)

    @property
    def n(self) -> int:
        return len(self.perm)

    def apply_matrix(self, g: np.ndarray) -> np.ndarray:
        f = field_for(self.q)
        g = np.asarray(g, dtype=np.uint8)
        lam = np.asarray(self.scalars, dtype=np.uint8)
        scaled = f.frob_t[self.aut % f.aut_order][f.mul_t[lam[None, :], g]]
        out = np.empty_like(scaled)
        out[..., list(self.perm)] = scaled
        return out

    def apply(self, c: LinearCode) -> LinearCode:
        return LinearCode(self.apply_matrix(c.gen), c.q, check=False)

    def apply_coords(self, coords: Iterable[int]) -> frozenset[int]:
        return frozenset(self.perm[i] for i in coords)

    def then(self, other: "SemilinearIsometry") -> "SemilinearIsometry":
        """The map ``v -> other(self(v))``."""
        f = field_for(self.q)
        ainv = (-self.aut) % f.aut_order
        lam2 = np.asarray(other.scalars, dtype=np.uint8)[list(self.perm)]
        lam = f.mul_t[f.frob_t[ainv][lam2], np.asarray(self.scalars, dtype=np.uint8)]
        perm = tuple(other.perm[p] for p in self.perm)
        return SemilinearIsometry(
            perm, tuple(int(x) for x in lam), (self.aut + other.aut) % f.aut_order, self.q
        )

    def inverse(self) -> "SemilinearIsometry":
        f = field_for(self.q)
        n = self.n
        pinv = [0] * n
        for i, p in enumerate(self.perm):
            pinv[p] = i
        lam = np.asarray(self.scalars, dtype=np.uint8)
        mu = f.frob_t[self.aut % f.aut_order][f.inv_t[lam[pinv]]]
        return SemilinearIsometry(
            tuple(pinv), tuple(int(x) for x in mu), (-self.aut) % f.aut_order, self.q
        )

    def fixes(self, c: LinearCode) -> bool:
        return bool(c.contains(self.apply_matrix(c.gen)).all())


def random_isometry(n: int, q: int, rng: np.random.Generator) -> SemilinearIsometry:
    f = field_for(q)
    perm = tuple(int(x) for x in rng.permutation(n))
    lam = tuple(int(x) for x in rng.integers(1, q, size=n))
    return SemilinearIsometry(perm, lam, int(rng.integers(0, f.aut_order)), q)


# ------------------------------------------------------- semilinear point maps


def _sl_compose(f: FieldSpec, m2, m1):
    """``m2 o m1`` for point maps given as ``(N, a)``."""
    n2, a2 = m2
    n1, a1 = m1
    return matmul(n2, f.frob_t[a2][n1], f), (a1 + a2) % f.aut_order


def _sl_inverse(f: FieldSpec, m):
    nmat, a = m
    ainv = (-a) % f.aut_order
    return f.frob_t[ainv][mat_inverse(nmat, f)], ainv


@dataclass
class _PointAut:
    perm: np.ndarray  # point index -> point index
    mat: np.ndarray
    aut: int


@dataclass(frozen=True)
class AutGroup:
    generators: tuple[SemilinearIsometry, ...]
    order: int | None = None
    # the same group acting on the distinct columns as semilinear maps
    point_maps: tuple[tuple[np.ndarray, int], ...] = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class CanonicalResult:
    canon_code: LinearCode
    transport: SemilinearIsometry
    aut: AutGroup
    orbits: tuple[frozenset[int], ...]
    o_a: frozenset[int]
    o_b: frozenset[int]
    ordered: tuple[frozenset[int], ...]
    special: frozenset[int] | None

    @cached_property
    def key(self) -> bytes:
        """Serialized canonical representative; equal iff the codes are equivalent."""
        c = self.canon_code
        head = np.array([c.q, c.n, c.k], dtype=np.uint16).tobytes()
        return head + c.gen.tobytes()

    def orbit_of(self, coord: int) -> frozenset[int]:
        for o in self.orbits:
            if coord in o:
                return o
        raise IndexError(coord)


# ------------------------------------------------------------------ geometry


def _dense_rank(keys: np.ndarray) -> np.ndarray:
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def _onehot(colors: np.ndarray, ncol: int) -> np.ndarray:
    out = np.zeros((len(colors), ncol))
    out[np.arange(len(colors)), colors] = 1.0
    return out


class _Geometry:
    """Points, multiplicities and point/hyperplane incidences of a code."""

    def __init__(self, c: LinearCode):
        self.code = c
        self.f = c.field
        self.q, self.k, self.n = c.q, c.k, c.n
        pts, mult, col_point, scale = c._point_data
        self.pts, self.mult, self.col_point, self.col_scale = pts, mult, col_point, scale
        self.m = len(pts)
        self.hyp = projective_points(self.q, self.k)
        inc = matmul(self.hyp, pts.T, self.f) == 0
        self.inc = inc.astype(np.float64)
        self.hw = c.hyperplane_weights

    @cached_property
    def point_counts(self) -> np.ndarray:
        """For each point and each occurring weight, hyperplanes of that weight missing it."""
        ws = np.unique(self.hw)
        oh = (self.hw[:, None] == ws[None, :]).astype(np.float64)
        off = 1.0 - self.inc
        return np.rint(off.T @ oh).astype(np.int64), ws

    @cached_property
    def coloop(self) -> np.ndarray:
        counts, ws = self.point_counts
        if ws[0] != 1:
            return np.zeros(self.m, dtype=bool)
        return counts[:, 0] > 0

    def initial_colors(self) -> tuple[np.ndarray, np.ndarray]:
        counts, _ = self.point_counts
        keys = np.column_stack([self.coloop.astype(np.int64), self.mult, counts])
        pc = _dense_rank(keys)
        hc = _dense_rank(self.hw[:, None])
        return pc, hc

    def refine(self, pc: np.ndarray, hc: np.ndarray):
        inc = self.inc
        npc = int(pc.max()) + 1
        nhc = int(hc.max()) + 1
        while True:
            if npc == self.m:
                return pc, hc
            hs = inc @ _onehot(pc, npc)
            hc2 = _dense_rank(np.column_stack([hc, np.rint(hs).astype(np.int64)]))
            nhc2 = int(hc2.max()) + 1
            ps = inc.T @ _onehot(hc2, nhc2)
            pc2 = _dense_rank(np.column_stack([pc, np.rint(ps).astype(np.int64)]))
            npc2 = int(pc2.max()) + 1
            if npc2 == npc and nhc2 == nhc:
                return pc2, hc2
            pc, hc, npc, nhc = pc2, hc2, npc2, nhc2

    @cached_property
    def _root(self):
        return self.refine(*self.initial_colors())

    def root(self):
        return self._root

    @staticmethod
    def individualize(pc: np.ndarray, v: int) -> np.ndarray:
        c = pc[v]
        out = pc + (pc > c)
        same = (pc == c)
        same[v] = False
        out[same] += 1
        return out


def coordinate_invariant(c: LinearCode) -> list[tuple[int, ...]]:
    """Isometry-invariant signature of each coordinate.

    Zero coordinates get ``(0,)``; otherwise the signature records the
    multiplicity of the column's point and, for every weight, how many
    projective codeword classes of that weight are nonzero there.
    """
    geo = _Geometry(c)
    if geo.m == 0:
        return [(0,)] * c.n
    counts, ws = geo.point_counts
    out = []
    for p in geo.col_point:
        if p < 0:
            out.append((0,))
        else:
            sig = [1, int(geo.mult[p])]
            for w, cnt in zip(ws, counts[p]):
                sig += [int(w), int(cnt)]
            out.append(tuple(sig))
    return out


# -------------------------------------------------------------------- search


class _Leaf:
    __slots__ = ("cert", "order", "T", "nu", "ties")

    def __init__(self, cert, order, T, nu, ties):
        self.cert, self.order, self.T, self.nu, self.ties = cert, order, T, nu, ties


def _diag_candidates(f: FieldSpec, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All (diagonal with first entry 1, automorphism) pairs."""
    units = np.arange(1, f.q, dtype=np.uint8)
    if k > 1:
        grids = np.meshgrid(*([units] * (k - 1)), indexing="ij")
        rest = np.stack([g.reshape(-1) for g in grids], axis=1)
    else:
        rest = np.zeros((1, 0), dtype=np.uint8)
    d = np.hstack([np.ones((len(rest), 1), dtype=np.uint8), rest])
    ds = np.vstack([d] * f.aut_order)
    auts = np.repeat(np.arange(f.aut_order), len(d))
    return ds, auts


class _Search:
    def __init__(self, geo: _Geometry):
        self.geo = geo
        self.f = geo.f
        self.gens: list[_PointAut] = []
        self.first: _Leaf | None = None
        self.best: _Leaf | None = None
        self._diag = _diag_candidates(self.f, geo.k) if geo.q > 2 else None
        self.abort_flag = False

    # leaf normal form -------------------------------------------------
    def _leaf(self, pc: np.ndarray) -> _Leaf:
        geo, f = self.geo, self.f
        k = geo.k
        order = np.argsort(pc, kind="stable")
        mat = geo.pts[order].T
        aug = np.hstack([mat, np.eye(k, dtype=np.uint8)])
        red, piv = rref(aug, f, ncols=geo.m)
        r = red[:, : geo.m]
        e = red[:, geo.m :]
        mult_bytes = geo.mult[order].astype(np.uint16).tobytes()
        if geo.q == 2:
            cols = r.T
            nu = np.ones(geo.m, dtype=np.uint8)
            T = (e, 0)
            cert = mult_bytes + cols.tobytes()
            return _Leaf(cert, order, T, nu, None)
        ds, auts = self._diag
        # candidate images of every column: D * frob^a(r)
        fr = f.frob_t[auts][:, r]  # (nc, k, m) -- frob_t[a] indexed per candidate
        imgs = f.mul_t[ds[:, :, None], fr]
        nz = imgs != 0
        lead_idx = np.argmax(nz, axis=1)  # (nc, m)
        lead = np.take_along_axis(imgs, lead_idx[:, None, :], axis=1)[:, 0, :]
        normed = f.mul_t[f.inv_t[lead][:, None, :], imgs]
        flat = np.ascontiguousarray(np.transpose(normed, (0, 2, 1))).reshape(len(ds), -1)
        ranks = _dense_rank(flat)
        winners = np.nonzero(ranks == 0)[0]
        w0 = int(winners[0])
        dmat = ds[w0]
        a = int(auts[w0])
        nmat = f.mul_t[dmat[:, None], f.frob_t[a][e]]
        cert = mult_bytes + flat[w0].tobytes()
        ties = [(ds[i], int(auts[i]), e) for i in winners[1:]]
        return _Leaf(cert, order, (nmat, a), lead[w0].astype(np.uint8), ties)

    def _auto_from(self, target: _Leaf, leaf: _Leaf) -> _PointAut:
        f = self.f
        perm = np.empty(self.geo.m, dtype=np.int64)
        perm[leaf.order] = target.order
        m = _sl_compose(f, _sl_inverse(f, target.T), leaf.T)
        return _PointAut(perm, m[0], m[1])

    def _visit_leaf(self, pc) -> bool:
        """Process a leaf; returns True if it coincides with the first leaf."""
        leaf = self._leaf(pc)
        if self.first is None:
            self.first = self.best = leaf
            self._add_kernel(leaf)
            return False
        if leaf.cert == self.first.cert:
            self.gens.append(self._auto_from(self.first, leaf))
            return True
        if leaf.cert == self.best.cert:
            self.gens.append(self._auto_from(self.best, leaf))
        elif leaf.cert < self.best.cert:
            self.best = leaf
        return False

    def _add_kernel(self, leaf: _Leaf) -> None:
        f = self.f
        self.n_ties = 1
        if not leaf.ties:
            return
        self.n_ties += len(leaf.ties)
        tinv = _sl_inverse(f, leaf.T)
        ident = np.arange(self.geo.m)
        for dmat, a, e in leaf.ties:
            other = (f.mul_t[dmat[:, None], f.frob_t[a][e]], a)
            m = _sl_compose(f, tinv, other)
            self.gens.append(_PointAut(ident.copy(), m[0], m[1]))

    # orbits -------------------------------------------------------------
    def _orbits(self, fixed: list[int]) -> np.ndarray:
        m = self.geo.m
        gens = [g.perm for g in self.gens if all(g.perm[v] == v for v in fixed)]
        return _perm_orbits(m, gens)

    # tree -----------------------------------------------------------------
    @staticmethod
    def _target(pc: np.ndarray):
        counts = np.bincount(pc)
        big = np.nonzero(counts > 1)[0]
        if big.size == 0:
            return None
        c = int(big[0])
        return np.nonzero(pc == c)[0]

    def _explore(self, pc, hc, fixed: list[int]) -> bool:
        cell = self._target(pc)
        if cell is None:
            return self._visit_leaf(pc)
        done: list[int] = []
        for v in cell:
            v = int(v)
            if done:
                orb = self._orbits(fixed)
                if any(orb[v] == orb[u] for u in done):
                    continue
            done.append(v)
            pc2, hc2 = self.geo.refine(self.geo.individualize(pc, v), hc)
            if self._explore(pc2, hc2, fixed + [v]):
                return True
        return False

    def run(self):
        geo = self.geo
        pc, hc = geo.root()
        path = []
        fixed: list[int] = []
        while True:
            cell = self._target(pc)
            if cell is None:
                break
            path.append((pc, hc, cell, list(fixed)))
            v = int(cell[0])
            fixed.append(v)
            pc, hc = geo.refine(geo.individualize(pc, v), hc)
        self._visit_leaf(pc)
        for pc, hc, cell, pre in reversed(path):
            done = [int(cell[0])]
            for v in cell[1:]:
                v = int(v)
                orb = self._orbits(pre)
                if any(orb[v] == orb[u] for u in done):
                    continue
                done.append(v)
                pc2, hc2 = geo.refine(geo.individualize(pc, v), hc)
                self._explore(pc2, hc2, pre + [v])
        order = self.n_ties * (self.f.q - 1)
        for pc, hc, cell, pre in path:
            orb = self._orbits(pre)
            order *= int(np.count_nonzero(orb == orb[cell[0]]))
        self.point_group_order = order
        return self


def _perm_orbits(m: int, perms: list[np.ndarray]) -> np.ndarray:
    if not perms or m == 0:
        return np.arange(m)
    src = np.concatenate([np.arange(m)] * len(perms))
    dst = np.concatenate(perms)
    g = coo_matrix((np.ones(len(src)), (src, dst)), shape=(m, m))
    _, labels = connected_components(g, directed=True, connection="weak")
    return labels


# --------------------------------------------------------------- public API


def _point_to_isometry(geo: _Geometry, perm: np.ndarray, mat: np.ndarray, a: int) -> SemilinearIsometry:
    """Lift a multiset-preserving point map to a coordinate automorphism."""
    f = geo.f
    n = geo.n
    img = matmul(mat, f.frob_t[a][geo.pts.T], f).T  # rows: images of points
    nz = img != 0
    nu = img[np.arange(geo.m), np.argmax(nz, axis=1)] if geo.m else np.zeros(0, np.uint8)
    copies: dict[int, list[int]] = {}
    for c in range(n):
        copies.setdefault(int(geo.col_point[c]), []).append(c)
    cperm = [0] * n
    lam = [1] * n
    ainv = (-a) % f.aut_order
    for p, cs in copies.items():
        if p < 0:
            for c in cs:
                cperm[c] = c
            continue
        targets = copies[int(perm[p])]
        for c, t in zip(cs, targets):
            s = geo.col_scale[c]
            s2 = geo.col_scale[t]
            denom = f.mul_t[f.frob_t[a][s], nu[p]]
            val = f.mul_t[s2, f.inv_t[denom]]
            cperm[c] = t
            lam[c] = int(f.frob_t[ainv][val])
    return SemilinearIsometry(tuple(cperm), tuple(lam), a, geo.q)


def _kernel_generators(geo: _Geometry) -> list[SemilinearIsometry]:
    """Automorphisms acting trivially on points: swaps of equal points, zero columns."""
    f = geo.f
    n = geo.n
    out = []
    groups: dict[int, list[int]] = {}
    for c in range(n):
        groups.setdefault(int(geo.col_point[c]), []).append(c)
    for p, cs in groups.items():
        for c1, c2 in zip(cs, cs[1:]):
            perm = list(range(n))
            perm[c1], perm[c2] = c2, c1
            lam = [1] * n
            s1, s2 = geo.col_scale[c1], geo.col_scale[c2]
            if p >= 0:
                lam[c1] = int(f.mul_t[s2, f.inv_t[s1]])
                lam[c2] = int(f.mul_t[s1, f.inv_t[s2]])
            out.append(SemilinearIsometry(tuple(perm), tuple(lam), 0, geo.q))
        if p < 0 and geo.q > 2:
            lam = [1] * n
            lam[cs[0]] = f.primitive
            out.append(SemilinearIsometry(tuple(range(n)), tuple(lam), 0, geo.q))
    return out


def _transport(geo: _Geometry, leaf: _Leaf) -> tuple[SemilinearIsometry, np.ndarray]:
    f = geo.f
    n = geo.n
    nmat, a = leaf.T
    ainv = (-a) % f.aut_order
    img = matmul(nmat, f.frob_t[a][geo.pts[leaf.order].T], f)  # k x m, columns T(p)
    nz = img != 0
    lead = img[np.argmax(nz, axis=0), np.arange(geo.m)]
    canon_pts = f.mul_t[f.inv_t[lead][None, :], img]
    pos_of_point = np.empty(geo.m, dtype=np.int64)
    pos_of_point[leaf.order] = np.arange(geo.m)
    nu_of_point = np.empty(geo.m, dtype=np.uint8)
    nu_of_point[leaf.order] = lead
    starts = np.concatenate([[0], np.cumsum(geo.mult[leaf.order])])
    used = np.zeros(geo.m, dtype=np.int64)
    perm = [0] * n
    lam = [1] * n
    zpos = int(starts[-1])
    cols = np.zeros((geo.k, n), dtype=np.uint8)
    for c in range(n):
        p = int(geo.col_point[c])
        if p < 0:
            perm[c] = zpos
            zpos += 1
            continue
        i = pos_of_point[p]
        t = int(starts[i] + used[i])
        used[i] += 1
        perm[c] = t
        denom = f.mul_t[f.frob_t[a][geo.col_scale[c]], nu_of_point[p]]
        lam[c] = int(f.frob_t[ainv][f.inv_t[denom]])
        cols[:, t] = canon_pts[:, i]
    return SemilinearIsometry(tuple(perm), tuple(lam), a, geo.q), cols


def canonical_form(c: LinearCode) -> CanonicalResult:
    """Canonical representative, transport, automorphisms and orbit data."""
    return canonical_from_geometry(_Geometry(c))


def canonical_from_geometry(geo: _Geometry) -> CanonicalResult:
    c = geo.code
    f = geo.f
    n = c.n
    zeros = frozenset(int(i) for i in np.nonzero(geo.col_point < 0)[0])
    s = _Search(geo).run()
    leaf = s.best
    transport, cols = _transport(geo, leaf)
    red, _ = rref(cols, f)
    canon = LinearCode(red, c.q, check=False)

    point_maps = [(g.mat, g.aut) for g in s.gens]
    gens = [_point_to_isometry(geo, g.perm, g.mat, g.aut) for g in s.gens]
    if geo.q > 2:
        scal = (f.mul_t[f.primitive, np.eye(geo.k, dtype=np.uint8)], 0)
        point_maps.append(scal)
        gens.append(_point_to_isometry(geo, np.arange(geo.m), scal[0], 0))
    gens += _kernel_generators(geo)
    gens = [g for g in gens if g.perm != tuple(range(n)) or any(x != 1 for x in g.scalars) or g.aut]

    z = len(zeros)
    order = s.point_group_order
    for mlt in geo.mult:
        order *= factorial(int(mlt))
    order *= factorial(z) * (geo.q - 1) ** z

    porb = _perm_orbits(geo.m, [g.perm for g in s.gens])
    coloop = geo.coloop
    o_b = frozenset(int(i) for i in range(n) if geo.col_point[i] >= 0 and coloop[geo.col_point[i]])
    by_label: dict[int, set[int]] = {}
    for i in range(n):
        p = int(geo.col_point[i])
        if p >= 0:
            by_label.setdefault(int(porb[p]), set()).add(i)
    orbits = [frozenset(v) for v in by_label.values()]
    if zeros:
        orbits.append(zeros)
    orbits.sort(key=lambda o: min(transport.perm[i] for i in o))
    special = None
    if geo.m:
        p0 = int(leaf.order[0])
        if not coloop[p0]:
            special = frozenset(by_label[int(porb[p0])])
    return CanonicalResult(
        canon_code=canon,
        transport=transport,
        aut=AutGroup(tuple(gens), order, tuple(point_maps)),
        orbits=tuple(sorted(orbits, key=min)),
        o_a=zeros,
        o_b=o_b,
        ordered=tuple(orbits),
        special=special,
    )


def are_equivalent(c1: LinearCode, c2: LinearCode) -> SemilinearIsometry | None:
    """An isometry mapping ``c1`` onto ``c2``, or None if the codes are inequivalent."""
    if (c1.q, c1.n, c1.k) != (c2.q, c2.n, c2.k):
        return None
    if c1.weight_enumerator != c2.weight_enumerator:
        return None
    r1, r2 = canonical_form(c1), canonical_form(c2)
    if r1.key != r2.key:
        return None
    return r1.transport.then(r2.transport.inverse())

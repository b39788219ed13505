"""Lengthening codes by integer point enumeration.

A k-dimensional seed code ``C`` with column multiset ``c(u)`` is extended to
a (k+1)-dimensional code whose generator has ``G`` (plus ``r`` zeros) as its
first rows and a new last row.  In projective terms every seed point ``u``
splits into the points ``(u | t)``, ``t`` in F_q, and ``r`` copies of
``e_{k+1}`` are added.  The unknown multiplicities ``x_P`` of the points of
PG(k, q) satisfy

* ``sum_t x_(u|t) = c(u)`` for every seed point ``u`` and ``x_(e_{k+1}) = r``,
* ``x_(e_i|0) >= 1`` for the seed's unit columns (a normalization of the
  new row),
* for every hyperplane ``H``:  ``sum_{P in H} x_P + D * y_H = n' - a*D`` with
  ``0 <= y_H <= b - a``, i.e. every codeword weight lies in
  ``{i*D : a <= i <= b}``.

Solutions are enumerated by a meet-in-the-middle search over the seed
points and turned into codes; two filters keep (at least) one extension per
equivalence class, and canonical forms remove the remaining duplicates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .code import LinearCode, column_multiset, is_self_orthogonal, projective_points, vector_index
from .gf import matmul
from .augment import _pad, shard_of
from .sieve import dedup

__all__ = [
    "ExtensionProblem",
    "ExtensionSolution",
    "ConstraintSystem",
    "LatticeTask",
    "build_system",
    "enumerate_solutions",
    "solution_to_code",
    "canonical_length_filter",
    "lex_length_filter",
    "residual_weight_enumerator",
    "extend_seed",
    "classify_lattice",
    "lattice_table",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtensionProblem:
    seed: LinearCode
    r: int
    delta: int
    a: int
    b: int
    forbidden: frozenset[int] = frozenset()

    def __post_init__(self):
        if not 1 <= self.a <= self.b:
            raise ValueError("need 1 <= a <= b")
        if self.delta < 1 or self.r < 1:
            raise ValueError("need delta >= 1 and r >= 1")
        window = {i * self.delta for i in range(self.a, self.b + 1)}
        if not set(self.forbidden) <= window:
            raise ValueError("forbidden weights must lie in the weight window")

    @property
    def target_length(self) -> int:
        return self.seed.n + self.r


@dataclass(frozen=True)
class ExtensionSolution:
    """Multiplicities ``x`` of the points and slacks ``y`` of the hyperplanes of PG(k, q)."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    points: tuple[tuple[int, ...], ...] = field(repr=False)
    hyperplanes: tuple[tuple[int, ...], ...] = field(repr=False)

    def x_map(self) -> dict[tuple[int, ...], int]:
        return {p: v for p, v in zip(self.points, self.x) if v}

    def y_map(self) -> dict[tuple[int, ...], int]:
        return dict(zip(self.hyperplanes, self.y))


@dataclass
class ConstraintSystem:
    q: int
    k: int  # dimension of the extended code
    n_target: int
    delta: int
    a: int
    span: int  # b - a
    points: np.ndarray  # P x k, normalized
    hyperplanes: np.ndarray  # H x k, normalized normals
    incidence: np.ndarray  # H x P, bool
    groups: list[tuple[int, list[int]]]  # (column sum, variable indices)
    lower: np.ndarray
    upper: np.ndarray

    @property
    def rhs(self) -> int:
        return self.n_target - self.a * self.delta

    def check(self, x: np.ndarray) -> np.ndarray | None:
        """Return the slack vector if ``x`` satisfies every constraint, else None."""
        x = np.asarray(x, dtype=np.int64)
        if (x < self.lower).any() or (x > self.upper).any():
            return None
        for total, vs in self.groups:
            if x[vs].sum() != total:
                return None
        s = self.incidence.astype(np.int64) @ x
        rest = self.rhs - s
        if (rest < 0).any() or (rest % self.delta).any():
            return None
        y = rest // self.delta
        if (y > self.span).any():
            return None
        return y


def build_system(p: ExtensionProblem, *, max_mult: int | None = None) -> ConstraintSystem:
    """Constraint system for all extensions of ``p.seed`` by ``p.r`` new columns."""
    seed = p.seed
    q, k = seed.q, seed.k
    f = seed.field
    if seed.zero_coords:
        raise ValueError("seed must not have zero coordinates")
    window_lo, window_hi = p.a * p.delta, p.b * p.delta
    hw = seed.hyperplane_weights
    if (hw % p.delta).any() or (hw < window_lo).any() or (hw > window_hi).any():
        raise ValueError("seed has a weight outside the weight window")
    if max_mult is not None and p.r > max_mult:
        raise ValueError("r exceeds the multiplicity cap")
    pts = projective_points(q, k + 1)
    npts = len(pts)
    inc = matmul(pts, pts.T, f) == 0  # symmetric: hyperplane normals use the same list
    pos = np.full(q ** (k + 1), -1, dtype=np.int64)
    pos[vector_index(pts, q)] = np.arange(npts)
    lower = np.zeros(npts, dtype=np.int64)
    upper = np.zeros(npts, dtype=np.int64)
    spts, smult, _, _ = seed._point_data
    groups = []
    for u, c in zip(spts, smult):
        vs = []
        for t in range(q):
            v = np.append(u, t).astype(np.uint8)
            vs.append(int(pos[vector_index(v, q)]))
        cap = int(c) if max_mult is None else min(int(c), max_mult)
        upper[vs] = cap
        groups.append((int(c), vs))
    for i in range(k):
        e = np.zeros(k + 1, dtype=np.uint8)
        e[i] = 1
        lower[pos[vector_index(e, q)]] = 1
    e_last = np.zeros(k + 1, dtype=np.uint8)
    e_last[k] = 1
    last = int(pos[vector_index(e_last, q)])
    lower[last] = upper[last] = p.r
    groups.append((p.r, [last]))
    return ConstraintSystem(
        q=q,
        k=k + 1,
        n_target=seed.n + p.r,
        delta=p.delta,
        a=p.a,
        span=p.b - p.a,
        points=pts,
        hyperplanes=pts,
        incidence=inc,
        groups=groups,
        lower=lower,
        upper=upper,
    )


# ------------------------------------------------------------------ solver


def _compositions(total: int, lo: np.ndarray, hi: np.ndarray, min_positive: int) -> np.ndarray:
    """All vectors with the given sum, entries in [lo, hi] and each entry 0 or >= min_positive."""
    m = len(lo)
    ranges = []
    for j in range(m):
        vals = [v for v in range(int(lo[j]), int(hi[j]) + 1) if v == 0 or v >= min_positive]
        ranges.append(vals)
    if m == 1:
        return np.array([[total]] if total in ranges[0] else np.zeros((0, 1)), dtype=np.int64).reshape(-1, 1)
    head = [np.asarray(r, dtype=np.int64) for r in ranges[:-1]]
    grids = np.meshgrid(*head, indexing="ij")
    flat = np.stack([g.reshape(-1) for g in grids], axis=1)
    rest = total - flat.sum(axis=1)
    ok = np.isin(rest, np.asarray(ranges[-1], dtype=np.int64))
    return np.column_stack([flat[ok], rest[ok]])


def _expand(parts, T: int, lo_need: np.ndarray, maxrest_after: list[np.ndarray], nh: int):
    """Enumerate partial sums over ``parts`` with bound pruning."""
    sums = np.zeros((1, nh), dtype=np.int32)
    choice = np.zeros((1, 0), dtype=np.int32)
    for j, (comps, contrib) in enumerate(parts):
        ns = (sums[:, None, :] + contrib[None, :, :]).reshape(-1, nh)
        nc = np.column_stack(
            [np.repeat(choice, len(comps), axis=0), np.tile(np.arange(len(comps), dtype=np.int32), len(sums))]
        )
        ok = (ns <= T).all(axis=1) & ((ns + maxrest_after[j]) >= lo_need).all(axis=1)
        sums, choice = ns[ok], nc[ok]
        if len(sums) == 0:
            break
    return sums, choice


def enumerate_solutions(sys: ConstraintSystem, *, min_positive: int = 1) -> list[ExtensionSolution]:
    """All integral solutions, in lexicographic order of ``x``.

    ``min_positive`` additionally requires every nonzero ``x_P`` to be at
    least that value (used by canonical lengthening).
    """
    inc = sys.incidence.astype(np.int32)
    nh = inc.shape[0]
    T = sys.rhs
    lo_need = T - sys.delta * sys.span
    parts = []
    fixed = np.zeros(len(sys.lower), dtype=np.int64)
    for total, vs in sys.groups:
        lo = np.maximum(sys.lower[vs], np.where(sys.lower[vs] > 0, min_positive, 0))
        comps = _compositions(total, lo, sys.upper[vs], min_positive)
        if len(comps) == 0:
            return []
        if len(comps) == 1:
            fixed[vs] = comps[0]
            continue
        parts.append((vs, comps))
    base = (inc @ fixed).astype(np.int32)
    if (base > T).any():
        return []
    # largest parts first, then split into two halves of similar size
    parts.sort(key=lambda t: -len(t[1]))
    logs = np.log([len(c) for _, c in parts]) if parts else np.zeros(0)
    left, right, acc_l, acc_r = [], [], 0.0, 0.0
    for part, lg in zip(parts, logs):
        if acc_l <= acc_r:
            left.append(part)
            acc_l += lg
        else:
            right.append(part)
            acc_r += lg

    def prep(side):
        return [(comps, (comps @ inc[:, vs].T).astype(np.int32)) for vs, comps in side]

    lp, rp = prep(left), prep(right)
    maxes_l = [c.max(axis=0) for _, c in lp]
    maxes_r = [c.max(axis=0) for _, c in rp]
    tot_r = np.sum(maxes_r, axis=0) if maxes_r else np.zeros(nh, dtype=np.int64)

    def suffix(maxes, extra):
        out = []
        for j in range(len(maxes)):
            rest = np.sum(maxes[j + 1 :], axis=0) if j + 1 < len(maxes) else 0
            out.append(rest + extra)
        return out

    lp_b = [(comps, contrib) for comps, contrib in lp]
    if lp_b:
        lp_b[0] = (lp_b[0][0], lp_b[0][1] + base)
    else:
        lp_b = [(np.zeros((1, 0), dtype=np.int64), base[None, :].copy())]
        maxes_l = [base]
    sums_l, ch_l = _expand(lp_b, T, lo_need, suffix(maxes_l, tot_r), nh)
    tot_l = np.sum(maxes_l, axis=0) + (base if lp else 0)
    sums_r, ch_r = _expand(rp, T, lo_need, suffix(maxes_r, tot_l), nh) if rp else (
        np.zeros((1, nh), dtype=np.int32),
        np.zeros((1, 0), dtype=np.int32),
    )
    log.debug("lattice solver: %d left x %d right partial states", len(sums_l), len(sums_r))
    found_l, found_r = [], []
    if len(sums_l) and len(sums_r):
        d = sys.delta
        key_l = (T - sums_l) % d
        key_r = sums_r % d
        ul, inv_l = np.unique(key_l, axis=0, return_inverse=True)
        ur, inv_r = np.unique(key_r, axis=0, return_inverse=True)
        rmap = {row.tobytes(): i for i, row in enumerate(ur)}
        inv_l, inv_r = inv_l.reshape(-1), inv_r.reshape(-1)
        for i, row in enumerate(ul):
            j = rmap.get(row.tobytes())
            if j is None:
                continue
            li = np.nonzero(inv_l == i)[0]
            ri = np.nonzero(inv_r == j)[0]
            step = max(1, (1 << 22) // max(1, len(ri) * nh))
            for s0 in range(0, len(li), step):
                blk = li[s0 : s0 + step]
                tot = sums_l[blk][:, None, :] + sums_r[ri][None, :, :]
                ok = ((tot <= T) & (tot >= lo_need)).all(axis=2)
                a_idx, b_idx = np.nonzero(ok)
                found_l.append(blk[a_idx])
                found_r.append(ri[b_idx])
    sols = []
    if found_l:
        fl, fr = np.concatenate(found_l), np.concatenate(found_r)
        for i, j in zip(fl.tolist(), fr.tolist()):
            x = fixed.copy()
            for (vs, comps), cidx in zip(left, ch_l[i]):
                x[vs] = comps[cidx]
            for (vs, comps), cidx in zip(right, ch_r[j]):
                x[vs] = comps[cidx]
            y = sys.check(x)
            if y is None:  # pragma: no cover - guarded by construction
                raise AssertionError("solver produced an infeasible point")
            sols.append((tuple(int(v) for v in x), tuple(int(v) for v in y)))
    sols.sort()
    pts = tuple(tuple(int(v) for v in p) for p in sys.points)
    return [ExtensionSolution(x, y, pts, pts) for x, y in sols]


# ------------------------------------------------------ codes and filters


def solution_to_code(seed: LinearCode, sol: ExtensionSolution) -> LinearCode:
    """Generator with the unit vectors first, remaining columns in point order."""
    k1 = seed.k + 1
    cols = []
    rest = []
    units = {tuple(int(i == j) for i in range(k1)) for j in range(k1)}
    for p, m in zip(sol.points, sol.x):
        if m == 0:
            continue
        if p in units:
            cols.append((p.index(1), p))
            rest += [p] * (m - 1)
        else:
            rest += [p] * m
    cols.sort()
    g = np.array([p for _, p in cols] + rest, dtype=np.uint8).T
    return LinearCode(g, seed.q, check=False)


def canonical_length_filter(seed: LinearCode, candidates: Iterable[LinearCode], r: int) -> list[LinearCode]:
    """Keep extensions whose smallest column multiplicity is exactly ``r``."""
    if column_multiset(seed).min_multiplicity() < r:
        return []
    return [c for c in candidates if column_multiset(c).min_multiplicity() == r]


def residual_weight_enumerator(c: LinearCode, point_index: int) -> tuple[int, ...]:
    """Weight enumerator of the code of codewords vanishing at a point, with that point removed."""
    pts, mult, _, _ = c._point_data
    f = c.field
    msgs = projective_points(c.q, c.k)
    on = matmul(msgs, pts[point_index], f) == 0
    n_res = c.n - int(mult[point_index])
    counts = np.bincount(c.hyperplane_weights[on], minlength=n_res + 1)
    out = [int(v) * (c.q - 1) for v in counts[: n_res + 1]]
    out[0] += 1
    return tuple(out)


def lex_length_filter(
    candidates: Iterable[LinearCode], r: int, seed: LinearCode
) -> list[LinearCode]:
    """Keep extensions for which the seed has the smallest residual enumerator.

    The residuals are taken at every point of multiplicity ``r``; ties are kept.
    """
    ref = seed.weight_enumerator
    out = []
    for c in candidates:
        _, mult, _, _ = c._point_data
        if all(ref <= residual_weight_enumerator(c, int(i)) for i in np.nonzero(mult == r)[0]):
            out.append(c)
    return out


def extend_seed(
    p: ExtensionProblem,
    *,
    canonical: bool = True,
    lex: bool = True,
    max_mult: int | None = None,
) -> list[LinearCode]:
    """Filtered extensions of one seed (not yet deduplicated)."""
    if canonical and column_multiset(p.seed).min_multiplicity() < p.r:
        return []
    sys = build_system(p, max_mult=max_mult)
    sols = enumerate_solutions(sys, min_positive=p.r if canonical else 1)
    codes = [solution_to_code(p.seed, s) for s in sols]
    if p.forbidden:
        bad = set(p.forbidden)
        codes = [c for c in codes if not bad & {w for w, a in enumerate(c.weight_enumerator) if a and w}]
    if canonical:
        codes = canonical_length_filter(p.seed, codes, p.r)
    if lex:
        codes = lex_length_filter(codes, p.r, p.seed)
    return codes


# ------------------------------------------------------------ pipeline


@dataclass(frozen=True)
class LatticeTask:
    """Codes of length ``n`` and dimension ``k`` with all nonzero weights in
    ``{i*delta : a <= i <= b}`` minus ``forbidden``.

    ``b`` defaults to ``n // delta``.  ``selforth`` restricts to
    self-orthogonal codes (a property inherited by every residual code, so
    it is applied at each dimension).  ``projective`` caps multiplicities at
    one.  With ``pad`` the codes of smaller effective length are included,
    padded with zero columns.
    """

    q: int
    n: int
    k: int
    delta: int = 1
    a: int = 1
    b: int | None = None
    forbidden: frozenset[int] = frozenset()
    selforth: str | None = None
    projective: bool = False
    pad: bool = False

    def __post_init__(self):
        if self.q not in (2, 3, 4):
            raise ValueError("q must be 2, 3 or 4")
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        if self.delta < 1 or self.a < 1:
            raise ValueError("need delta >= 1 and a >= 1")
        if self.selforth == "hermitian" and self.q != 4:
            raise ValueError("the hermitian form needs q = 4")

    @property
    def top(self) -> int:
        return self.b if self.b is not None else self.n // self.delta

    def weight_ok(self, w: int) -> bool:
        return w % self.delta == 0 and self.a <= w // self.delta <= self.top and w not in self.forbidden


def _base_codes(task: LatticeTask, length: int) -> list[LinearCode]:
    if task.projective and task.k == 1 and length > 1:
        return []
    if not task.weight_ok(length):
        return []
    c = LinearCode(np.ones((1, length), dtype=np.uint8), task.q, check=False)
    if task.selforth and not is_self_orthogonal(c, task.selforth):
        return []
    return [c]


def lattice_table(
    task: LatticeTask,
    *,
    all_lengths: bool = False,
    stats: dict | None = None,
    shard: tuple[int, int] | None = None,
) -> dict[tuple[int, int], list[LinearCode]]:
    """Classify every dimension ``j <= k`` and every length ``L <= n - (k - j)``
    (every ``L <= n`` with ``all_lengths``).

    Returns ``{(L, j): codes}`` with codes of effective length ``L``.
    ``shard=(i, t)`` keeps, in the last dimension, only the seeds assigned
    to shard ``i`` of ``t``.
    """
    q, n, k = task.q, task.n, task.k
    table: dict[tuple[int, int], list[LinearCode]] = {}
    slack = 0 if all_lengths else 1

    def top_len(j: int) -> int:
        return n - (k - j) * slack

    for length in range(1, top_len(1) + 1):
        table[(length, 1)] = _base_codes(task, length)
    window_b = task.top
    for j in range(2, k + 1):
        for length in range(j, top_len(j) + 1):
            found: list[LinearCode] = []
            for r in range(1, length - j + 2):
                # residual codes of projective codes need not be projective:
                # multiplicities are capped in the last dimension only
                cap = task.projective and j == k
                if cap and r > 1:
                    break
                for seed in table.get((length - r, j - 1), []):
                    if shard is not None and j == k and shard_of(seed, shard[1]) != shard[0]:
                        continue
                    prob = ExtensionProblem(seed, r, task.delta, task.a, max(task.a, window_b))
                    ext = extend_seed(prob, max_mult=1 if cap else None)
                    ext = [c for c in ext if all(task.weight_ok(w) for w, a in enumerate(c.weight_enumerator) if a and w)]
                    if task.selforth:
                        ext = [c for c in ext if is_self_orthogonal(c, task.selforth)]
                    found.extend(ext)
            table[(length, j)] = dedup(found)
            if stats is not None:
                stats[(length, j)] = (len(found), len(table[(length, j)]))
    return table


def classify_lattice(task: LatticeTask, *, shard: tuple[int, int] | None = None) -> Iterator[LinearCode]:
    """Inequivalent [n, k]_q codes for ``task`` (see :class:`LatticeTask`)."""
    if task.k == 1:
        lengths = range(1, task.n + 1) if task.pad else [task.n]
        if shard is not None and shard[0] != 0:
            return
        for length in lengths:
            for c in _base_codes(task, length):
                yield _pad(c, task.n)
        return
    table = lattice_table(task, shard=shard)
    lengths = range(task.k, task.n + 1) if task.pad else [task.n]
    for length in lengths:
        for c in table.get((length, task.k), []):
            yield _pad(c, task.n)

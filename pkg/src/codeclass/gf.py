"""Arithmetic over the small fields F2, F3 and F4.

Elements are integer labels in ``range(q)``.  For F4 the labels are
0, 1, 2 = w and 3 = w^2 = w + 1, so addition is bitwise XOR of labels.
Every operation is a table lookup and therefore works elementwise on
numpy arrays as well as on plain integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldSpec",
    "field_for",
    "add",
    "sub",
    "neg",
    "mul",
    "inv",
    "frobenius",
    "frob_power",
    "matmul",
    "rref",
    "rank",
    "mat_inverse",
    "normalize_rows",
]


@dataclass(frozen=True, eq=False)
class FieldSpec:
    q: int
    p: int
    aut_order: int
    add_t: np.ndarray = field(repr=False)
    mul_t: np.ndarray = field(repr=False)
    neg_t: np.ndarray = field(repr=False)
    inv_t: np.ndarray = field(repr=False)
    # frob_t[a] is the table of x -> x^(p^a)
    frob_t: np.ndarray = field(repr=False)
    primitive: int = 1

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def units(self) -> range:
        return range(1, self.q)

    def __reduce__(self):
        return (field_for, (self.q,))


def _build(q: int) -> FieldSpec:
    if q in (2, 3):
        a = np.arange(q)
        add_t = (a[:, None] + a[None, :]) % q
        mul_t = (a[:, None] * a[None, :]) % q
        neg_t = (-a) % q
        p, aut_order = q, 1
        frob_t = a[None, :].copy()
        primitive = 1 if q == 2 else 2
    elif q == 4:
        a = np.arange(4)
        add_t = a[:, None] ^ a[None, :]
        # discrete logs: 1 = w^0, 2 = w^1, 3 = w^2
        log = {1: 0, 2: 1, 3: 2}
        exp = {0: 1, 1: 2, 2: 3}
        mul_t = np.zeros((4, 4), dtype=np.int64)
        for x in range(1, 4):
            for y in range(1, 4):
                mul_t[x, y] = exp[(log[x] + log[y]) % 3]
        neg_t = a.copy()
        p, aut_order = 2, 2
        frob_t = np.array([[0, 1, 2, 3], [0, 1, 3, 2]])
        primitive = 2
    else:
        raise ValueError(f"unsupported field order q={q}; expected 2, 3 or 4")
    inv_t = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        inv_t[x] = int(np.nonzero(mul_t[x] == 1)[0][0])
    tabs = [np.ascontiguousarray(t, dtype=np.uint8) for t in (add_t, mul_t, neg_t, inv_t, frob_t)]
    for t in tabs:
        t.setflags(write=False)
    return FieldSpec(q, p, aut_order, *tabs, primitive=primitive)


@lru_cache(maxsize=None)
def field_for(q: int) -> FieldSpec:
    """Return the shared (immutable) field description for ``q``."""
    return _build(int(q))


def _check(x, f: FieldSpec):
    arr = np.asarray(x)
    if arr.size and (arr.min() < 0 or arr.max() >= f.q):
        raise ValueError(f"label out of range for F{f.q}: {x!r}")
    return arr


def _out(res):
    return int(res) if np.ndim(res) == 0 else res


def add(x, y, f: FieldSpec):
    return _out(f.add_t[_check(x, f), _check(y, f)])


def sub(x, y, f: FieldSpec):
    return _out(f.add_t[_check(x, f), f.neg_t[_check(y, f)]])


def neg(x, f: FieldSpec):
    return _out(f.neg_t[_check(x, f)])


def mul(x, y, f: FieldSpec):
    return _out(f.mul_t[_check(x, f), _check(y, f)])


def inv(x, f: FieldSpec):
    arr = _check(x, f)
    if np.any(arr == 0):
        raise ZeroDivisionError("0 has no multiplicative inverse")
    return _out(f.inv_t[arr])


def frobenius(x, f: FieldSpec):
    """x -> x^p; the identity on prime fields."""
    return _out(f.frob_t[1 % f.aut_order][_check(x, f)])


def frob_power(x, a: int, f: FieldSpec):
    """Apply the field automorphism with index ``a`` (x -> x^(p^a))."""
    return f.frob_t[a % f.aut_order][x]


# ---------------------------------------------------------------- matrices


def _planes(m: np.ndarray):
    m = m.astype(np.int64)
    return m & 1, m >> 1


def matmul(a: np.ndarray, b: np.ndarray, f: FieldSpec) -> np.ndarray:
    """Matrix product over the field (any shapes numpy ``@`` accepts)."""
    if f.q in (2, 3):
        return ((a.astype(np.int64) @ b.astype(np.int64)) % f.q).astype(np.uint8)
    # F4 = F2[w]/(w^2+w+1); label bit0 = constant part, bit1 = w part
    a0, a1 = _planes(a)
    b0, b1 = _planes(b)
    p00 = a0 @ b0
    p11 = a1 @ b1
    c0 = (p00 + p11) & 1
    c1 = (a0 @ b1 + a1 @ b0 + p11) & 1
    return (c0 | (c1 << 1)).astype(np.uint8)


def rref(m: np.ndarray, f: FieldSpec, ncols: int | None = None):
    """Reduced row echelon form.

    Pivots are searched only among the first ``ncols`` columns (all by
    default), which lets callers row-reduce an augmented matrix.  Returns
    ``(R, pivots)`` where ``R`` has the zero rows kept at the bottom.
    """
    r = np.array(m, dtype=np.uint8, copy=True)
    rows, cols = r.shape
    if ncols is None:
        ncols = cols
    pivots: list[int] = []
    i = 0
    add_t, mul_t, neg_t, inv_t = f.add_t, f.mul_t, f.neg_t, f.inv_t
    for j in range(ncols):
        if i == rows:
            break
        nz = np.nonzero(r[i:, j])[0]
        if nz.size == 0:
            continue
        piv = i + int(nz[0])
        if piv != i:
            r[[i, piv]] = r[[piv, i]]
        c = r[i, j]
        if c != 1:
            r[i] = mul_t[inv_t[c], r[i]]
        col = r[:, j].copy()
        col[i] = 0
        others = np.nonzero(col)[0]
        if others.size:
            # row_o <- row_o - col[o] * row_i
            factors = neg_t[col[others]]
            r[others] = add_t[r[others], mul_t[factors[:, None], r[i][None, :]]]
        pivots.append(j)
        i += 1
    return r, pivots


def rank(m: np.ndarray, f: FieldSpec) -> int:
    return len(rref(m, f)[1])


def mat_inverse(m: np.ndarray, f: FieldSpec) -> np.ndarray:
    k = m.shape[0]
    aug = np.hstack([np.asarray(m, dtype=np.uint8), np.eye(k, dtype=np.uint8)])
    r, piv = rref(aug, f, ncols=k)
    if len(piv) != k:
        raise ValueError("matrix is singular")
    return r[:, k:].copy()


def normalize_rows(v: np.ndarray, f: FieldSpec) -> np.ndarray:
    """Scale each nonzero row so that its first nonzero entry is 1."""
    v = np.asarray(v, dtype=np.uint8)
    nz = v != 0
    has = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    lead = v[np.arange(v.shape[0]), first]
    scale = np.where(has, f.inv_t[np.where(has, lead, 1)], 1).astype(np.uint8)
    return f.mul_t[scale[:, None], v]

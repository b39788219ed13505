"""Removing equivalent codes from candidate lists."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .canon import canonical_form, coordinate_invariant
from .code import LinearCode

__all__ = ["InvariantKey", "invariant_key", "bucket", "dedup", "canonical_sort_key"]


@dataclass(frozen=True, order=True)
class InvariantKey:
    weight_enumerator: tuple[int, ...]
    multiplicities: tuple[int, ...]
    coordinate_profile: tuple[tuple[int, ...], ...] = ()


def invariant_key(c: LinearCode, *, deep: bool = False) -> InvariantKey:
    mult = tuple(sorted(int(m) for m in c._point_data[1]) + [0] * len(c.zero_coords))
    prof = tuple(sorted(coordinate_invariant(c))) if deep else ()
    return InvariantKey(c.weight_enumerator, mult, prof)


def bucket(codes: Iterable[LinearCode], *, deep: bool = False) -> dict[InvariantKey, list[LinearCode]]:
    """Group codes by invariants; equivalent codes always share a bucket."""
    out: dict[InvariantKey, list[LinearCode]] = {}
    shape = None
    for c in codes:
        if shape is None:
            shape = (c.q, c.n, c.k)
        elif (c.q, c.n, c.k) != shape:
            raise ValueError("codes with different parameters cannot be bucketed together")
        out.setdefault(invariant_key(c, deep=deep), []).append(c)
    return out


def canonical_sort_key(c: LinearCode) -> bytes:
    return canonical_form(c).key


def dedup(codes: Iterable[LinearCode]) -> list[LinearCode]:
    """One canonical representative per equivalence class, sorted by serialization."""
    seen: dict[bytes, LinearCode] = {}
    for c in codes:
        res = canonical_form(c)
        seen.setdefault(res.key, res.canon_code)
    return [seen[key] for key in sorted(seen)]

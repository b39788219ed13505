import numpy as np
import pytest

from codeclass.canon import canonical_form, random_isometry
from codeclass.code import LinearCode
from codeclass.oracle import brute_classes
from codeclass.sieve import bucket, canonical_sort_key, dedup, invariant_key
from helpers import random_code


def test_dedup_collapses_isometric_copies(rng):
    reps = list(brute_classes(3, 5, 2, ddual=2).representatives)
    noisy = []
    for c in reps:
        for _ in range(4):
            noisy.append(random_isometry(c.n, c.q, rng).apply(c))
    rng.shuffle(noisy)
    out = dedup(noisy)
    assert len(out) == len(reps)
    assert [canonical_sort_key(c) for c in out] == sorted(canonical_sort_key(c) for c in out)
    assert {canonical_form(c).key for c in out} == {canonical_form(c).key for c in reps}


def test_dedup_is_order_independent(rng):
    codes = [random_code(2, 7, 3, rng) for _ in range(30)]
    a = dedup(codes)
    b = dedup(list(reversed(codes)))
    assert [c.gen.tobytes() for c in a] == [c.gen.tobytes() for c in b]


@pytest.mark.parametrize("deep", [False, True])
def test_invariant_key_is_invariant(rng, deep):
    for q in (2, 3, 4):
        c = random_code(q, 7, 3, rng)
        d = random_isometry(7, q, rng).apply(c)
        assert invariant_key(c, deep=deep) == invariant_key(d, deep=deep)


def test_buckets_never_split_a_class(rng):
    c = random_code(2, 8, 4, rng)
    copies = [random_isometry(8, 2, rng).apply(c) for _ in range(5)]
    others = [random_code(2, 8, 4, rng) for _ in range(10)]
    groups = bucket(copies + others)
    assert any(all(x in g for x in copies) for g in groups.values())


def test_bucket_rejects_mixed_parameters():
    with pytest.raises(ValueError):
        bucket([LinearCode.from_rows("11", 2), LinearCode.from_rows("111", 2)])


def test_dedup_empty():
    assert dedup([]) == []
    assert dedup(iter([LinearCode(np.eye(2, dtype=np.uint8), 3)]))[0].k == 2

import itertools

import numpy as np
import pytest

from codeclass.augment import AugTask, classify_col
from codeclass.canon import are_equivalent, canonical_form
from codeclass.code import LinearCode, is_self_orthogonal
from codeclass.latext import (
    ExtensionProblem,
    LatticeTask,
    build_system,
    canonical_length_filter,
    classify_lattice,
    enumerate_solutions,
    extend_seed,
    lattice_table,
    lex_length_filter,
    residual_weight_enumerator,
    solution_to_code,
)
from codeclass.oracle import brute_classes

G3 = LinearCode.from_rows("1000111 0111111", 2)


def test_six_fold_repetition_extension():
    seed = LinearCode.from_rows("111111", 2)
    p = ExtensionProblem(seed, 1, 2, 2, 3)
    sols = enumerate_solutions(build_system(p))
    assert [(s.x, s.y) for s in sols] == [((3, 1, 3), (1, 0, 0))]
    assert sols[0].x_map() == {(1, 0): 3, (0, 1): 1, (1, 1): 3}
    out = extend_seed(p)
    assert len(out) == 1
    assert are_equivalent(out[0], G3) is not None


def test_four_fold_repetition_cannot_reach_g3():
    seed = LinearCode.from_rows("1111", 2)
    p = ExtensionProblem(seed, 3, 2, 2, 3)
    raw = enumerate_solutions(build_system(p))
    assert raw  # the unfiltered system is feasible
    assert extend_seed(p) == []
    assert extend_seed(p, canonical=False, lex=False)


def _brute_solutions(sys):
    ranges = [range(int(lo), int(hi) + 1) for lo, hi in zip(sys.lower, sys.upper)]
    grid = np.array(list(itertools.product(*ranges)), dtype=np.int64)
    ok = np.ones(len(grid), dtype=bool)
    for total, vs in sys.groups:
        ok &= grid[:, vs].sum(axis=1) == total
    s = grid @ sys.incidence.astype(np.int64).T
    rest = sys.rhs - s
    ok &= (rest >= 0).all(axis=1) & (rest % sys.delta == 0).all(axis=1) & (rest // sys.delta <= sys.span).all(axis=1)
    return {tuple(int(v) for v in x) for x in grid[ok]}


@pytest.mark.parametrize(
    "rows,q,r,delta,a,b",
    [
        ("111111", 2, 1, 2, 2, 3),
        ("111111", 2, 2, 2, 2, 4),
        ("1100 0011", 2, 2, 2, 1, 3),
        ("1110 0111", 2, 3, 1, 2, 6),
        ("111000 000111", 3, 2, 3, 1, 3),
        ("111", 3, 2, 3, 1, 2),
        ("11", 4, 2, 2, 1, 2),
    ],
)
def test_solver_matches_grid(rows, q, r, delta, a, b):
    seed = LinearCode.from_rows(rows, q)
    sys = build_system(ExtensionProblem(seed, r, delta, a, b))
    got = {s.x for s in enumerate_solutions(sys)}
    assert got == _brute_solutions(sys)
    for s in enumerate_solutions(sys):
        assert tuple(sys.check(np.array(s.x))) == s.y
        c = solution_to_code(seed, s)
        assert (c.n, c.k) == (seed.n + r, seed.k + 1)
        for w, cnt in enumerate(c.weight_enumerator):
            if cnt and w:
                assert w % delta == 0 and a * delta <= w <= b * delta


def test_min_positive_restricts_support():
    seed = LinearCode.from_rows("1111", 2)
    sys = build_system(ExtensionProblem(seed, 2, 1, 1, 6))
    all_sols = enumerate_solutions(sys)
    big = enumerate_solutions(sys, min_positive=2)
    assert {s.x for s in big} == {s.x for s in all_sols if all(v == 0 or v >= 2 for v in s.x)}


def test_build_system_rejects_bad_seeds():
    with pytest.raises(ValueError):
        build_system(ExtensionProblem(LinearCode.from_rows("111", 2), 1, 2, 1, 3))
    with pytest.raises(ValueError):
        build_system(ExtensionProblem(LinearCode.from_rows("110", 2), 1, 1, 1, 3))
    with pytest.raises(ValueError):
        ExtensionProblem(LinearCode.from_rows("11", 2), 1, 2, 3, 2)
    with pytest.raises(ValueError):
        ExtensionProblem(LinearCode.from_rows("11", 2), 1, 2, 1, 2, frozenset({3}))


def test_filters():
    seed = LinearCode.from_rows("111111", 2)
    assert canonical_length_filter(seed, [G3], 1) == [G3]
    assert canonical_length_filter(LinearCode.from_rows("1111", 2), [G3], 3) == []
    assert lex_length_filter([G3], 1, seed) == [G3]
    # codewords of G3 vanishing at its point of multiplicity one, (1,0)
    idx = [tuple(p) for p in G3._point_data[0].tolist()].index((1, 0))
    assert residual_weight_enumerator(G3, idx) == (1, 0, 0, 0, 0, 0, 1)


@pytest.mark.parametrize(
    "q,n,k,delta,form",
    [(2, 8, 3, 2, None), (2, 8, 4, 4, None), (3, 6, 2, 3, None), (2, 8, 3, 2, "euclidean"), (4, 6, 3, 2, "hermitian")],
)
def test_lattice_matches_oracle(q, n, k, delta, form):
    exact = LatticeTask(q, n, k, delta, selforth=form)
    padded = LatticeTask(q, n, k, delta, selforth=form, pad=True)
    assert len(list(classify_lattice(exact))) == brute_classes(q, n, k, ddual=2, delta=delta, selforth=form).count
    assert len(list(classify_lattice(padded))) == brute_classes(q, n, k, ddual=1, delta=delta, selforth=form).count


def test_lattice_projective_and_distance():
    for k in (2, 3, 4):
        lat = list(classify_lattice(LatticeTask(2, 9, k, 1, 3, projective=True)))
        col = list(classify_col(AugTask(2, 9, k, 3, 3)))
        assert sorted(canonical_form(c).key for c in lat) == sorted(canonical_form(c).key for c in col)


def test_lattice_table_shape():
    tab = lattice_table(LatticeTask(3, 13, 3, 9))
    assert len(tab[(12, 2)]) == 1 and len(tab[(13, 3)]) == 1
    full = lattice_table(LatticeTask(3, 13, 3, 9), all_lengths=True)
    assert set(tab) <= set(full)
    for (length, j), codes in full.items():
        for c in codes:
            assert c.k == j and c.effective_length == length


def test_lattice_shards_partition():
    task = LatticeTask(2, 12, 4, 2, 2)
    full = sorted(canonical_form(c).key for c in classify_lattice(task))
    parts = []
    for i in range(3):
        parts += [canonical_form(c).key for c in classify_lattice(task, shard=(i, 3))]
    assert sorted(set(parts)) == full


def test_self_orthogonal_outputs():
    for c in classify_lattice(LatticeTask(4, 10, 3, 4)):
        assert is_self_orthogonal(c, "hermitian")

import pytest

from codeclass.canon import canonical_form
from codeclass.oracle import FEASIBLE_LIMIT, OracleRefused, brute_classes, subspace_count


def gaussian_binomial(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@pytest.mark.parametrize("q,n,k", [(2, 4, 2), (3, 3, 1), (4, 5, 2), (2, 8, 4), (3, 6, 3)])
def test_subspace_count(q, n, k):
    assert subspace_count(q, n, k) == gaussian_binomial(n, k, q)


def partitions_with_parts(n, max_parts, min_parts):
    """Partitions of n into between min_parts and max_parts positive parts."""

    def rec(rem, cap, parts):
        if rem == 0:
            return 1 if parts >= min_parts else 0
        if parts == max_parts:
            return 0
        return sum(rec(rem - p, p, parts + 1) for p in range(min(rem, cap), 0, -1))

    return rec(n, n, 0)


@pytest.mark.parametrize("n", range(2, 9))
def test_binary_dimension_two(n):
    # [n,2]_2 codes without zero columns are multisets of n points on the three
    # points of PG(1,2), spanning, up to S3
    assert brute_classes(2, n, 2, ddual=2).count == partitions_with_parts(n, 3, 2)


@pytest.mark.parametrize("q,n", [(2, 5), (3, 4), (4, 3)])
def test_trivial_dimensions(q, n):
    assert brute_classes(q, n, 1, ddual=2).count == 1
    assert brute_classes(q, n, n).count == 1
    # with zero columns allowed: one class per effective length
    assert brute_classes(q, n, 1, ddual=1).count == n


def test_known_counts():
    assert brute_classes(2, 7, 4, dmin=3).count == 1
    assert brute_classes(2, 8, 4, dmin=4, ddual=2).count == 1
    # e8 and the direct sum of four copies of the [2,1] repetition code
    assert brute_classes(2, 8, 4, selforth="euclidean").count == 2
    assert brute_classes(2, 6, 3, dmin=3, ddual=2).count == 1
    assert brute_classes(4, 6, 3, dmin=4, selforth="hermitian").count == 1


def test_representatives_are_inequivalent_and_valid():
    res = brute_classes(3, 5, 2, dmin=2, ddual=2)
    keys = {canonical_form(c).key for c in res.representatives}
    assert len(keys) == res.count == len(res.representatives)
    for c in res.representatives:
        assert c.min_distance >= 2 and not c.zero_coords


def test_refuses_large_domain():
    with pytest.raises(OracleRefused):
        brute_classes(2, 12, 6)
    assert subspace_count(2, 12, 6) > FEASIBLE_LIMIT
    with pytest.raises(ValueError):
        brute_classes(2, 5, 2, ddual=4)

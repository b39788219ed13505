"""Shared strategies and brute-force references for the test suite."""

import itertools

import numpy as np
from hypothesis import strategies as st

from codeclass import gf
from codeclass.code import LinearCode


def random_code(q, n, k, gen):
    f = gf.field_for(q)
    while True:
        g = gen.integers(0, q, (k, n), dtype=np.uint8)
        if gf.rank(g, f) == k:
            return LinearCode(g, q)


@st.composite
def codes(draw, qs=(2, 3, 4), max_n=7, max_k=4, min_n=1):
    q = draw(st.sampled_from(qs))
    n = draw(st.integers(min_n, max_n))
    k = draw(st.integers(1, min(n, max_k)))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_code(q, n, k, np.random.default_rng(seed))


def naive_words(c):
    f = c.field
    out = []
    for msg in itertools.product(range(c.q), repeat=c.k):
        w = [0] * c.n
        for coef, row in zip(msg, c.gen):
            for j in range(c.n):
                w[j] = gf.add(w[j], gf.mul(coef, int(row[j]), f), f)
        out.append(tuple(w))
    return out


def brute_automorphisms(c):
    """Every (perm, scalars, aut) fixing ``c``; returns the list of permutations and the count."""
    f = c.field
    n, k, q = c.n, c.k, c.q
    words = {tuple(w) for w in naive_words(c)}
    lams = np.array(list(itertools.product(range(1, q), repeat=n)), dtype=np.uint8)
    perms, count = [], 0
    for a in range(f.aut_order):
        scaled_all = f.frob_t[a][f.mul_t[lams[:, None, :], c.gen[None, :, :]]]  # (S, k, n)
        for perm in itertools.permutations(range(n)):
            img = np.empty_like(scaled_all)
            img[:, :, list(perm)] = scaled_all
            for m in img:
                if all(tuple(r) in words for r in m.tolist()):
                    count += 1
                    perms.append(perm)
    return perms, count


def orbits_from_perms(n, perms):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return {frozenset(g) for g in groups.values()}

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from mimicnet.errors import DimensionMismatch
from mimicnet.graph import Graph
from mimicnet.oracle import oracle_matching_pattern
from mimicnet.solvers import perfect_matching
from mimicnet.transfer import (
    BOOLEAN,
    INF,
    TROPICAL,
    TransferMatrix,
    cover_set,
    left_fold_product,
    multiply,
    semiring_product,
    trace,
    transfer_matrix,
)

from helpers import random_graph


def square(entries, semiring=BOOLEAN, side=("a",), other=("b",)):
    k = len(side)
    rows = tuple(range(1 << k))
    return TransferMatrix(side, rows, other, rows, [list(r) for r in entries], semiring)


def solver_for(g: Graph):
    edges = [(u, v, 0, e) for e, (u, v) in enumerate(g.edges)]
    return lambda cover: perfect_matching(cover, edges) is not None


def test_single_edge_matrix():
    # the row is what is already covered below, so the edge u-v gives an anti-diagonal
    g = Graph(2, [(0, 1)])
    m = transfer_matrix(solver_for(g), [], [0], [1])
    assert m.shape == (2, 2)
    assert m.entries == [[False, True], [True, False]]
    assert m.entry(0, 1) and m.entry(1, 0)


def test_interior_pair():
    g = Graph(2, [(0, 1)])
    m = transfer_matrix(solver_for(g), [0, 1], [], [])
    assert m.shape == (1, 1) and m.entries == [[True]]
    assert m.row_vector() == {0: True}


def test_cover_set_rejects_uncovering():
    assert cover_set([], [5], [5], 1, 0) is None
    assert cover_set([7], [5], [5], 1, 1) == [7]


def test_parity_filter_keeps_four_by_four():
    g = random_graph(1, 8, 0.5)
    m = transfer_matrix(solver_for(g), [3, 4], [0, 1, 2], [5, 6, 7], BOOLEAN, 0, 1)
    assert m.shape == (4, 4)


@given(st.integers(0, 10_000))
def test_entries_agree_with_oracle(seed):
    rng = random.Random(seed)
    g = random_graph(seed, 10, 0.35)
    verts = list(range(10))
    rng.shuffle(verts)
    lo, hi = verts[:3], verts[3:6]
    if rng.random() < 0.5:
        hi = [lo[0]] + hi[1:]  # sides may share vertices
    sides = list(dict.fromkeys(lo + hi))
    interior = [v for v in range(10) if v not in sides]
    m = transfer_matrix(solver_for(g), interior, lo, hi)
    pattern = oracle_matching_pattern(g, sides)
    for i, r in enumerate(m.rows):
        for j, c in enumerate(m.cols):
            cover = cover_set(interior, lo, hi, r, c)
            if cover is None:
                assert m.entries[i][j] is False
                continue
            mask = sum(1 << sides.index(v) for v in cover if v in sides)
            assert m.entries[i][j] == (mask in pattern)


def test_boolean_product():
    a = square([[1, 0], [0, 1]])
    b = square([[0, 1], [1, 0]], side=("b",), other=("c",))
    assert [[bool(x) for x in r] for r in multiply(a, b).entries] == [[False, True], [True, False]]


def test_tropical_identity():
    ident = square([[0, INF], [INF, 0]], TROPICAL)
    m = square([[3, 5], [INF, -2]], TROPICAL, side=("b",), other=("c",))
    assert multiply(ident, m).entries == m.entries


def test_dimension_mismatch():
    a = square([[1, 0], [0, 1]])
    b = square([[1] * 4] * 4, side=("x", "y"), other=("z", "w"))
    with pytest.raises(DimensionMismatch):
        multiply(a, b)
    with pytest.raises(DimensionMismatch):
        semiring_product([])


@given(st.integers(0, 10_000), st.sampled_from([BOOLEAN, TROPICAL]))
def test_balanced_equals_left_fold(seed, semiring):
    rng = random.Random(seed)
    sides = [(f"s{i}", f"t{i}") for i in range(6)]
    mats = []
    for i in range(5):
        if semiring == BOOLEAN:
            ent = [[rng.random() < 0.4 for _ in range(4)] for _ in range(4)]
        else:
            ent = [[rng.choice([INF, rng.randint(-9, 9)]) for _ in range(4)] for _ in range(4)]
        mats.append(square(ent, semiring, side=sides[i], other=sides[i + 1]))
    bal = semiring_product(mats, semiring)
    fold = left_fold_product(mats)
    assert bal.entries == fold.entries
    for i in range(4):
        for j in range(4):
            value = bal.entries[i][j]
            if (semiring == BOOLEAN and not value) or value == INF:
                continue
            cells = trace(bal, i, j)
            assert sorted(cells) == list(range(5))
            assert cells[0][0] == i and cells[4][1] == j
            total = 0
            for leaf in range(5):
                r, c = cells[leaf]
                if leaf < 4:
                    assert cells[leaf + 1][0] == c
                x = mats[leaf].entries[r][c]
                assert x if semiring == BOOLEAN else x != INF
                total += 0 if semiring == BOOLEAN else x
            if semiring == TROPICAL:
                assert total == value


def test_witness_prefers_least_middle_index():
    a = square([[1, 1], [0, 0]])
    b = square([[1, 0], [1, 0]], side=("b",), other=("c",))
    assert multiply(a, b).witness[0][0] == 0

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import trees
from oracles import naive_join, random_raw_tree
from linf_cophenetic.lca import build_index, join
from linf_cophenetic.tree_core import build_merge_tree, leaves, leq


def test_one_node():
    t = build_merge_tree([(5.0, None)])
    idx = build_index(t)
    assert idx.euler_tour.tolist() == [0]
    assert join(idx, 0, 0) == 0
    assert idx.join_heights([0], [0]).tolist() == [5.0]


def test_cherry():
    t = build_merge_tree([(1.0, None), (0.0, 0, "A"), (0.0, 0, "B")])
    idx = build_index(t)
    a, b = leaves(t)
    assert join(idx, a, b) == t.root
    assert join(idx, a, a) == a


def test_tour_shape():
    rng = np.random.default_rng(1)
    for _ in range(20):
        t = build_merge_tree(random_raw_tree(rng, int(rng.integers(1, 64))))
        idx = build_index(t)
        n = t.n_nodes
        assert idx.euler_tour.shape == (2 * n - 1,)
        assert sorted(set(idx.euler_tour.tolist())) == list(range(n))
        for k in range(idx.sparse_table.shape[0]):
            w = 1 << k
            for i in range(0, 2 * n - w):
                window = idx.depth_array[i : i + w]
                pos = idx.sparse_table[k, i]
                assert idx.depth_array[pos] == window.min()
                # leftmost minimum
                assert pos == i + int(np.argmin(window))


def test_fig2_joins(fig2_left, fig2_right):
    for pt, expected in (
        (fig2_left, {("1", "2"): 6.0, ("3", "4"): 5.0, ("1", "3"): 7.0}),
        (fig2_right, {("2", "3"): 6.0, ("1", "4"): 7.0}),
    ):
        idx = build_index(pt.tree)
        for (x, y), h in expected.items():
            v = join(idx, int(pt.labels[pt.label_of(x)]), int(pt.labels[pt.label_of(y)]))
            assert pt.tree.heights[v] == h


@pytest.mark.parametrize("seed", range(100))
def test_exhaustive_against_naive(seed):
    rng = np.random.default_rng(seed)
    t = build_merge_tree(random_raw_tree(rng, int(rng.integers(1, 65))))
    idx = build_index(t)
    n = t.n_nodes
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    many = idx.join_many(a, b)
    hs = idx.join_heights(a, b)
    for u in range(n):
        for v in range(n):
            w = naive_join(t, u, v)
            assert join(idx, u, v) == w
            assert many[u, v] == w
            assert hs[u, v] == t.heights[w]


@given(trees(1, 24), st.data())
def test_semilattice_laws(pt, data):
    t = pt.tree
    idx = build_index(t)
    node = st.integers(0, t.n_nodes - 1)
    a, b, c = data.draw(node), data.draw(node), data.draw(node)
    assert join(idx, a, a) == a
    assert join(idx, a, b) == join(idx, b, a)
    assert join(idx, join(idx, a, b), c) == join(idx, a, join(idx, b, c))
    assert leq(t, a, b) == (join(idx, a, b) == b)
    j = join(idx, a, b)
    assert t.heights[j] >= max(t.heights[a], t.heights[b])
    # least upper bound
    assert leq(t, a, j) and leq(t, b, j)
    for z in range(t.n_nodes):
        if leq(t, a, z) and leq(t, b, z):
            assert leq(t, j, z)

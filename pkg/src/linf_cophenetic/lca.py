"""Constant-time join (lowest common ancestor) queries.

The index is the classic reduction of LCA to range-minimum over an Euler tour:
``join(a, b)`` is the shallowest node visited by the tour between the first
visits of ``a`` and ``b``.  Two sparse tables are kept over the tour:

* ``sparse_table`` -- tour position of the minimum depth in each window,
  used to return the join node itself;
* ``height_table`` -- maximum height in each window.  Every node the tour
  passes between ``a`` and ``b`` lies below their join, and heights are
  monotone toward the root, so this maximum *is* the height of the join.
  It lets :meth:`LcaIndex.join_heights` skip the node lookup entirely, which
  is what the cophenetic vector needs.

Build is O(N log N) time and space for N nodes; queries are O(1).
"""

from __future__ import annotations

import numpy as np

from .tree_core import MergeTree


class LcaIndex:
    """Euler tour plus sparse tables for one :class:`MergeTree`.

    Attributes
    ----------
    euler_tour : ndarray of intp, shape (2N - 1,)
    first_occurrence : ndarray of intp, shape (N,)
    depth_array : ndarray of intp, shape (2N - 1,)
        Depth of the node at each tour position.
    sparse_table : ndarray of intp, shape (levels, 2N - 1)
        ``sparse_table[k, i]`` is the tour position of the leftmost minimum
        of ``depth_array[i : i + 2**k]``.
    height_table : ndarray of float64, shape (levels, 2N - 1)
        ``height_table[k, i]`` is ``max(heights[euler_tour[i : i + 2**k]])``.
    log2 : ndarray of intp
        ``log2[m] == floor(log2(m))`` for ``m >= 1``.
    """

    __slots__ = (
        "tree",
        "euler_tour",
        "first_occurrence",
        "depth_array",
        "sparse_table",
        "height_table",
        "log2",
    )

    def __init__(self, tree: MergeTree):
        self.tree = tree
        n = tree.n_nodes
        children = tree.children
        tour = np.empty(2 * n - 1, dtype=np.intp)
        first = np.full(n, -1, dtype=np.intp)

        # iterative DFS; a node is re-emitted after each child returns
        pos = 0
        stack = [(tree.root, 0)]
        while stack:
            v, k = stack.pop()
            tour[pos] = v
            if first[v] < 0:
                first[v] = pos
            pos += 1
            if k < len(children[v]):
                stack.append((v, k + 1))
                stack.append((children[v][k], 0))
        assert pos == 2 * n - 1, "tree is not connected"

        m = tour.shape[0]
        depth_arr = tree.depth[tour]
        height_arr = tree.heights[tour]
        levels = max(1, int(m).bit_length())
        sparse = np.empty((levels, m), dtype=np.intp)
        hmax = np.empty((levels, m), dtype=np.float64)
        sparse[0] = np.arange(m)
        hmax[0] = height_arr
        for k in range(1, levels):
            half = 1 << (k - 1)
            width = m - (1 << k) + 1
            left = sparse[k - 1, :width]
            right = sparse[k - 1, half : half + width]
            # ties go left
            sparse[k, :width] = np.where(
                depth_arr[right] < depth_arr[left], right, left
            )
            sparse[k, width:] = sparse[k - 1, width:]
            hmax[k, :width] = np.maximum(hmax[k - 1, :width], hmax[k - 1, half : half + width])
            hmax[k, width:] = hmax[k - 1, width:]

        log2 = np.zeros(m + 1, dtype=np.intp)
        for k in range(1, levels):
            log2[1 << k :] += 1

        for a in (tour, first, depth_arr, sparse, hmax, log2):
            a.setflags(write=False)
        self.euler_tour = tour
        self.first_occurrence = first
        self.depth_array = depth_arr
        self.sparse_table = sparse
        self.height_table = hmax
        self.log2 = log2

    def join(self, a: int, b: int) -> int:
        """The join ``a v b``: the lowest common ancestor of two nodes."""
        if a == b:
            return int(a)
        l = self.first_occurrence[a]
        r = self.first_occurrence[b]
        if l > r:
            l, r = r, l
        k = self.log2[r - l + 1]
        i = self.sparse_table[k, l]
        j = self.sparse_table[k, r - (1 << k) + 1]
        if self.depth_array[j] < self.depth_array[i]:
            i = j
        return int(self.euler_tour[i])

    def join_many(self, a, b) -> np.ndarray:
        """Vectorized :meth:`join` over broadcastable node-index arrays."""
        fa = self.first_occurrence[np.asarray(a)]
        fb = self.first_occurrence[np.asarray(b)]
        l = np.minimum(fa, fb)
        r = np.maximum(fa, fb)
        k = self.log2[r - l + 1]
        i = self.sparse_table[k, l]
        j = self.sparse_table[k, r - (1 << k) + 1]
        best = np.where(self.depth_array[j] < self.depth_array[i], j, i)
        return self.euler_tour[best]

    def join_heights(self, a, b) -> np.ndarray:
        """Heights of ``join_many(a, b)`` without resolving the join nodes."""
        fa = self.first_occurrence[np.asarray(a)]
        fb = self.first_occurrence[np.asarray(b)]
        return self._window_max(np.minimum(fa, fb), np.maximum(fa, fb))

    def _window_max(self, l: np.ndarray, r: np.ndarray) -> np.ndarray:
        k = self.log2[r - l + 1]
        flat = self.height_table.ravel()
        m = self.height_table.shape[1]
        base = k * m
        return np.maximum(flat[base + l], flat[base + r - (1 << k) + 1])


def build_index(t: MergeTree) -> LcaIndex:
    """Preprocess ``t`` for O(1) join queries."""
    return LcaIndex(t)


def join(idx: LcaIndex, a: int, b: int) -> int:
    """Least upper bound of nodes ``a`` and ``b`` in the tree order."""
    return idx.join(a, b)

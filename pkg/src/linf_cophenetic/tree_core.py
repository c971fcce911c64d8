"""Merge trees and labeled merge trees (phylogenetic trees).

A merge tree is stored as flat arrays over its nodes: ``heights[v]`` is the
function value at ``v`` and ``parent[v]`` the next node up (``-1`` at the root,
whose upward edge to +infinity is implicit).  Trees are canonicalized at build
time: non-root pass-through vertices (exactly one child) are removed and nodes
are renumbered in pre-order with children sorted by ``(smallest leaf name in
subtree, height)``.  The root is therefore always node 0 and the leaves appear
in left-to-right order.

Heights only need to be weakly monotone along edges; pass ``strict=True`` to
:func:`build_merge_tree` to reject zero-length edges.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateLabel,
    EmptyLabel,
    InvalidNode,
    LabelCountMismatch,
    MultipleRoots,
    NoRoot,
    NonFiniteHeight,
    NonMonotoneEdge,
    UnnamedLeaf,
)

ROOT = -1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class MergeTree:
    """A canonical, immutable merge tree.

    Use :func:`build_merge_tree` rather than calling the constructor directly;
    the constructor trusts its arguments.

    Attributes
    ----------
    heights : ndarray of float64, shape (n_nodes,)
    parent : ndarray of intp, shape (n_nodes,)
        Parent index, ``-1`` for the root.
    children : tuple of tuple of int
    names : tuple of (str or None)
        Leaf names (``None`` on internal nodes and unnamed leaves).
    root : int
        Always 0 for trees produced by :func:`build_merge_tree`.
    """

    __slots__ = ("heights", "parent", "children", "names", "root", "_depth")

    def __init__(self, heights, parent, children, names, root=0):
        self.heights = _readonly(np.asarray(heights, dtype=np.float64).copy())
        self.parent = _readonly(np.asarray(parent, dtype=np.intp).copy())
        self.children = tuple(tuple(int(c) for c in ch) for ch in children)
        self.names = tuple(names)
        self.root = int(root)
        self._depth = None

    @property
    def n_nodes(self) -> int:
        return int(self.heights.shape[0])

    @property
    def depth(self) -> np.ndarray:
        """Edge count from the root to every node."""
        if self._depth is None:
            depth = np.zeros(self.n_nodes, dtype=np.intp)
            for v in _preorder(self.children, self.root):
                p = self.parent[v]
                if p >= 0:
                    depth[v] = depth[p] + 1
            self._depth = _readonly(depth)
        return self._depth

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def raw_nodes(self) -> list[tuple[float, int, Optional[str]]]:
        """``(height, parent, name)`` triples accepted by :func:`build_merge_tree`."""
        return [
            (float(h), int(p), n)
            for h, p, n in zip(self.heights, self.parent, self.names)
        ]

    def with_heights(self, heights) -> "MergeTree":
        """Same shape and names, new heights.  Monotonicity is not rechecked."""
        heights = np.asarray(heights, dtype=np.float64)
        if heights.shape != self.heights.shape:
            raise ValueError("heights must have one entry per node")
        return MergeTree(heights, self.parent, self.children, self.names, self.root)

    def __eq__(self, other):
        if not isinstance(other, MergeTree):
            return NotImplemented
        return (
            self.root == other.root
            and self.names == other.names
            and np.array_equal(self.parent, other.parent)
            and np.array_equal(self.heights, other.heights)
        )

    def __hash__(self):
        return hash((self.names, self.parent.tobytes(), self.heights.tobytes()))

    def __repr__(self):
        return f"MergeTree(n_nodes={self.n_nodes}, n_leaves={len(leaves(self))})"


class PhyloTree:
    """A merge tree together with a bijection from labels onto its leaves.

    Labels are 0-based internally: label ``i`` is the ``i``-th name of
    ``label_names`` in lexicographic order and ``labels[i]`` is its leaf node.
    """

    __slots__ = ("tree", "labels", "label_names", "_name_index")

    def __init__(self, tree: MergeTree, labels, label_names):
        self.tree = tree
        self.labels = _readonly(np.asarray(labels, dtype=np.intp).copy())
        self.label_names = tuple(label_names)
        self._name_index = None

    @property
    def n(self) -> int:
        return len(self.label_names)

    @property
    def heights(self) -> np.ndarray:
        return self.tree.heights

    def leaf_heights(self) -> np.ndarray:
        return self.tree.heights[self.labels]

    def label_of(self, name: str) -> int:
        if self._name_index is None:
            self._name_index = {nm: i for i, nm in enumerate(self.label_names)}
        return self._name_index[name]

    def with_heights(self, heights) -> "PhyloTree":
        return PhyloTree(self.tree.with_heights(heights), self.labels, self.label_names)

    def __eq__(self, other):
        if not isinstance(other, PhyloTree):
            return NotImplemented
        return (
            self.tree == other.tree
            and self.label_names == other.label_names
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self):
        return hash((self.tree, self.label_names))

    def __repr__(self):
        return f"PhyloTree(n={self.n}, n_nodes={self.tree.n_nodes})"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _preorder(children: Sequence[Sequence[int]], root: int) -> list[int]:
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(children[v]))
    return order


def _unpack(raw) -> tuple[float, int, Optional[str]]:
    if len(raw) == 2:
        h, p = raw
        name = None
    elif len(raw) == 3:
        h, p, name = raw
    else:
        raise InvalidNode(f"raw node must be (height, parent[, name]), got {raw!r}")
    p = ROOT if p is None else int(p)
    try:
        h = float(h)
    except (TypeError, ValueError) as exc:
        raise NonFiniteHeight(f"height {h!r} is not a real number") from exc
    return h, p, name


def build_merge_tree(raw_nodes: Iterable, strict: bool = False) -> MergeTree:
    """Validate and canonicalize a merge tree.

    Parameters
    ----------
    raw_nodes : iterable of tuple
        ``(height, parent)`` or ``(height, parent, name)`` per node, where
        ``parent`` is the index of the parent node in the same list, or
        ``None``/``-1`` for the root.  Names are only meaningful on leaves.
    strict : bool, default False
        Reject edges whose endpoints have equal height.

    Returns
    -------
    MergeTree

    Raises
    ------
    NonFiniteHeight, InvalidNode, MultipleRoots, CycleDetected, NonMonotoneEdge
    """
    nodes = [_unpack(r) for r in raw_nodes]
    if not nodes:
        raise NoRoot("a merge tree needs at least one node")
    n = len(nodes)
    heights = [h for h, _, _ in nodes]
    parent = [p for _, p, _ in nodes]
    names = [nm for _, _, nm in nodes]

    for v, h in enumerate(heights):
        if not math.isfinite(h):
            raise NonFiniteHeight(f"node {v} has non-finite height {h!r}")

    roots = []
    children: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if p == ROOT:
            roots.append(v)
        elif 0 <= p < n:
            if p == v:
                raise CycleDetected(f"node {v} is its own parent")
            children[p].append(v)
        else:
            raise InvalidNode(f"node {v} has parent {p} outside 0..{n - 1}")
    if len(roots) > 1:
        raise MultipleRoots(f"nodes {roots} all lack a parent")
    if not roots:
        # every node has a parent, so following parents must revisit a node
        raise CycleDetected("no root: the parent relation contains a cycle")
    root = roots[0]

    seen = _preorder(children, root)
    if len(seen) != n:
        unreached = sorted(set(range(n)) - set(seen))
        raise CycleDetected(f"nodes {unreached[:10]} lie on a cycle off the root")

    for v, p in enumerate(parent):
        if p == ROOT:
            continue
        if heights[v] > heights[p] or (strict and heights[v] == heights[p]):
            raise NonMonotoneEdge(
                f"edge {v}->{p} goes from height {heights[v]!r} to {heights[p]!r}"
            )

    # Collapse non-root pass-through vertices: each kept node hangs from its
    # nearest kept proper ancestor.
    kept_parent = [ROOT] * n
    for v in seen:
        p = parent[v]
        if p == ROOT:
            continue
        while p != root and len(children[p]) == 1:
            p = parent[p]
        kept_parent[v] = p
    kept = [v for v in seen if v == root or len(children[v]) != 1]
    kept_children: dict[int, list[int]] = {v: [] for v in kept}
    for v in kept:
        if v != root:
            kept_children[kept_parent[v]].append(v)

    # Sort key: (smallest leaf name below, height).  Later fields only break
    # ties deterministically for unnamed or duplicated names.
    min_name: dict[int, str] = {}
    min_leaf_h: dict[int, float] = {}
    for v in reversed([u for u in seen if u in kept_children]):
        ch = kept_children[v]
        if not ch:
            min_name[v] = "" if names[v] is None else str(names[v])
            min_leaf_h[v] = heights[v]
        else:
            min_name[v] = min(min_name[c] for c in ch)
            min_leaf_h[v] = min(min_leaf_h[c] for c in ch)

    def key(v):
        return (min_name[v], heights[v], min_leaf_h[v], len(kept_children[v]))

    for v in kept_children:
        kept_children[v].sort(key=key)

    order = _preorder(kept_children, root)
    new_index = {v: i for i, v in enumerate(order)}
    new_heights = [heights[v] for v in order]
    new_parent = [
        ROOT if kept_parent[v] == ROOT else new_index[kept_parent[v]] for v in order
    ]
    new_children = [[new_index[c] for c in kept_children[v]] for v in order]
    new_names = [names[v] if not kept_children[v] else None for v in order]
    return MergeTree(new_heights, new_parent, new_children, new_names, root=0)


def leaves(t: MergeTree) -> list[int]:
    """Childless nodes, in node-index (left-to-right) order."""
    return [v for v, ch in enumerate(t.children) if not ch]


def label_tree(t: MergeTree, names: Optional[Sequence[str]] = None) -> PhyloTree:
    """Attach labels to the leaves of ``t``.

    Parameters
    ----------
    t : MergeTree
    names : sequence of str, optional
        One name per leaf, in the order of :func:`leaves`.  Defaults to the
        names stored on the tree.

    Returns
    -------
    PhyloTree
        Label ``i`` is the leaf whose name has lexicographic rank ``i``, so
        trees over the same name set align regardless of input order.
    """
    leaf_nodes = leaves(t)
    if names is None:
        names = [t.names[v] for v in leaf_nodes]
        missing = [v for v, nm in zip(leaf_nodes, names) if nm is None]
        if missing:
            raise UnnamedLeaf(f"leaves {missing[:10]} carry no name")
    names = list(names)
    if len(names) != len(leaf_nodes):
        raise LabelCountMismatch(
            f"{len(names)} names given for {len(leaf_nodes)} leaves"
        )
    seen = set()
    for nm in names:
        if not isinstance(nm, str) or nm == "":
            raise EmptyLabel(f"leaf names must be nonempty strings, got {nm!r}")
        if nm in seen:
            raise DuplicateLabel(nm)
        seen.add(nm)
    if any(t.names[v] != nm for v, nm in zip(leaf_nodes, names)):
        # renaming can change the canonical child order, so rebuild
        raw = t.raw_nodes()
        for v, nm in zip(leaf_nodes, names):
            h, p, _ = raw[v]
            raw[v] = (h, p, nm)
        t = build_merge_tree(raw)
        leaf_nodes = leaves(t)
        names = [t.names[v] for v in leaf_nodes]
    order = sorted(range(len(names)), key=names.__getitem__)
    labels = [leaf_nodes[k] for k in order]
    label_names = [names[k] for k in order]
    return PhyloTree(t, labels, label_names)


def leq(t: MergeTree, a: int, b: int) -> bool:
    """True iff ``b`` is an ancestor-or-self of ``a``."""
    n = t.n_nodes
    if not (0 <= a < n and 0 <= b < n):
        raise InvalidNode(f"node indices must lie in 0..{n - 1}")
    depth = t.depth
    while depth[a] > depth[b]:
        a = t.parent[a]
    return a == b

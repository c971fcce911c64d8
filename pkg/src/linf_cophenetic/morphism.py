"""Explicit construction of phylogenetic-tree morphisms.

A morphism ``X -> Y`` must send every point ``x`` above leaf ``l(i)`` to the
unique point of ``Y`` lying above ``mu(i)`` at height ``f(x)``: that is forced
by function preservation, label preservation and continuity.  So a morphism
exists iff this forced assignment is well defined, i.e. iff for every node
``x`` of ``X`` all leaves below ``x`` lead to the same point of ``Y``, and
every leaf sits no lower than its partner.

This module builds the map node by node with plain parent walks.  It never
touches the LCA index or cophenetic vectors, which makes it an independent
check on :func:`linf_cophenetic.cophenetic.hom_exists`.  Cost is
O(nodes * leaves * depth); intended for small trees.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .cophenetic import check_aligned
from .tree_core import MergeTree, PhyloTree


class TreePoint(NamedTuple):
    """A point of a merge tree: height ``height`` on the edge above ``node``.

    ``node`` is the highest vertex on the path with height ``<= height``, so
    a vertex itself is represented as ``TreePoint(v, heights[v])``.
    """

    node: int
    height: float


def point_above(t: MergeTree, v: int, height: float) -> Optional[TreePoint]:
    """The point at ``height`` on the upward path from ``v``, or None if below ``v``."""
    h = t.heights
    if height < h[v]:
        return None
    p = t.parent[v]
    while p >= 0 and h[p] <= height:
        v = p
        p = t.parent[v]
    return TreePoint(int(v), float(height))


def explicit_morphism(x: PhyloTree, y: PhyloTree) -> Optional[dict[int, TreePoint]]:
    """Construct the morphism ``x -> y`` on the vertices of ``x``.

    Returns
    -------
    dict or None
        ``{vertex of x: TreePoint of y}`` when a morphism exists, otherwise
        None.  Points on edges of ``x`` map along the corresponding paths of
        ``y``; fixing the vertices determines the whole map.
    """
    check_aligned(x.label_names, y.label_names)
    tx, ty = x.tree, y.tree
    hx = tx.heights

    # labels below each vertex of x, children before parents
    below: list[list[int]] = [[] for _ in range(tx.n_nodes)]
    for i, leaf in enumerate(x.labels):
        below[leaf].append(i)
    order = _postorder(tx)
    for v in order:
        p = tx.parent[v]
        if p >= 0:
            below[p].extend(below[v])

    phi: dict[int, TreePoint] = {}
    for v in order:
        image = None
        for i in below[v]:
            q = point_above(ty, int(y.labels[i]), float(hx[v]))
            if q is None:
                return None
            if image is None:
                image = q
            elif q != image:
                return None
        phi[v] = image
    return phi


def morphism_exists(x: PhyloTree, y: PhyloTree) -> bool:
    return explicit_morphism(x, y) is not None


def verify_morphism(x: PhyloTree, y: PhyloTree, phi: dict[int, TreePoint]) -> bool:
    """Check a vertex map against the morphism axioms directly.

    Function preserving: every image sits at the height of its source.
    Label preserving: the image of leaf ``l(i)`` lies above ``mu(i)``.
    Continuity: the image of a vertex lies above the image of each child.
    """
    tx, ty = x.tree, y.tree
    if set(phi) != set(range(tx.n_nodes)):
        return False
    for v, q in phi.items():
        if q.height != tx.heights[v]:
            return False
        if not (ty.heights[q.node] <= q.height):
            return False
        up = ty.parent[q.node]
        if up >= 0 and not (q.height < ty.heights[up]):
            return False
    for i, leaf in enumerate(x.labels):
        if point_above(ty, int(y.labels[i]), phi[int(leaf)].height) != phi[int(leaf)]:
            return False
    for v in range(tx.n_nodes):
        for c in tx.children[v]:
            if point_above(ty, phi[c].node, phi[v].height) != phi[v]:
                return False
    return True


def _postorder(t: MergeTree) -> list[int]:
    out = []
    stack = [t.root]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(t.children[v])
    out.reverse()
    return out

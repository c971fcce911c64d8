"""Input validation helpers shared by the estimator, matrix and CLI layers."""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, LabelSetMismatch
from .newick import HeightConvention, NewickNode, loads, to_phylo
from .tree_core import MergeTree, PhyloTree, label_tree

TreeLike = Union[PhyloTree, MergeTree, NewickNode, str, bytes]


def check_tree(t: TreeLike, heights: Union[HeightConvention, str] = "auto") -> PhyloTree:
    """Coerce one tree-like object to a :class:`PhyloTree`.

    Accepts a PhyloTree, a MergeTree with named leaves, a parsed NewickNode or
    Newick text holding exactly one tree.
    """
    if isinstance(t, PhyloTree):
        return t
    if isinstance(t, MergeTree):
        return label_tree(t)
    if isinstance(t, NewickNode):
        return to_phylo(t, heights)
    if isinstance(t, (str, bytes)):
        trees = loads(t, heights)
        if len(trees) != 1:
            raise ValueError(f"expected one Newick tree, found {len(trees)}")
        return trees[0]
    raise TypeError(f"cannot interpret {type(t).__name__} as a phylogenetic tree")


def check_trees(
    X: Iterable[TreeLike], heights: Union[HeightConvention, str] = "auto"
) -> list[PhyloTree]:
    if isinstance(X, (str, bytes)):
        return loads(X, heights)
    trees = [check_tree(t, heights) for t in X]
    if not trees:
        raise ValueError("need at least one tree")
    return trees


def check_same_labels(trees: Sequence[PhyloTree], reference=None) -> tuple[str, ...]:
    """Return the common label set, naming the first tree that differs."""
    names = trees[0].label_names if reference is None else tuple(reference)
    for k, t in enumerate(trees):
        if t.label_names != names:
            cls = DimensionMismatch if t.n != len(names) else LabelSetMismatch
            extra = sorted(set(t.label_names) - set(names))[:5]
            missing = sorted(set(names) - set(t.label_names))[:5]
            raise cls(
                f"tree {k}: label set differs (extra {extra}, missing {missing})"
            )
    return names

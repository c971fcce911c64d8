"""Random labeled trees for tests, benchmarks and the acceptance suite."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .tree_core import ROOT, PhyloTree, build_merge_tree, label_tree


def leaf_names(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"t{i:0{width}d}" for i in range(n)]


def random_phylo_tree(
    n: int,
    rng: Optional[np.random.Generator] = None,
    low: float = 0.0,
    high: float = 100.0,
    dyadic_bits: Optional[int] = None,
    multifurcation: float = 0.0,
    names: Optional[list[str]] = None,
) -> PhyloTree:
    """Random tree with ``n`` leaves and heights in ``[low, high]``.

    Built by repeatedly merging random clusters; each merge sits above the
    higher of its children.  With ``dyadic_bits=b`` every height is a
    multiple of ``2**-b``, so shifts by dyadic amounts are exact in floating
    point.  ``multifurcation`` is the probability that a merge takes three
    clusters instead of two.
    """
    rng = np.random.default_rng(rng)
    if n < 1:
        raise ValueError("n must be >= 1")
    names = leaf_names(n) if names is None else list(names)
    if len(names) != n:
        raise ValueError("need one name per leaf")

    def snap(h):
        if dyadic_bits is None:
            return float(h)
        scale = float(1 << dyadic_bits)
        return float(np.floor(h * scale) / scale)

    span = high - low
    leaf_h = low + rng.random(n) * span * 0.5
    heights = [snap(h) for h in leaf_h]
    parent = [ROOT] * n
    node_names: list = list(names)
    clusters = list(range(n))
    tops = list(heights)
    while len(clusters) > 1:
        k = 3 if (len(clusters) >= 3 and rng.random() < multifurcation) else 2
        picks = []
        for _ in range(k):
            j = int(rng.integers(len(clusters)))
            picks.append((clusters[j], tops[j]))
            clusters[j] = clusters[-1]
            tops[j] = tops[-1]
            clusters.pop()
            tops.pop()
        m = max(t for _, t in picks)
        h = snap(m + (high - m) * rng.random() * 0.25)
        h = max(h, m)
        v = len(heights)
        heights.append(h)
        parent.append(ROOT)
        node_names.append(None)
        for c, _ in picks:
            parent[c] = v
        clusters.append(v)
        tops.append(h)
    raw = list(zip(heights, parent, node_names))
    return label_tree(build_merge_tree(raw))

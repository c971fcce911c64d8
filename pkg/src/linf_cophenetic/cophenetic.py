"""Cophenetic vectors and the distances built on them.

The cophenetic vector of a labeled tree lists, for every label pair
``i <= j`` (diagonal included), the height of the join of the two leaves.
Entries are stored flat in row-major upper-triangular order: with 0-based
labels the entry for ``(i, j)`` sits at ``i*n - i*(i-1)//2 + (j - i)``.

Distances between two trees are computed block-by-block over label rows so
that the full vectors never need to coexist in memory; for ``n = 10_000``
a single vector already takes 400 MB.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, LabelSetMismatch
from .lca import LcaIndex, build_index
from .tree_core import PhyloTree

# target number of pair entries materialized per block
_BLOCK_ENTRIES = 1 << 16


def format_real(x: float) -> str:
    """Shortest round-trip decimal, with integral values written without ``.0``."""
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def n_pairs(n: int) -> int:
    return n * (n + 1) // 2


def pair_offset(i: int, j: int, n: int) -> int:
    """Flat offset of the 0-based pair ``(i, j)``, ``i <= j``."""
    if i > j:
        i, j = j, i
    return i * n - i * (i - 1) // 2 + (j - i)


class CopheneticVector:
    """Upper-triangular table of join heights for one labeled tree.

    Parameters
    ----------
    entries : array-like of float, shape (n*(n+1)/2,)
    label_names : sequence of str
        The ``n`` names the rows refer to, in label order.
    """

    __slots__ = ("entries", "label_names")

    def __init__(self, entries, label_names: Sequence[str]):
        entries = np.asarray(entries, dtype=np.float64)
        label_names = tuple(label_names)
        if entries.ndim != 1 or entries.shape[0] != n_pairs(len(label_names)):
            raise DimensionMismatch(
                f"{entries.shape} entries do not fit {len(label_names)} labels"
            )
        entries.setflags(write=False)
        self.entries = entries
        self.label_names = label_names

    @property
    def n(self) -> int:
        return len(self.label_names)

    def entry(self, i: int, j: int) -> float:
        return float(self.entries[pair_offset(i, j, self.n)])

    def rows(self) -> list[np.ndarray]:
        """Row ``i`` holds the entries ``(i, i), (i, i+1), ..., (i, n-1)``."""
        out = []
        off = 0
        for i in range(self.n):
            width = self.n - i
            out.append(self.entries[off : off + width])
            off += width
        return out

    def to_matrix(self) -> np.ndarray:
        """Symmetric ``n x n`` matrix of join heights."""
        n = self.n
        m = np.empty((n, n), dtype=np.float64)
        iu = np.triu_indices(n)
        m[iu] = self.entries
        m.T[iu] = self.entries
        return m

    def shift(self, epsilon: float) -> "CopheneticVector":
        """Every entry lowered by ``epsilon``."""
        return CopheneticVector(self.entries - epsilon, self.label_names)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.label_names),
            "rows": [[float(x) for x in row] for row in self.rows()],
        }

    def to_json(self) -> str:
        return _dumps(self.to_dict())

    def to_csv(self) -> str:
        """One line per pair: ``label_i,label_j,height``, header included."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label_i", "label_j", "height"])
        names = self.label_names
        off = 0
        for i in range(self.n):
            for j in range(i, self.n):
                w.writerow([names[i], names[j], format_real(self.entries[off])])
                off += 1
        return buf.getvalue()

    def __eq__(self, other):
        if not isinstance(other, CopheneticVector):
            return NotImplemented
        return self.label_names == other.label_names and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash((self.label_names, self.entries.tobytes()))

    def __repr__(self):
        return f"CopheneticVector(n={self.n})"


def _dumps(obj) -> str:
    """JSON with shortest round-trip reals (integral values without ``.0``)."""

    def enc(o):
        if isinstance(o, float):
            if not math.isfinite(o):
                return json.dumps(o)
            return format_real(o)
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {enc(v)}" for k, v in o.items()) + "}"
        if isinstance(o, (list, tuple)):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        return json.dumps(o)

    return enc(obj)


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------


def _label_first_occurrence(t: PhyloTree, idx: LcaIndex) -> np.ndarray:
    if idx.tree is not t.tree and idx.tree != t.tree:
        raise ValueError("index was built for a different tree")
    return idx.first_occurrence[t.labels]


def _row_blocks(n: int, start: int = 0) -> Iterator[tuple[int, int]]:
    step = max(1, _BLOCK_ENTRIES // max(n, 1))
    for r0 in range(start, n, step):
        yield r0, min(n, r0 + step)


def _block(idx: LcaIndex, fo: np.ndarray, r0: int, r1: int) -> np.ndarray:
    """Join heights for label rows ``r0:r1`` against label columns ``r0:``."""
    rows = fo[r0:r1, None]
    cols = fo[None, r0:]
    return idx._window_max(np.minimum(rows, cols), np.maximum(rows, cols))


def cophenetic_vector(t: PhyloTree, idx: Optional[LcaIndex] = None) -> CopheneticVector:
    """Heights ``f(l(i) v l(j))`` for all ``0 <= i <= j < n``.

    Parameters
    ----------
    t : PhyloTree
    idx : LcaIndex, optional
        Index for ``t.tree``; built on demand.

    Returns
    -------
    CopheneticVector
    """
    if idx is None:
        idx = build_index(t.tree)
    fo = _label_first_occurrence(t, idx)
    n = t.n
    entries = np.empty(n_pairs(n), dtype=np.float64)
    off = 0
    for r0, r1 in _row_blocks(n):
        blk = _block(idx, fo, r0, r1)
        for a in range(r1 - r0):
            width = n - r0 - a
            entries[off : off + width] = blk[a, a:]
            off += width
    return CopheneticVector(entries, t.label_names)


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def check_aligned(a_names: Sequence[str], b_names: Sequence[str]) -> None:
    if len(a_names) != len(b_names):
        raise DimensionMismatch(f"{len(a_names)} labels vs {len(b_names)} labels")
    if tuple(a_names) != tuple(b_names):
        only_a = sorted(set(a_names) - set(b_names))
        only_b = sorted(set(b_names) - set(a_names))
        raise LabelSetMismatch(
            f"label sets differ: only in first {only_a[:5]}, only in second {only_b[:5]}"
        )


def _check_p(p) -> float:
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"p must be >= 1 or inf, got {p!r}")
    return p


def _pnorm(diff: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(diff)) if diff.size else 0.0
    if p == 1.0:
        return float(np.sum(diff))
    if p == 2.0:
        return float(math.sqrt(np.dot(diff, diff)))
    return float(np.sum(diff**p) ** (1.0 / p))


def linf_distance(a: CopheneticVector, b: CopheneticVector) -> float:
    """``max |a - b|`` over all ``n(n+1)/2`` entries, diagonal included."""
    check_aligned(a.label_names, b.label_names)
    return float(np.max(np.abs(a.entries - b.entries)))


def lp_distance(a: CopheneticVector, b: CopheneticVector, p=math.inf) -> float:
    """Entrywise ``p``-norm of ``a - b``.

    Only ``p = inf`` is an interleaving distance; finite ``p`` is provided for
    comparison with the wider cophenetic-metric family.
    """
    p = _check_p(p)
    if math.isinf(p):
        return linf_distance(a, b)
    check_aligned(a.label_names, b.label_names)
    return _pnorm(np.abs(a.entries - b.entries), p)


def tree_distance(
    a: PhyloTree,
    b: PhyloTree,
    p=math.inf,
    idx_a: Optional[LcaIndex] = None,
    idx_b: Optional[LcaIndex] = None,
) -> float:
    """Cophenetic ``p``-distance between two trees without storing either vector.

    Equal to ``lp_distance(cophenetic_vector(a), cophenetic_vector(b), p)``
    but streams over blocks of label rows, so memory stays O(n) per block.
    """
    p = _check_p(p)
    check_aligned(a.label_names, b.label_names)
    idx_a = build_index(a.tree) if idx_a is None else idx_a
    idx_b = build_index(b.tree) if idx_b is None else idx_b
    fo_a = _label_first_occurrence(a, idx_a)
    fo_b = _label_first_occurrence(b, idx_b)
    n = a.n
    inf = math.isinf(p)
    best = 0.0
    total = 0.0
    for r0, r1 in _row_blocks(n):
        diff = _block(idx_a, fo_a, r0, r1)
        diff -= _block(idx_b, fo_b, r0, r1)
        np.abs(diff, out=diff)
        if inf:
            # the block also covers some (j, i) with j < i; those repeat
            # symmetric pairs, which cannot change a maximum
            best = max(best, float(diff.max()))
        else:
            rows = np.arange(r0, r1)[:, None]
            cols = np.arange(r0, n)[None, :]
            diff[cols < rows] = 0.0
            if p == 1.0:
                total += float(diff.sum())
            else:
                total += float(np.sum(diff**p))
    if inf:
        return best
    return total ** (1.0 / p)


def hom_exists(a: CopheneticVector, b: CopheneticVector) -> bool:
    """Whether a morphism from the tree of ``a`` to the tree of ``b`` exists.

    Decided entrywise: a morphism exists iff ``a >= b`` at every pair.
    """
    check_aligned(a.label_names, b.label_names)
    return bool(np.all(a.entries >= b.entries))

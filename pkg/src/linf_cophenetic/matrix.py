"""All-pairs distance matrices over a collection of trees."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cophenetic import _dumps, format_real, tree_distance
from .lca import build_index
from .tree_core import PhyloTree
from .validation import check_same_labels


def metric_name(p: float) -> str:
    return "linf" if math.isinf(p) else f"l{format_real(p)}"


@dataclass(frozen=True)
class MatrixReport:
    labels: tuple
    values: np.ndarray
    p: float = math.inf

    @property
    def metric(self) -> str:
        return metric_name(self.p)

    def to_csv(self, fmt=format_real) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + list(self.labels))
        for lab, row in zip(self.labels, self.values):
            w.writerow([lab] + [fmt(x) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "p": "inf" if math.isinf(self.p) else float(self.p),
            "labels": list(self.labels),
            "values": [[float(x) for x in row] for row in self.values],
        }

    def to_json(self) -> str:
        return _dumps(self.to_dict()) + "\n"


def distance_matrix(
    trees: Sequence[PhyloTree],
    p: float = math.inf,
    labels: Optional[Sequence[str]] = None,
    n_jobs: Optional[int] = None,
) -> MatrixReport:
    """Symmetric matrix of cophenetic ``p``-distances, zero diagonal.

    Pairs may be evaluated on ``n_jobs`` threads; results are written by
    position, so the output does not depend on scheduling.
    """
    check_same_labels(trees)
    k = len(trees)
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(k))
    indexes = [build_index(t.tree) for t in trees]
    values = np.zeros((k, k), dtype=np.float64)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def run(pair):
        i, j = pair
        return tree_distance(trees[i], trees[j], p, indexes[i], indexes[j])

    if n_jobs and n_jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, pairs))
    else:
        results = [run(pr) for pr in pairs]
    for (i, j), d in zip(pairs, results):
        values[i, j] = values[j, i] = d
    return MatrixReport(labels, values, float(p))

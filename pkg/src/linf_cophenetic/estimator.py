"""scikit-learn compatible embedding of labeled trees.

:class:`CopheneticEmbedding` maps each tree to its cophenetic vector.  Since
that map is an isometric embedding for the sup-norm, the Chebyshev distance
between two transformed rows equals the interleaving distance between the
trees, so the output feeds straight into ``pairwise_distances``, nearest
neighbours, clustering and the rest of the ecosystem::

    from sklearn.metrics import pairwise_distances
    emb = CopheneticEmbedding().fit(trees)
    D = pairwise_distances(emb.transform(trees), metric="chebyshev")
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cophenetic import cophenetic_vector, n_pairs
from .validation import check_same_labels, check_trees


class CopheneticEmbedding(TransformerMixin, BaseEstimator):
    """Embed labeled trees as cophenetic vectors.

    Parameters
    ----------
    heights : str, default="auto"
        Height convention for Newick input; see
        :class:`~linf_cophenetic.newick.HeightConvention`.

    Attributes
    ----------
    label_names_ : tuple of str
        Leaf names seen during ``fit``; every transformed tree must match.
    n_features_out_ : int
        ``n * (n + 1) / 2`` for ``n`` labels.
    """

    def __init__(self, heights="auto"):
        self.heights = heights

    def fit(self, X, y=None):
        trees = check_trees(X, self.heights)
        self.label_names_ = check_same_labels(trees)
        self.n_features_out_ = n_pairs(len(self.label_names_))
        return self

    def transform(self, X):
        check_is_fitted(self, "label_names_")
        trees = check_trees(X, self.heights)
        check_same_labels(trees, self.label_names_)
        out = np.empty((len(trees), self.n_features_out_), dtype=np.float64)
        for k, t in enumerate(trees):
            out[k] = cophenetic_vector(t).entries
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "label_names_")
        names = self.label_names_
        return np.asarray(
            [f"{names[i]}|{names[j]}" for i in range(len(names)) for j in range(i, len(names))],
            dtype=object,
        )

"""Interleaving distance on posets with a flow.

In a poset there is at most one morphism between two objects, so a pair of
morphisms ``x -> F_eps(y)`` and ``y -> F_eps(x)`` is automatically an
eps-interleaving: the coherence diagrams commute for free.  The engine here
therefore needs only two capabilities from an instance, ``leq`` and
``shift``, and finds the smallest interleaving eps by bisection.

Instances
---------
RnFlow
    Points of R^n ordered componentwise.  ``order="<="`` pairs with the
    upward shift ``a + eps``; ``order=">="`` with the downward shift
    ``a - eps``.  Either way the interleaving distance is the sup-norm.
PhTreeFlow
    Phylogenetic trees over a fixed label set with eps-smoothing (every height
    lowered by eps).  ``leq`` is morphism existence, decided either from
    cophenetic vectors (``oracle="vector"``) or by building the map
    explicitly (``oracle="constructive"``).
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .cophenetic import (
    CopheneticVector,
    _dumps,
    check_aligned,
    cophenetic_vector,
    hom_exists,
    tree_distance,
)
from .errors import InvalidTolerance, NegativeEpsilon
from .morphism import explicit_morphism
from .tree_core import PhyloTree

DEFAULT_TOL = 1e-9


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not math.isfinite(epsilon):
        raise NegativeEpsilon(f"epsilon must be finite, got {epsilon!r}")
    if epsilon < 0:
        raise NegativeEpsilon(f"epsilon must be >= 0, got {epsilon!r}")
    return epsilon


class PosetWithFlow(abc.ABC):
    """A poset with a strict flow.

    Subclasses implement ``leq`` (existence of the unique morphism) and
    ``shift`` (the translation ``F_eps``), with ``shift(a, 0) == a`` and
    ``shift(shift(a, e), z) == shift(a, e + z)``.
    """

    @abc.abstractmethod
    def leq(self, a: Any, b: Any) -> bool:
        ...

    @abc.abstractmethod
    def shift(self, a: Any, epsilon: float) -> Any:
        ...

    def witness(self, a: Any, b: Any) -> Optional[dict]:
        """Evidence that ``a -> b`` exists, or None.  Override for richer output."""
        return {} if self.leq(a, b) else None

    def search_ceiling(self, x: Any, y: Any) -> float:
        """An eps at which ``x`` and ``y`` are known to interleave, if any."""
        raise NotImplementedError


@dataclass(frozen=True)
class InterleavingCertificate:
    """An eps together with both morphism witnesses."""

    epsilon: float
    witness_forward: dict = field(default_factory=dict)
    witness_backward: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "epsilon": float(self.epsilon),
            "forward": {"direction": "A -> F_eps(B)", **self.witness_forward},
            "backward": {"direction": "B -> F_eps(A)", **self.witness_backward},
        }

    def to_json(self) -> str:
        return _dumps(self.to_dict())


def is_interleaved(
    p: PosetWithFlow, x: Any, y: Any, epsilon: float
) -> Optional[InterleavingCertificate]:
    """Certificate if ``x -> F_eps(y)`` and ``y -> F_eps(x)`` both exist, else None."""
    epsilon = _check_epsilon(epsilon)
    fwd = p.witness(x, p.shift(y, epsilon))
    if fwd is None:
        return None
    bwd = p.witness(y, p.shift(x, epsilon))
    if bwd is None:
        return None
    return InterleavingCertificate(epsilon, fwd, bwd)


def interleaving_distance(
    p: PosetWithFlow,
    x: Any,
    y: Any,
    tol: float = DEFAULT_TOL,
    eps_max: Optional[float] = None,
) -> float:
    """Smallest eps at which ``x`` and ``y`` interleave, to within ``tol``.

    Bisection on ``[0, eps_max]``.  Interleaving at eps implies interleaving
    at every larger eps, and the infimum is attained in both shipped
    instances, so the returned value is itself certified: ``x`` and ``y``
    interleave at the returned eps and the true distance lies within ``tol``
    below it.

    Returns
    -------
    float
        ``math.inf`` if not interleaved even at ``eps_max``.
    """
    tol = float(tol)
    if not (tol > 0 and math.isfinite(tol)):
        raise InvalidTolerance(f"tol must be a positive finite number, got {tol!r}")
    if eps_max is None:
        eps_max = p.search_ceiling(x, y)
    hi = _check_epsilon(eps_max)

    def ok(e):
        return is_interleaved(p, x, y, e) is not None

    if ok(0.0):
        return 0.0
    if not ok(hi):
        return math.inf
    lo = 0.0
    while hi - lo > tol:
        mid = lo + (hi - lo) / 2
        if mid <= lo or mid >= hi:
            break
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def interleave(
    p: PosetWithFlow, x: Any, y: Any, tol: float = DEFAULT_TOL, eps_max=None
) -> Optional[InterleavingCertificate]:
    """Certificate at the eps found by :func:`interleaving_distance`."""
    eps = interleaving_distance(p, x, y, tol=tol, eps_max=eps_max)
    if math.isinf(eps):
        return None
    return is_interleaved(p, x, y, eps)


# ---------------------------------------------------------------------------
# R^n
# ---------------------------------------------------------------------------


class RnFlow(PosetWithFlow):
    """R^n under the componentwise order with the matching shift.

    Parameters
    ----------
    order : {"<=", ">="}
        ``"<="`` shifts points up by eps, ``">="`` shifts them down.
    """

    def __init__(self, order: str = "<="):
        if order not in ("<=", ">="):
            raise ValueError(f"order must be '<=' or '>=', got {order!r}")
        self.order = order

    def _coords(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 1 or not np.all(np.isfinite(a)):
            raise ValueError("points must be finite 1-d coordinate arrays")
        return a

    def leq(self, a, b) -> bool:
        a, b = self._coords(a), self._coords(b)
        if a.shape != b.shape:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
        if self.order == "<=":
            return bool(np.all(a <= b))
        return bool(np.all(a >= b))

    def shift(self, a, epsilon):
        epsilon = _check_epsilon(epsilon)
        a = self._coords(a)
        return a + epsilon if self.order == "<=" else a - epsilon

    def witness(self, a, b):
        if not self.leq(a, b):
            return None
        a, b = self._coords(a), self._coords(b)
        slack = b - a if self.order == "<=" else a - b
        return {"slack": [float(s) for s in slack]}

    def search_ceiling(self, x, y) -> float:
        # coordinate range of both points; no norm of x - y is consulted
        both = np.concatenate([self._coords(x), self._coords(y)])
        if both.size == 0:
            return 0.0
        return float(both.max() - both.min()) + 1.0


# ---------------------------------------------------------------------------
# Phylogenetic trees
# ---------------------------------------------------------------------------


def smooth(t: PhyloTree, epsilon: float) -> PhyloTree:
    """Lower every height of ``t`` by ``epsilon``; shape and labels unchanged."""
    epsilon = _check_epsilon(epsilon)
    if epsilon == 0:
        return t
    return t.with_heights(t.heights - epsilon)


class PhTreeFlow(PosetWithFlow):
    """Labeled trees over one label set, ordered by morphism existence.

    Parameters
    ----------
    oracle : {"vector", "constructive"}
        ``"vector"`` compares cophenetic vectors entrywise.
        ``"constructive"`` builds the vertex map of the morphism explicitly
        (see :mod:`linf_cophenetic.morphism`); slow, meant for small trees.
    """

    def __init__(self, oracle: str = "vector"):
        if oracle not in ("vector", "constructive"):
            raise ValueError(f"unknown oracle {oracle!r}")
        self.oracle = oracle

    def leq(self, a: PhyloTree, b: PhyloTree) -> bool:
        return self.witness(a, b) is not None

    def shift(self, a: PhyloTree, epsilon: float) -> PhyloTree:
        return smooth(a, epsilon)

    def witness(self, a: PhyloTree, b: PhyloTree):
        if self.oracle == "constructive":
            phi = explicit_morphism(a, b)
            if phi is None:
                return None
            return {
                "kind": "vertex-map",
                "map": [
                    {"node": v, "image_node": q.node, "height": q.height}
                    for v, q in sorted(phi.items())
                ],
            }
        ca, cb = cophenetic_vector(a), cophenetic_vector(b)
        if not hom_exists(ca, cb):
            return None
        slack = CopheneticVector(ca.entries - cb.entries, ca.label_names)
        return {
            "kind": "cophenetic-slack",
            "labels": list(ca.label_names),
            "min_slack": float(slack.entries.min()),
            "rows": [[float(s) for s in row] for row in slack.rows()],
        }

    def search_ceiling(self, x: PhyloTree, y: PhyloTree) -> float:
        # at eps = (height range of both trees) every entry of one vector
        # dominates the shifted other; derived from heights alone
        check_aligned(x.label_names, y.label_names)
        hi = max(x.heights.max(), y.heights.max())
        lo = min(x.heights.min(), y.heights.min())
        return float(hi - lo) + 1.0


def phtree_distance_closed_form(a: PhyloTree, b: PhyloTree) -> float:
    """Interleaving distance of two labeled trees as the sup-norm of cophenetic vectors."""
    return tree_distance(a, b, p=math.inf)

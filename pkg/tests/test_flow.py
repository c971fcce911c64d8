import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import tree_pairs, trees
from linf_cophenetic.cophenetic import cophenetic_vector, linf_distance
from linf_cophenetic.errors import InvalidTolerance, LabelSetMismatch, NegativeEpsilon
from linf_cophenetic.flow import (
    PhTreeFlow,
    RnFlow,
    interleave,
    interleaving_distance,
    is_interleaved,
    phtree_distance_closed_form,
    smooth,
)
from linf_cophenetic.random_trees import random_phylo_tree

finite = st.floats(-1e3, 1e3, allow_nan=False)


def points(n):
    return st.lists(finite, min_size=n, max_size=n).map(np.array)


class TestSmooth:
    def test_unit(self, fig2_left):
        assert smooth(fig2_left, 0) == fig2_left

    @given(trees(1, 10, dyadic_bits=8), st.integers(0, 1 << 12), st.integers(0, 1 << 12))
    def test_composition(self, t, e, z):
        e, z = e / 256, z / 256
        assert smooth(smooth(t, e), z) == smooth(t, e + z)

    @given(trees(1, 10, dyadic_bits=8), st.integers(0, 1 << 14))
    def test_equivariance(self, t, e):
        e = e / 256
        assert cophenetic_vector(smooth(t, e)) == cophenetic_vector(t).shift(e)
        rn = RnFlow(">=")
        assert np.array_equal(
            cophenetic_vector(smooth(t, e)).entries, rn.shift(cophenetic_vector(t).entries, e)
        )

    def test_shape_and_labels_kept(self, fig2_left):
        s = smooth(fig2_left, 3)
        assert s.label_names == fig2_left.label_names
        assert np.array_equal(s.tree.parent, fig2_left.tree.parent)
        assert np.array_equal(s.heights, fig2_left.heights - 3)

    @pytest.mark.parametrize("eps", [-1.0, math.inf, math.nan])
    def test_bad_epsilon(self, fig2_left, eps):
        with pytest.raises(NegativeEpsilon):
            smooth(fig2_left, eps)


class TestRn:
    def test_identity(self):
        p = RnFlow()
        x = np.array([1.0, 2.0])
        assert is_interleaved(p, x, x, 0) is not None

    def test_plane_example(self):
        p = RnFlow()
        x, y = np.array([0.0, 0.0]), np.array([3.0, 1.0])
        assert is_interleaved(p, x, y, 2) is None
        cert = is_interleaved(p, x, y, 3)
        assert cert is not None and cert.epsilon == 3
        assert min(cert.witness_backward["slack"]) == 0

    @pytest.mark.parametrize("order", ["<=", ">="])
    @given(data=st.data())
    def test_distance_is_sup_norm(self, order, data):
        n = data.draw(st.integers(1, 10))
        a, b = data.draw(points(n)), data.draw(points(n))
        d = interleaving_distance(RnFlow(order), a, b, tol=1e-9)
        assert abs(d - float(np.max(np.abs(a - b)))) <= 1e-9

    def test_flow_laws(self):
        for order in ("<=", ">="):
            p = RnFlow(order)
            a = np.array([0.5, -2.25])
            assert np.array_equal(p.shift(a, 0), a)
            assert np.array_equal(p.shift(p.shift(a, 0.5), 0.25), p.shift(a, 0.75))
            assert p.leq(a, p.shift(a, 1.0))

    @given(points(3), points(3), st.floats(0, 100), st.floats(0, 100))
    def test_monotone_in_epsilon(self, a, b, e1, e2):
        lo, hi = sorted((e1, e2))
        p = RnFlow()
        if is_interleaved(p, a, b, lo) is not None:
            assert is_interleaved(p, a, b, hi) is not None

    def test_bad_order(self):
        with pytest.raises(ValueError):
            RnFlow("<")


class TestPhTree:
    def test_fig2(self, fig2_left, fig2_right):
        for oracle in ("vector", "constructive"):
            p = PhTreeFlow(oracle)
            assert is_interleaved(p, fig2_left, fig2_right, 2) is not None
            assert is_interleaved(p, fig2_left, fig2_right, 1.99) is None
            d = interleaving_distance(p, fig2_left, fig2_right)
            assert 2 <= d <= 2 + 1e-9
        assert phtree_distance_closed_form(fig2_left, fig2_right) == 2

    def test_identical(self, fig2_left):
        assert interleaving_distance(PhTreeFlow(), fig2_left, fig2_left) == 0

    def test_closed_form_against_smoothing(self, fig2_left):
        assert phtree_distance_closed_form(fig2_left, smooth(fig2_left, 0.75)) == 0.75

    @pytest.mark.parametrize("seed", range(20))
    def test_random_eight_leaf_pairs(self, seed):
        a, b = random_phylo_tree(8, 3 * seed), random_phylo_tree(8, 3 * seed + 1)
        d = interleaving_distance(PhTreeFlow(), a, b, tol=1e-9)
        assert abs(d - phtree_distance_closed_form(a, b)) <= 1e-6

    @given(tree_pairs(1, 6, count=2), st.floats(0, 120), st.floats(0, 120))
    def test_monotone_in_epsilon(self, ab, e1, e2):
        lo, hi = sorted((e1, e2))
        p = PhTreeFlow("constructive")
        if is_interleaved(p, *ab, lo) is not None:
            assert is_interleaved(p, *ab, hi) is not None

    @given(tree_pairs(1, 6, count=3))
    def test_triangle_inequality(self, abc):
        p = PhTreeFlow()
        a, b, c = abc
        tol = 1e-9
        ab = interleaving_distance(p, a, b, tol)
        bc = interleaving_distance(p, b, c, tol)
        ac = interleaving_distance(p, a, c, tol)
        assert ac <= ab + bc + 2 * tol
        assert abs(ab - interleaving_distance(p, b, a, tol)) <= tol

    @given(tree_pairs(1, 8, dyadic_bits=8), st.integers(0, 1 << 12), st.integers(0, 1 << 12))
    def test_lipschitz_under_smoothing(self, ab, e, z):
        a, b = ab
        e, z = e / 256, z / 256
        d = phtree_distance_closed_form(a, b)
        assert phtree_distance_closed_form(smooth(a, e), smooth(b, e)) == d
        assert abs(phtree_distance_closed_form(smooth(a, e), b) - d) <= e
        assert phtree_distance_closed_form(smooth(a, e), smooth(a, z)) == abs(e - z)

    def test_label_mismatch(self, fig2_left):
        other = random_phylo_tree(4, 0)
        with pytest.raises(LabelSetMismatch):
            phtree_distance_closed_form(fig2_left, other)
        with pytest.raises(LabelSetMismatch):
            interleaving_distance(PhTreeFlow(), fig2_left, other)

    def test_invalid_tolerance(self, fig2_left):
        for tol in (0, -1, math.nan):
            with pytest.raises(InvalidTolerance):
                interleaving_distance(PhTreeFlow(), fig2_left, fig2_left, tol=tol)

    def test_ceiling_too_low_gives_inf(self, fig2_left, fig2_right):
        assert interleaving_distance(PhTreeFlow(), fig2_left, fig2_right, eps_max=1.0) == math.inf
        assert interleave(PhTreeFlow(), fig2_left, fig2_right, eps_max=1.0) is None

    def test_certificate_json(self, fig2_left, fig2_right):
        cert = interleave(PhTreeFlow(), fig2_left, fig2_right)
        d = json.loads(cert.to_json())
        assert abs(d["epsilon"] - 2) <= 1e-9
        for side in ("forward", "backward"):
            w = d[side]
            assert w["kind"] == "cophenetic-slack"
            assert w["labels"] == ["1", "2", "3", "4"]
            assert min(min(r) for r in w["rows"]) >= 0
            assert w["min_slack"] == min(min(r) for r in w["rows"])

    def test_constructive_certificate(self, fig2_left, fig2_right):
        cert = is_interleaved(PhTreeFlow("constructive"), fig2_left, fig2_right, 2)
        assert cert.witness_forward["kind"] == "vertex-map"
        heights = {e["node"]: e["height"] for e in cert.witness_forward["map"]}
        assert heights == {v: float(h) for v, h in enumerate(fig2_left.heights)}

    def test_unknown_oracle(self):
        with pytest.raises(ValueError):
            PhTreeFlow("magic")

"""Tests for tree_geometry module."""

import pytest
from hypothesis import given, settings, strategies as st

from autfa.bstree import TreeVertex, build_ball
from autfa.errors import NotCommuting, NotDisjoint, ValidationError
from autfa.gog import free_product_as_gog
from autfa.tree_geometry import (
    FiniteTree,
    Outcome,
    Subtree,
    bridge,
    check_bridge_lemma,
    check_commuting_elliptics,
    check_helly,
    check_nested_intersection,
    intersect,
    nearest_point,
    random_subtree,
    run_lemma_suite,
)
from autfa.utils import make_rng
from autfa.words import FreeProductSignature


def _sub(tree: FiniteTree, *vertices: int) -> Subtree:
    return Subtree(tree, frozenset(vertices))


class TestFiniteTree:
    """Tests for FiniteTree and Subtree."""

    def test_cycle_is_not_a_tree(self):
        """Test graphs with cycles are rejected."""
        with pytest.raises(ValidationError, match="not a nonempty tree"):
            FiniteTree.from_edges([(0, 1), (1, 2), (2, 0)])

    def test_star_shape(self):
        """Test star construction and distances."""
        tree = FiniteTree.star(3, arm_length=2)
        assert len(tree) == 7
        assert tree.distance(2, 4) == 4

    def test_subtree_must_be_connected(self):
        """Test disconnected vertex sets are rejected."""
        tree = FiniteTree.path(3)
        with pytest.raises(ValidationError, match="connected"):
            _sub(tree, 0, 2)

    def test_subtree_must_be_nonempty_and_contained(self):
        """Test empty sets and foreign vertices are rejected."""
        tree = FiniteTree.path(3)
        with pytest.raises(ValidationError, match="nonempty"):
            _sub(tree)
        with pytest.raises(ValidationError, match="not in the tree"):
            _sub(tree, 7)

    def test_nearest_point_and_bridge(self):
        """Test projections and bridges on a path."""
        tree = FiniteTree.path(5)
        x, y = _sub(tree, 0, 1), _sub(tree, 3, 4)
        assert nearest_point(y, 0) == 3
        assert bridge(x, y) == [1, 2, 3]
        assert intersect(x, y) is None

    def test_bridge_needs_disjoint_subtrees(self):
        """Test overlapping subtrees have no bridge."""
        tree = FiniteTree.path(5)
        with pytest.raises(NotDisjoint):
            bridge(_sub(tree, 0, 1, 2), _sub(tree, 2, 3))

    def test_subtrees_of_different_trees(self):
        """Test subtrees must share their tree."""
        with pytest.raises(ValidationError, match="different trees"):
            intersect(_sub(FiniteTree.path(2), 0), _sub(FiniteTree.path(2), 0))


class TestLemmas:
    """Tests for the individual lemma checks."""

    def test_helly_holds_on_star(self):
        """Test arms through the centre share it."""
        tree = FiniteTree.star(3, arm_length=2)
        family = [_sub(tree, 0, 1, 2), _sub(tree, 0, 3, 4), _sub(tree, 0, 5)]
        check = check_helly(family)
        assert check.outcome is Outcome.HOLDS
        assert check.witness == 0

    def test_helly_vacuous_for_disjoint_pair(self):
        """Test a disjoint pair leaves the hypothesis unmet."""
        tree = FiniteTree.path(4)
        check = check_helly([_sub(tree, 0), _sub(tree, 3)])
        assert check.outcome is Outcome.VACUOUS
        assert check.holds

    def test_helly_needs_two_subtrees(self):
        """Test a single subtree is refused."""
        with pytest.raises(ValidationError, match="at least two"):
            check_helly([_sub(FiniteTree.path(2), 0)])

    def test_nested_intersection(self):
        """Test the nearest point of y to a common vertex lies in every member."""
        tree = FiniteTree.path(5)
        family = [_sub(tree, 0, 1, 2), _sub(tree, 1, 2, 3)]
        check = check_nested_intersection(family, _sub(tree, 2, 3, 4))
        assert check.outcome is Outcome.HOLDS
        assert check.witness == 2

    def test_bridge_lemma(self):
        """Test the bridge between disjoint S's lies in the T's."""
        tree = FiniteTree.path(5)
        whole = _sub(tree, 0, 1, 2, 3, 4)
        check = check_bridge_lemma(_sub(tree, 0), _sub(tree, 4), whole, whole)
        assert check.outcome is Outcome.HOLDS
        assert check.witness == (0, 1, 2, 3, 4)

    def test_commuting_elliptics(self, c2, c3):
        """Test commuting subgroups with fixed points share one."""
        sig = FreeProductSignature.of(c2, c3)
        r = free_product_as_gog(sig)
        ball = build_ball(TreeVertex.root(r.graph, r.base), 2)
        h = r.factor_loop(0, 1)
        check = check_commuting_elliptics(ball, [h], [h])
        assert check.outcome is Outcome.HOLDS
        with pytest.raises(NotCommuting):
            check_commuting_elliptics(ball, [h], [r.factor_loop(1, 1)])


class TestLemmaSuite:
    """Tests for the randomized lemma suite."""

    def test_suite_passes(self):
        """Test no lemma instance is violated."""
        report = run_lemma_suite(trials=30, seed=1, max_vertices=25)
        assert report.passed
        assert report.instances > 0
        assert report.suite == "lemmas"

    def test_suite_is_deterministic(self):
        """Test equal seeds give equal reports."""
        first = run_lemma_suite(trials=10, seed=7).to_dict()
        assert first == run_lemma_suite(trials=10, seed=7).to_dict()

    def test_trials_must_be_positive(self):
        """Test zero trials are refused."""
        with pytest.raises(ValidationError, match="trials must be positive"):
            run_lemma_suite(trials=0)

    @pytest.mark.slow
    def test_every_family_gets_full_conditioned_trials(self):
        """Test each lemma family records a thousand instances whose hypotheses hold."""
        report = run_lemma_suite(trials=1000, seed=0, max_vertices=40)
        assert report.passed
        conditioned = report.details["conditioned"]
        for family in ("helly", "nested", "bridge", "commuting"):
            assert conditioned[family] >= 1000
        assert report.details["vacuous"] == {}


@settings(max_examples=30, derandomize=True)
@given(n=st.integers(min_value=1, max_value=30), seed=st.integers(min_value=0, max_value=1000))
def test_random_trees_and_subtrees(n, seed):
    """Random trees have n vertices and random subtrees are connected."""
    rng = make_rng(seed)
    tree = FiniteTree.random(n, rng)
    assert len(tree) == n
    sub = random_subtree(tree, rng)
    assert 1 <= len(sub) <= n

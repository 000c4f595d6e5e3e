"""Tests for bstree module."""

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from autfa.bstree import (
    TreeVertex,
    act,
    build_ball,
    displacement,
    distance,
    fixed_set,
    fixed_set_subgroup,
    geodesic,
    iter_layers,
    neighbors,
    translation_length_adaptive,
    translation_length_oracle,
)
from autfa.errors import BaseMismatch, ValidationError
from autfa.gog import Loop, Shape, free_product_as_gog, translation_length
from autfa.groups import cyclic_group
from autfa.sampling import random_word
from autfa.utils import make_rng
from autfa.words import FreeProductSignature, conjugate, parse_word

C2_C3 = FreeProductSignature.of(cyclic_group(2), cyclic_group(3))
C2_C2_C3 = FreeProductSignature.of(cyclic_group(2), cyclic_group(2), cyclic_group(3))


def _root(shape: Shape = Shape.SINGLE_EDGE):
    r = free_product_as_gog(C2_C3, shape)
    return r, TreeVertex.root(r.graph, r.base)


class TestTreeVertex:
    """Tests for tree vertices and their neighbours."""

    def test_root_equality(self):
        """Test equal cosets compare and hash equal."""
        r, root = _root()
        again = TreeVertex.root(r.graph, r.base)
        assert root == again
        assert hash(root) == hash(again)

    def test_neighbour_counts(self):
        """Test vertex degrees are the factor orders."""
        _, root = _root()
        first = neighbors(root)
        assert len(first) == 2
        assert all(len(neighbors(v)) == 3 for v in first)
        assert all(distance(root, v) == 1 for v in first)

    def test_path_must_end_at_base(self):
        """Test vertices are cosets of paths ending at the base."""
        r, _ = _root()
        with pytest.raises(BaseMismatch):
            TreeVertex(r.graph, 0, r.tree_paths[1])


class TestBall:
    """Tests for balls in the tree."""

    def test_ball_sizes(self):
        """Test the ball of radius 2 around a C2 vertex has 1 + 2 + 4 vertices."""
        _, root = _root()
        assert len(build_ball(root, 1)) == 3
        ball = build_ball(root, 2)
        assert len(ball) == 7
        assert ball.edge_count == 6
        assert nx.is_tree(ball.to_networkx())
        assert max(ball.depths) == 2

    def test_layers_match_ball(self):
        """Test spheres from iter_layers partition the ball."""
        _, root = _root()
        layers = iter_layers(root)
        sizes = [len(next(layers)) for _ in range(5)]
        assert sizes == [1, 2, 4, 4, 8]

    def test_negative_radius(self):
        """Test radius must be non-negative."""
        _, root = _root()
        with pytest.raises(ValidationError, match="non-negative"):
            build_ball(root, -1)

    def test_to_dot(self):
        """Test DOT output lists every vertex and edge."""
        _, root = _root()
        ball = build_ball(root, 2)
        dot = ball.to_dot()
        assert dot.startswith("graph ball {")
        assert dot.count(" -- ") == ball.edge_count
        assert dot.count("[label=") == len(ball)


class TestAction:
    """Tests for the right action of loops."""

    def test_factor_fixes_its_vertex(self):
        """Test an element of the base factor fixes only the root in a ball."""
        r, root = _root()
        loop = r.factor_loop(0, 1)
        assert act(root, loop) == root
        assert fixed_set(loop, build_ball(root, 2)) == {root}

    def test_fixed_set_of_subgroup(self):
        """Test two factors fix no common vertex and no generators fix everything."""
        r, root = _root()
        ball = build_ball(root, 2)
        assert fixed_set_subgroup([r.factor_loop(0, 1)], ball) == {root}
        assert fixed_set_subgroup([r.factor_loop(0, 1), r.factor_loop(1, 1)], ball) == set()
        assert fixed_set_subgroup([], ball) == set(ball.vertices)

    def test_other_factor_moves_root(self):
        """Test an element of the other factor moves the root by two."""
        r, root = _root()
        assert displacement(root, r.factor_loop(1, 1)) == 2

    def test_geodesic(self):
        """Test geodesics run between their endpoints."""
        r, root = _root()
        target = act(root, r.embed(parse_word("f1.1 f0.1 f1.1", C2_C3)))
        path = geodesic(root, target)
        assert path[0] == root
        assert path[-1] == target
        assert len(path) == distance(root, target) + 1
        assert all(distance(a, b) == 1 for a, b in zip(path, path[1:]))

    def test_loop_at_other_vertex_rejected(self):
        """Test only loops at the base act."""
        r, root = _root()
        with pytest.raises(BaseMismatch):
            act(root, Loop(r.graph, 1, (), (1,)))

    @pytest.mark.parametrize("shape, expected", [(Shape.SINGLE_EDGE, 2), (Shape.STAR, 4)])
    def test_oracles_agree(self, shape, expected):
        """Test ball minimum and adaptive search give the translation length."""
        r, _ = _root(shape)
        loop = r.embed(parse_word("f0.1 f1.1", C2_C3))
        assert translation_length_oracle(loop, 3) == expected
        assert translation_length_adaptive(loop) == expected

    def test_adaptive_needs_room(self):
        """Test a radius cap below the minimal set raises."""
        r, _ = _root()
        g = parse_word("f1.1 f0.1 f1.1 f0.1", C2_C3)
        w = conjugate(parse_word("f0.1 f1.1", C2_C3), g)
        with pytest.raises(ValidationError, match="did not settle"):
            translation_length_adaptive(r.embed(w), max_radius=1)


@settings(max_examples=20, derandomize=True)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_adaptive_oracle_matches_path_length(seed):
    """Growing spheres finds the same translation length as cyclic reduction."""
    r = free_product_as_gog(C2_C3)
    loop = r.embed(random_word(C2_C3, 6, make_rng(seed)))
    assert translation_length_adaptive(loop) == translation_length(loop)


@pytest.mark.slow
@pytest.mark.parametrize(
    "sig, shape, cyclic",
    [
        (C2_C3, Shape.SINGLE_EDGE, False),
        (C2_C2_C3, Shape.STAR, False),
        (FreeProductSignature.of(cyclic_group(2), "Z"), Shape.LOOP_FOR_Z, True),
    ],
)
def test_adaptive_oracle_on_two_hundred_words(sig, shape, cyclic):
    """Symbolic, path and adaptive ball lengths agree on 200 words of up to 10 syllables."""
    r = free_product_as_gog(sig, shape)
    rng = make_rng(0)
    for _ in range(200):
        w = random_word(sig, 10, rng, cyclic=cyclic)
        loop = r.embed(w)
        symbolic = r.expected_translation_length(w)
        assert translation_length(loop) == symbolic, w
        assert translation_length_adaptive(loop) == symbolic, w

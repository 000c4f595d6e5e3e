"""Finite trees, subtrees and randomized checks of the fixed-point lemmas for tree actions."""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from autfa.bstree import Ball, TreeVertex, build_ball, fixed_set_subgroup
from autfa.config import DEFAULT_SEED, DEFAULT_TRIALS
from autfa.errors import NotCommuting, NotDisjoint, ValidationError
from autfa.gog import GroupoidPath, Loop, free_product_as_gog, reduce_path
from autfa.groups import cyclic_group, direct_product
from autfa.reports import SuiteReport
from autfa.utils import make_rng
from autfa.words import FreeProductSignature, Word, invert

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteTree:
    """
    A finite simplicial tree.

    Attributes
    ----------
    graph : nx.Graph
        Underlying graph; must be a tree.
    """

    graph: nx.Graph = field(repr=False)

    def __post_init__(self) -> None:
        """Check the graph is a nonempty tree."""
        if self.graph.number_of_nodes() == 0 or not nx.is_tree(self.graph):
            raise ValidationError("graph is not a nonempty tree")

    @classmethod
    def from_edges(
        cls, edges: Iterable[Tuple[Hashable, Hashable]], vertices: Iterable[Hashable] = ()
    ) -> "FiniteTree":
        graph = nx.Graph()
        graph.add_nodes_from(vertices)
        graph.add_edges_from(edges)
        return cls(graph)

    @classmethod
    def path(cls, n: int, first: int = 0) -> "FiniteTree":
        """Path on ``first, …, first + n - 1``."""
        return cls(nx.path_graph(range(first, first + n)))

    @classmethod
    def star(cls, arms: int, arm_length: int = 1) -> "FiniteTree":
        """Centre 0 with ``arms`` paths of ``arm_length`` edges."""
        graph = nx.Graph()
        graph.add_node(0)
        label = 1
        for _ in range(arms):
            previous = 0
            for _ in range(arm_length):
                graph.add_edge(previous, label)
                previous = label
                label += 1
        return cls(graph)

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "FiniteTree":
        """Uniform random labelled tree on ``0..n-1`` from a Prüfer sequence."""
        if n < 1:
            raise ValidationError("a tree needs at least one vertex")
        if n <= 2:
            return cls.path(n)
        sequence = [rng.randrange(n) for _ in range(n - 2)]
        return cls(nx.from_prufer_sequence(sequence))

    @property
    def vertices(self) -> List[Hashable]:
        return list(self.graph.nodes)

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    def distance(self, u: Hashable, v: Hashable) -> int:
        return int(nx.shortest_path_length(self.graph, u, v))


@dataclass(frozen=True)
class Subtree:
    """
    A nonempty connected vertex subset of a tree.

    Attributes
    ----------
    tree : FiniteTree
        Ambient tree.
    vertices : FrozenSet
        The vertex set.
    """

    tree: FiniteTree = field(repr=False, compare=False)
    vertices: FrozenSet[Hashable]

    def __post_init__(self) -> None:
        """Check nonempty, contained and connected."""
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        if not self.vertices:
            raise ValidationError("a subtree must be nonempty")
        missing = [v for v in self.vertices if v not in self.tree.graph]
        if missing:
            raise ValidationError(f"vertices {sorted(map(str, missing))} are not in the tree")
        if not nx.is_connected(self.tree.graph.subgraph(self.vertices)):
            raise ValidationError("subtree vertices do not induce a connected subgraph")

    def __contains__(self, v: object) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)


def _same_tree(x: Subtree, y: Subtree) -> None:
    if x.tree is not y.tree:
        raise ValidationError("subtrees of different trees")


def nearest_point(y: Subtree, v: Hashable) -> Hashable:
    """The unique vertex of ``y`` closest to ``v``."""
    lengths = nx.single_source_shortest_path_length(y.tree.graph, v)
    return min(y.vertices, key=lambda u: (lengths[u], str(u)))


def intersect(x: Subtree, y: Subtree) -> Optional[Subtree]:
    """Common part of two subtrees, or None when they are disjoint."""
    _same_tree(x, y)
    common = x.vertices & y.vertices
    return Subtree(x.tree, common) if common else None


def bridge(x: Subtree, y: Subtree) -> List[Hashable]:
    """
    The shortest path joining two disjoint subtrees, from ``x`` to ``y``.

    Raises
    ------
    NotDisjoint
        If the subtrees intersect.
    """
    _same_tree(x, y)
    if x.vertices & y.vertices:
        raise NotDisjoint("bridge needs disjoint subtrees")
    lengths = nx.multi_source_dijkstra_path_length(x.tree.graph, set(x.vertices))
    end = min(y.vertices, key=lambda u: (lengths[u], str(u)))
    start = nearest_point(x, end)
    return list(nx.shortest_path(x.tree.graph, start, end))


class Outcome(str, Enum):
    """Result of one lemma instance."""

    HOLDS = "holds"
    VIOLATED = "violated"
    VACUOUS = "vacuous"


@dataclass(frozen=True)
class LemmaCheck:
    """
    Outcome of one lemma instance.

    Attributes
    ----------
    outcome : Outcome
        Whether the conclusion held, failed, or the hypotheses were not met.
    witness : Any
        Common vertex, offending pair or bridge, depending on the lemma.
    detail : str
        Short explanation.
    """

    outcome: Outcome
    witness: Any = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.outcome is not Outcome.VIOLATED


def check_helly(family: Sequence[Subtree]) -> LemmaCheck:
    """Pairwise-meeting subtrees have a common vertex."""
    if len(family) < 2:
        raise ValidationError("the Helly check needs at least two subtrees")
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            _same_tree(family[i], family[j])
            if not family[i].vertices & family[j].vertices:
                return LemmaCheck(Outcome.VACUOUS, (i, j), f"subtrees {i} and {j} are disjoint")
    common = frozenset.intersection(*(x.vertices for x in family))
    if not common:
        return LemmaCheck(Outcome.VIOLATED, None, "pairwise meeting family with empty intersection")
    return LemmaCheck(Outcome.HOLDS, min(common, key=str))


def check_nested_intersection(family: Sequence[Subtree], y: Subtree) -> LemmaCheck:
    """
    Subtrees with a common vertex that each meet ``y`` have a common vertex in ``y``.

    The nearest point of ``y`` to a common vertex must lie in every member.
    """
    if not family:
        raise ValidationError("the intersection check needs a nonempty family")
    common = frozenset.intersection(*(x.vertices for x in family))
    if not common:
        return LemmaCheck(Outcome.VACUOUS, None, "family has no common vertex")
    for i, x in enumerate(family):
        _same_tree(x, y)
        if not x.vertices & y.vertices:
            return LemmaCheck(Outcome.VACUOUS, i, f"member {i} misses y")
    anchor = min(common, key=str)
    point = nearest_point(y, anchor)
    if all(point in x for x in family):
        return LemmaCheck(Outcome.HOLDS, point)
    return LemmaCheck(Outcome.VIOLATED, point, "nearest point of y is outside some member")


def check_bridge_lemma(s1: Subtree, s2: Subtree, t1: Subtree, t2: Subtree) -> LemmaCheck:
    """
    If every S_i meets every T_j, then S₁∩S₂ or T₁∩T₂ is nonempty.

    When S₁ and S₂ are disjoint the bridge between them must lie in T₁∩T₂.
    """
    for s in (s1, s2):
        for t in (t1, t2):
            _same_tree(s, t)
            if not s.vertices & t.vertices:
                return LemmaCheck(Outcome.VACUOUS, None, "an S and a T are disjoint")
    if s1.vertices & s2.vertices:
        return LemmaCheck(Outcome.HOLDS, min(s1.vertices & s2.vertices, key=str))
    path = bridge(s1, s2)
    shared = t1.vertices & t2.vertices
    if all(v in shared for v in path):
        return LemmaCheck(Outcome.HOLDS, tuple(path))
    return LemmaCheck(Outcome.VIOLATED, tuple(path), "bridge between S1 and S2 leaves T1∩T2")


def loops_commute(g: GroupoidPath, h: GroupoidPath) -> bool:
    commutator = reduce_path(g * h * g.inverse() * h.inverse())
    return commutator.length == 0 and commutator.elements[0] == 0


def check_commuting_elliptics(
    ball: Ball, h_gens: Sequence[GroupoidPath], k_gens: Sequence[GroupoidPath]
) -> LemmaCheck:
    """
    Commuting subgroups with fixed points in the ball share a fixed point.

    Raises
    ------
    NotCommuting
        If some generator of H does not commute with some generator of K.
    """
    for i, h in enumerate(h_gens):
        for j, k in enumerate(k_gens):
            if not loops_commute(h, k):
                raise NotCommuting(f"generator {i} of H does not commute with generator {j} of K")
    fixed_h = fixed_set_subgroup(h_gens, ball)
    fixed_k = fixed_set_subgroup(k_gens, ball)
    if not fixed_h or not fixed_k:
        return LemmaCheck(Outcome.VACUOUS, None, "a subgroup has no fixed vertex in the ball")
    common = fixed_h & fixed_k
    if not common:
        return LemmaCheck(Outcome.VIOLATED, None, "no common fixed vertex")
    return LemmaCheck(Outcome.HOLDS, min(common, key=lambda v: ball.index[v]))


def random_subtree(
    tree: FiniteTree, rng: random.Random, stop: float = 0.1, root: Optional[Hashable] = None
) -> Subtree:
    """Grow a connected set from ``root``, stopping after each step with probability ``stop``."""
    if root is None:
        root = rng.choice(sorted(tree.graph.nodes, key=str))
    chosen = {root}
    while rng.random() > stop:
        frontier = sorted({w for v in chosen for w in tree.graph[v]} - chosen, key=str)
        if not frontier:
            break
        chosen.add(rng.choice(frontier))
    return Subtree(tree, frozenset(chosen))


def sample_family(
    tree: FiniteTree,
    size: int,
    rng: random.Random,
    condition: Any,
    attempts: int = 200,
    stop: float = 0.1,
) -> Optional[List[Subtree]]:
    """Rejection-sample ``size`` random subtrees until ``condition(family)`` holds."""
    for _ in range(attempts):
        family = [random_subtree(tree, rng, stop) for _ in range(size)]
        if condition(family):
            return family
    return None


def _pairwise_meet(family: Sequence[Subtree]) -> bool:
    return all(
        family[i].vertices & family[j].vertices
        for i in range(len(family))
        for j in range(i + 1, len(family))
    )


def _crosswise_meet(family: Sequence[Subtree]) -> bool:
    return all(family[i].vertices & family[j].vertices for i in (0, 1) for j in (2, 3))


def _record(report: SuiteReport, family: str, key: str, check: LemmaCheck) -> None:
    if check.outcome is Outcome.VACUOUS:
        vacuous = report.details.setdefault("vacuous", {})
        vacuous[family] = vacuous.get(family, 0) + 1
        return
    conditioned = report.details.setdefault("conditioned", {})
    conditioned[family] = conditioned.get(family, 0) + 1
    report.record(family, key, check.holds, check.detail)


def _nested_instance(
    tree: FiniteTree, rng: random.Random, attempts: int = 200
) -> Optional[Tuple[List[Subtree], Subtree]]:
    """A family through a common vertex and a subtree ``y`` meeting every member."""
    size = rng.randint(1, 8)
    base = rng.choice(sorted(tree.graph.nodes, key=str))
    for _ in range(attempts):
        nested = [random_subtree(tree, rng, 0.05, root=base) for _ in range(size)]
        y = random_subtree(tree, rng, 0.05)
        if all(x.vertices & y.vertices for x in nested):
            return nested, y
    return None


def _draw(rng: random.Random, max_vertices: int, sample: Callable[[FiniteTree], Any]) -> Any:
    """Draw random trees until ``sample`` returns an instance."""
    while True:
        instance = sample(FiniteTree.random(rng.randint(2, max_vertices), rng))
        if instance is not None:
            return instance


def _commuting_instances(
    trials: int, rng: random.Random
) -> List[Tuple[Ball, List[Loop], List[Loop]]]:
    klein = direct_product(cyclic_group(2), cyclic_group(2), name="C2xC2")
    sig = FreeProductSignature.of(klein, cyclic_group(3))
    realisation = free_product_as_gog(sig)
    ball = build_ball(TreeVertex.root(realisation.graph, realisation.base), 3)
    instances = []
    for _ in range(trials):
        syllables = [(1, rng.randrange(1, 3)), (0, rng.randrange(1, 4))][: rng.randrange(3)]
        w = Word(sig, tuple(syllables))
        a, b = rng.randrange(1, 4), rng.randrange(1, 4)
        h = realisation.embed(invert(w) * Word.letter(sig, 0, a) * w)
        k = realisation.embed(invert(w) * Word.letter(sig, 0, b) * w)
        instances.append((ball, [h], [k]))
    return instances


def run_lemma_suite(
    trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, max_vertices: int = 40
) -> SuiteReport:
    """
    Randomized checks of the subtree and fixed-point lemmas.

    Families: ``helly``, ``nested``, ``bridge``, ``projection`` (bridge
    endpoints are nearest points) and ``commuting``. The subtree families
    are resampled until their hypotheses hold, so each records ``trials``
    instances under ``details["conditioned"]``; vacuous instances are
    counted under ``details["vacuous"]``.

    Parameters
    ----------
    trials : int, default=DEFAULT_TRIALS
        Instances per family.
    seed : int, default=DEFAULT_SEED
        Random seed.
    max_vertices : int, default=40
        Largest random tree.

    Returns
    -------
    SuiteReport
        Report named ``lemmas``.
    """
    if trials <= 0:
        raise ValidationError(f"trials must be positive, got {trials}")
    rng = make_rng(seed)
    report = SuiteReport(suite="lemmas", details={"trials": trials, "vacuous": {}})
    for t in range(trials):
        family = _draw(
            rng,
            max_vertices,
            lambda tree: sample_family(tree, rng.randint(2, 5), rng, _pairwise_meet, stop=0.05),
        )
        _record(report, "helly", str(t), check_helly(family))

        nested, y = _draw(rng, max_vertices, lambda tree: _nested_instance(tree, rng))
        _record(report, "nested", str(t), check_nested_intersection(nested, y))

        quad = _draw(
            rng, max_vertices, lambda tree: sample_family(tree, 4, rng, _crosswise_meet, stop=0.05)
        )
        _record(report, "bridge", str(t), check_bridge_lemma(*quad))

        tree = FiniteTree.random(rng.randint(2, max_vertices), rng)
        x, y = random_subtree(tree, rng), random_subtree(tree, rng)
        if not x.vertices & y.vertices:
            path = bridge(x, y)
            ok = path[0] == nearest_point(x, path[-1]) and path[-1] == nearest_point(y, path[0])
            ok = ok and not (set(path[1:-1]) & (x.vertices | y.vertices))
            detail = "" if ok else f"bridge {path} does not join nearest points"
            report.record("projection", str(t), ok, detail)

    for t, (ball, h, k) in enumerate(_commuting_instances(trials, rng)):
        _record(report, "commuting", str(t), check_commuting_elliptics(ball, h, k))
    logger.info("lemma suite: %d instances, %d failures", report.instances, len(report.failures))
    return report

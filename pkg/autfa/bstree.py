"""Balls in the Bass-Serre tree of a graph of finite groups, and the right action on them."""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from autfa.errors import BaseMismatch, ValidationError
from autfa.gog import GraphOfGroups, GroupoidPath, Loop, reduce_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TreeVertex:
    """
    The coset G_w·p, for a path ``p`` from ``w`` to the base vertex.

    The path is stored reduced with its leading element set to the identity,
    which does not change the coset.

    Attributes
    ----------
    graph : GraphOfGroups
        The graph of groups.
    base : int
        Base vertex of the fundamental group acting on the tree.
    path : GroupoidPath
        Path from the vertex type to the base.
    """

    graph: GraphOfGroups = field(repr=False)
    base: int
    path: GroupoidPath

    def __post_init__(self) -> None:
        """Reduce the path and drop its leading element."""
        p = self.path
        if p.graph is not self.graph:
            raise ValidationError("path lives in another graph of groups")
        if p.end != self.base:
            raise BaseMismatch(f"path ends at {p.end}, not at the base {self.base}")
        p = reduce_path(p)
        if p.elements[0] != 0:
            p = GroupoidPath(p.graph, p.start, p.edges, (0,) + p.elements[1:])
        object.__setattr__(self, "path", p)

    @classmethod
    def root(cls, graph: GraphOfGroups, base: int) -> "TreeVertex":
        """The vertex G_v·1 of the base type v."""
        return cls(graph, base, GroupoidPath.trivial(graph, base))

    @property
    def type_vertex(self) -> int:
        return self.path.start

    @cached_property
    def _key(self) -> Tuple:
        if self.graph.has_trivial_edge_groups:
            return (self.type_vertex, self.path.edges, self.path.elements)
        return (self.type_vertex, self.path.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeVertex):
            return NotImplemented
        if other.graph is not self.graph or other.base != self.base:
            return False
        if self._key != other._key:
            return False
        if self.graph.has_trivial_edge_groups:
            return True
        return reduce_path(self.path * other.path.inverse()).length == 0

    def __hash__(self) -> int:
        return hash(self._key)

    def label(self) -> str:
        return f"{self.type_vertex}|{self.path.to_text()}"


def neighbors(u: TreeVertex) -> List[TreeVertex]:
    """
    Vertices adjacent to ``u``.

    For every edge e ending at the type w of ``u`` and every right coset
    representative g of α_e(G_e) in G_w, the coset G_ι(e)·(e·g·p) is a neighbour.
    These are pairwise distinct and include the parent step.

    Returns
    -------
    List[TreeVertex]
        Neighbours in edge order.
    """
    g = u.graph
    w = u.type_vertex
    found: List[TreeVertex] = []
    seen = set()
    for e in g.incoming[w]:
        source = g.edges[e].source
        for rep in g.coset_representatives[e]:
            step = GroupoidPath(g, source, (e,), (0, rep))
            v = TreeVertex(g, u.base, step * u.path)
            if v not in seen:
                seen.add(v)
                found.append(v)
    return found


def _check_base(u: TreeVertex, loop: GroupoidPath) -> None:
    if loop.graph is not u.graph:
        raise BaseMismatch("loop lives in another graph of groups")
    if loop.start != u.base or loop.end != u.base:
        raise BaseMismatch(f"loop at {loop.start} but the tree is based at {u.base}")


def act(u: TreeVertex, g: GroupoidPath) -> TreeVertex:
    """
    Right action of a loop at the base: G_w·p ↦ G_w·(p·g).

    Raises
    ------
    BaseMismatch
        If ``g`` is not a loop at the base vertex.
    """
    _check_base(u, g)
    return TreeVertex(u.graph, u.base, u.path * g)


def distance(u: TreeVertex, v: TreeVertex) -> int:
    """Edge count of the reduced path p·q⁻¹."""
    if u.graph is not v.graph or u.base != v.base:
        raise ValidationError("vertices of different trees")
    return reduce_path(u.path * v.path.inverse()).length


def geodesic(u: TreeVertex, v: TreeVertex) -> List[TreeVertex]:
    """Vertices on the geodesic from ``u`` to ``v``, both included."""
    if u.graph is not v.graph or u.base != v.base:
        raise ValidationError("vertices of different trees")
    g = u.graph
    r = reduce_path(u.path * v.path.inverse())
    starts = r.vertex_sequence
    out = []
    for k in range(r.length + 1):
        suffix = GroupoidPath(g, starts[k], r.edges[k:], r.elements[k:])
        out.append(TreeVertex(g, u.base, suffix * v.path))
    return out


def iter_layers(center: TreeVertex) -> Iterator[List[TreeVertex]]:
    """Spheres of radius 0, 1, 2, … around ``center``."""
    layer = [center]
    previous: List[TreeVertex] = []
    while layer:
        yield layer
        behind = set(previous) | set(layer)
        nxt: List[TreeVertex] = []
        fresh = set()
        for u in layer:
            for v in neighbors(u):
                if v not in behind and v not in fresh:
                    fresh.add(v)
                    nxt.append(v)
        previous, layer = layer, nxt


@dataclass(frozen=True, eq=False)
class Ball:
    """
    A finite ball in the Bass-Serre tree.

    Attributes
    ----------
    center : TreeVertex
        Centre.
    radius : int
        Radius R.
    vertices : Tuple[TreeVertex, ...]
        Distinct vertices in BFS order.
    depths : Tuple[int, ...]
        Distance of each vertex from the centre.
    adjacency : Tuple[Tuple[int, ...], ...]
        Neighbour indices of each vertex within the ball.
    """

    center: TreeVertex
    radius: int
    vertices: Tuple[TreeVertex, ...] = field(repr=False)
    depths: Tuple[int, ...] = field(repr=False)
    adjacency: Tuple[Tuple[int, ...], ...] = field(repr=False)

    @cached_property
    def index(self) -> Dict[TreeVertex, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    def __contains__(self, u: object) -> bool:
        return u in self.index

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.vertices)))
        graph.add_edges_from((k, j) for k, adj in enumerate(self.adjacency) for j in adj if k < j)
        return graph

    def to_dot(self, name: str = "ball") -> str:
        """DOT rendering, labelled by vertex type and reduced path."""
        lines = [f"graph {name} {{"]
        for k, v in enumerate(self.vertices):
            lines.append(f'  {k} [label="{v.label()}"];')
        for k, adj in enumerate(self.adjacency):
            for j in adj:
                if k < j:
                    lines.append(f"  {k} -- {j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ball(center: TreeVertex, radius: int) -> Ball:
    """
    Breadth-first ball of the given radius.

    Raises
    ------
    ValidationError
        If the radius is negative.
    """
    if radius < 0:
        raise ValidationError(f"radius must be non-negative, got {radius}")
    index: Dict[TreeVertex, int] = {center: 0}
    vertices = [center]
    depths = [0]
    adjacency: List[List[int]] = [[]]
    queue = deque([0])
    while queue:
        k = queue.popleft()
        if depths[k] == radius:
            continue
        for v in neighbors(vertices[k]):
            j = index.get(v)
            if j is None:
                j = len(vertices)
                index[v] = j
                vertices.append(v)
                depths.append(depths[k] + 1)
                adjacency.append([])
                queue.append(j)
            if j not in adjacency[k]:
                adjacency[k].append(j)
                adjacency[j].append(k)
    logger.debug("ball of radius %d has %d vertices", radius, len(vertices))
    return Ball(center, radius, tuple(vertices), tuple(depths), tuple(tuple(a) for a in adjacency))


def fixed_set(g: GroupoidPath, ball: Ball) -> FrozenSet[TreeVertex]:
    """Vertices of ``ball`` fixed by ``g``."""
    return frozenset(u for u in ball.vertices if act(u, g) == u)


def fixed_set_subgroup(gens: Sequence[GroupoidPath], ball: Ball) -> FrozenSet[TreeVertex]:
    """Vertices of ``ball`` fixed by every generator."""
    fixed = frozenset(ball.vertices)
    for g in gens:
        fixed = frozenset(u for u in fixed if act(u, g) == u)
    return fixed


def displacement(u: TreeVertex, g: GroupoidPath) -> int:
    """d(u, u·g)."""
    return distance(u, act(u, g))


def translation_length_oracle(g: Loop, radius: int, center: Optional[TreeVertex] = None) -> int:
    """
    Minimum displacement of ``g`` over a ball around the base vertex.

    Exact once the ball meets the minimal set of ``g``.
    """
    if center is None:
        center = TreeVertex.root(g.graph, g.start)
    ball = build_ball(center, radius)
    return min(displacement(u, g) for u in ball.vertices)


def translation_length_adaptive(
    g: Loop, center: Optional[TreeVertex] = None, max_radius: int = 64
) -> int:
    """
    Exact translation length by growing spheres until the minimum stops decreasing.

    On a tree d(x, x·g) = ‖g‖ + 2·d(x, Min(g)), so the minimum over the ball
    of radius R drops by exactly 2 per layer until the ball reaches Min(g) and
    is constant from then on.

    Raises
    ------
    ValidationError
        If the minimum is still decreasing at ``max_radius``.
    """
    if center is None:
        center = TreeVertex.root(g.graph, g.start)
    best = displacement(center, g)
    for radius, layer in enumerate(iter_layers(center)):
        if radius == 0:
            continue
        if best == 0:
            return 0
        if radius > max_radius:
            raise ValidationError(f"translation length did not settle within radius {max_radius}")
        layer_min = min(displacement(u, g) for u in layer)
        if layer_min >= best:
            return best
        best = layer_min
    return best


def translate(vertices: Iterable[TreeVertex], g: GroupoidPath) -> FrozenSet[TreeVertex]:
    return frozenset(act(u, g) for u in vertices)

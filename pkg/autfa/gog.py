"""Graphs of finite groups, fundamental groupoid paths and translation lengths."""

import logging
import random
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Tuple, TypeVar

import networkx as nx

from autfa.errors import BaseMismatch, ShapeMismatch, ValidationError
from autfa.groups import FiniteGroup, GroupMap, trivial_group
from autfa.words import (
    FreeProductSignature,
    Syllable,
    Word,
    cyclically_reduce,
    exponent_sum,
    normalize,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    """
    An oriented edge of a graph of groups.

    Attributes
    ----------
    id : int
        Index of the edge in the graph.
    rev : int
        Index of the reversed edge ē.
    source : int
        ι(e).
    target : int
        τ(e).
    group : FiniteGroup
        Edge group G_e.
    alpha : GroupMap
        Monomorphism α_e: G_e → G_τ(e).
    """

    id: int
    rev: int
    source: int
    target: int
    group: FiniteGroup = field(repr=False)
    alpha: GroupMap = field(repr=False)


@dataclass(frozen=True, eq=False)
class GraphOfGroups:
    """
    A finite connected graph with finite vertex and edge groups.

    Attributes
    ----------
    vertices : Tuple[FiniteGroup, ...]
        Vertex groups G_v.
    edges : Tuple[Edge, ...]
        Oriented edges, closed under reversal.
    """

    vertices: Tuple[FiniteGroup, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self) -> None:
        """Validate reversal, endpoint maps, monomorphisms and connectivity."""
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.vertices:
            raise ValidationError("a graph of groups needs at least one vertex")
        n = len(self.vertices)
        for k, e in enumerate(self.edges):
            if e.id != k:
                raise ValidationError(f"edge at position {k} has id {e.id}")
            if not (0 <= e.source < n and 0 <= e.target < n):
                raise ValidationError(f"edge {k} has an endpoint outside the vertex list")
            if not 0 <= e.rev < len(self.edges) or e.rev == k:
                raise ValidationError(f"edge {k} has invalid reverse {e.rev}")
            r = self.edges[e.rev]
            if r.rev != k or r.source != e.target or r.target != e.source:
                raise ValidationError(f"edges {k} and {e.rev} are not mutually reverse")
            if r.group.table != e.group.table:
                raise ValidationError(f"edges {k} and {e.rev} carry different groups")
            if e.alpha.source.table != e.group.table:
                raise ValidationError(f"edge {k}: monomorphism does not start at the edge group")
            if e.alpha.target.table != self.vertices[e.target].table:
                raise ValidationError(f"edge {k}: monomorphism does not land in G_{e.target}")
            if not e.alpha.is_injective:
                raise ValidationError(f"edge {k}: edge map is not injective")
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from((e.source, e.target) for e in self.edges)
        if not nx.is_connected(graph):
            raise ValidationError("underlying graph is not connected")

    @cached_property
    def image_sets(self) -> Tuple[frozenset, ...]:
        """α_e(G_e) for every edge."""
        return tuple(frozenset(e.alpha.images) for e in self.edges)

    @cached_property
    def has_trivial_edge_groups(self) -> bool:
        return all(e.group.order == 1 for e in self.edges)

    @cached_property
    def alpha_inverse(self) -> Tuple[Dict[int, int], ...]:
        return tuple({y: x for x, y in enumerate(e.alpha.images)} for e in self.edges)

    @cached_property
    def incoming(self) -> Tuple[Tuple[int, ...], ...]:
        """Edges ending at each vertex."""
        return tuple(
            tuple(e.id for e in self.edges if e.target == v) for v in range(len(self.vertices))
        )

    @cached_property
    def coset_representatives(self) -> Tuple[Tuple[int, ...], ...]:
        """Representatives of the right cosets α_e(G_e)·g in G_τ(e), one tuple per edge."""
        reps = []
        for e in self.edges:
            group = self.vertices[e.target]
            covered: set = set()
            chosen = []
            for g in group.elements():
                if g in covered:
                    continue
                chosen.append(g)
                covered.update(group.table[s][g] for s in self.image_sets[e.id])
            reps.append(tuple(chosen))
        return tuple(reps)

    def cross(self, e: int, h: int) -> int:
        """α_ē(α_e⁻¹(h)) for ``h`` in the image of α_e."""
        return self.edges[self.edges[e].rev].alpha(self.alpha_inverse[e][h])

    def cancels(self, e: int, h: int, e_next: int) -> bool:
        """Whether ``e·h·e_next`` has the form e·α_e(g)·ē."""
        return e_next == self.edges[e].rev and h in self.image_sets[e]


P = TypeVar("P", bound="GroupoidPath")


@dataclass(frozen=True)
class GroupoidPath:
    """
    A path g_0 e_1 g_1 … e_n g_n in the fundamental groupoid.

    Attributes
    ----------
    graph : GraphOfGroups
        The graph of groups.
    start : int
        Start vertex v_0.
    edges : Tuple[int, ...]
        Edge ids e_1 … e_n.
    elements : Tuple[int, ...]
        Vertex-group elements g_0 … g_n.
    """

    graph: GraphOfGroups = field(repr=False)
    start: int
    edges: Tuple[int, ...] = ()
    elements: Tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        """Check that the edges form a path and elements lie in their vertex groups."""
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "elements", tuple(self.elements))
        g = self.graph
        if len(self.elements) != len(self.edges) + 1:
            raise ValidationError("a path of n edges carries n + 1 elements")
        if not 0 <= self.start < len(g.vertices):
            raise ValidationError(f"start vertex {self.start} not in graph")
        v = self.start
        g.vertices[v].check_element(self.elements[0])
        for k, e in enumerate(self.edges):
            if not 0 <= e < len(g.edges):
                raise ValidationError(f"edge {e} not in graph")
            edge = g.edges[e]
            if edge.source != v:
                raise ValidationError(f"edge {e} does not start at vertex {v}")
            v = edge.target
            g.vertices[v].check_element(self.elements[k + 1])

    @classmethod
    def trivial(cls, graph: GraphOfGroups, vertex: int, element: int = 0) -> "GroupoidPath":
        return cls(graph, vertex, (), (element,))

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def end(self) -> int:
        return self.graph.edges[self.edges[-1]].target if self.edges else self.start

    @property
    def vertex_sequence(self) -> List[int]:
        seq = [self.start]
        seq.extend(self.graph.edges[e].target for e in self.edges)
        return seq

    def __mul__(self, other: "GroupoidPath") -> "GroupoidPath":
        if other.graph is not self.graph:
            raise ValidationError("paths in different graphs of groups")
        if self.end != other.start:
            raise ValidationError(
                f"path ending at {self.end} cannot be followed from {other.start}"
            )
        group = self.graph.vertices[self.end]
        joint = group.table[self.elements[-1]][other.elements[0]]
        return GroupoidPath(
            self.graph,
            self.start,
            self.edges + other.edges,
            self.elements[:-1] + (joint,) + other.elements[1:],
        )

    def inverse(self) -> "GroupoidPath":
        g = self.graph
        vertices = self.vertex_sequence
        elements = tuple(
            g.vertices[v].inverse[x] for v, x in zip(reversed(vertices), reversed(self.elements))
        )
        edges = tuple(g.edges[e].rev for e in reversed(self.edges))
        return GroupoidPath(g, self.end, edges, elements)

    @property
    def is_reduced(self) -> bool:
        g = self.graph
        return not any(
            g.cancels(self.edges[k], self.elements[k + 1], self.edges[k + 1])
            for k in range(len(self.edges) - 1)
        )

    def to_text(self) -> str:
        parts = [str(self.elements[0])]
        for e, x in zip(self.edges, self.elements[1:]):
            parts.append(f"e{e}")
            parts.append(str(x))
        return " ".join(parts)


@dataclass(frozen=True)
class Loop(GroupoidPath):
    """A path that starts and ends at the same vertex."""

    def __post_init__(self) -> None:
        """Check the path is closed."""
        super().__post_init__()
        if self.end != self.start:
            raise ValidationError(f"loop starts at {self.start} but ends at {self.end}")

    @classmethod
    def of(cls, path: GroupoidPath) -> "Loop":
        return cls(path.graph, path.start, path.edges, path.elements)

    @property
    def is_cyclically_reduced(self) -> bool:
        if not self.is_reduced:
            return False
        if len(self.edges) < 2:
            return True
        g = self.graph
        first, last = self.edges[0], self.edges[-1]
        wrap = g.vertices[self.start].table[self.elements[-1]][self.elements[0]]
        return not g.cancels(last, wrap, first)

    def __mul__(self, other: GroupoidPath) -> GroupoidPath:  # type: ignore[override]
        product = super().__mul__(other)
        return Loop.of(product) if product.end == product.start else product


def _reduce_stack(p: GroupoidPath) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    g = p.graph
    edges: List[int] = []
    elements: List[int] = [p.elements[0]]
    for e, x in zip(p.edges, p.elements[1:]):
        if edges and g.cancels(edges[-1], elements[-1], e):
            last = edges.pop()
            h = elements.pop()
            prev = elements.pop()
            group = g.vertices[g.edges[last].source]
            elements.append(group.table[group.table[prev][g.cross(last, h)]][x])
        else:
            edges.append(e)
            elements.append(x)
    return tuple(edges), tuple(elements)


def _reduce_random(p: GroupoidPath, rng: random.Random) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    g = p.graph
    edges = list(p.edges)
    elements = list(p.elements)
    while True:
        spots = [
            k for k in range(len(edges) - 1) if g.cancels(edges[k], elements[k + 1], edges[k + 1])
        ]
        if not spots:
            return tuple(edges), tuple(elements)
        k = rng.choice(spots)
        group = g.vertices[g.edges[edges[k]].source]
        crossed = g.cross(edges[k], elements[k + 1])
        merged = group.table[group.table[elements[k]][crossed]][elements[k + 2]]
        del edges[k : k + 2]
        elements[k : k + 3] = [merged]


def reduce_path(p: P, rng: Optional[random.Random] = None) -> P:
    """
    Reduce a path by rewriting every e·α_e(g)·ē to α_ē(g).

    Parameters
    ----------
    p : GroupoidPath
        Any valid path (or loop).
    rng : Optional[random.Random], default=None
        When given, rewrites are applied in random order instead of one stack pass.

    Returns
    -------
    GroupoidPath
        An equivalent reduced path of the same class with the same endpoints.
    """
    edges, elements = _reduce_stack(p) if rng is None else _reduce_random(p, rng)
    return replace(p, edges=edges, elements=elements)


def cyclically_reduce_loop(loop: Loop) -> Tuple[Loop, GroupoidPath]:
    """
    Cyclically reduce a loop.

    Returns
    -------
    Tuple[Loop, GroupoidPath]
        ``(c, h)`` with ``loop ≃ h⁻¹·c·h``; ``h`` runs from the base of ``c``
        to the base of ``loop``, which may differ.
    """
    graph = loop.graph
    c = reduce_path(loop)
    h = GroupoidPath.trivial(graph, c.start)
    while not c.is_cyclically_reduced:
        p = GroupoidPath(graph, c.start, (c.edges[0],), (c.elements[0], 0))
        c = Loop.of(reduce_path(p.inverse() * c * p))
        h = reduce_path(p.inverse() * h)
    return c, h


def translation_length(loop: Loop) -> int:
    """Edge count of the cyclic reduction."""
    return cyclically_reduce_loop(loop)[0].length


class Shape(str, Enum):
    """Graphs of groups realising a free product."""

    SINGLE_EDGE = "single_edge"
    STAR = "star"
    LOOP_FOR_Z = "loop_for_Z"


def _edge_pair(eid: int, a: int, b: int, ga: FiniteGroup, gb: FiniteGroup) -> Tuple[Edge, Edge]:
    one = trivial_group()
    return (
        Edge(eid, eid + 1, a, b, one, GroupMap.trivial(one, gb)),
        Edge(eid + 1, eid, b, a, one, GroupMap.trivial(one, ga)),
    )


@dataclass(frozen=True, eq=False)
class FreeProductRealisation:
    """
    A free product realised as the fundamental group of a graph of groups.

    Attributes
    ----------
    signature : FreeProductSignature
        The free product.
    shape : Shape
        Graph shape.
    graph : GraphOfGroups
        The graph of groups (trivial edge groups).
    base : int
        Base vertex of all loops.
    vertex_factor : Tuple[Optional[int], ...]
        Factor carried by each vertex (None for trivial vertex groups).
    stable_edges : Dict[int, int]
        Edge realising each infinite cyclic factor.
    """

    signature: FreeProductSignature
    shape: Shape
    graph: GraphOfGroups
    base: int
    vertex_factor: Tuple[Optional[int], ...]
    stable_edges: Dict[int, int] = field(default_factory=dict)

    @cached_property
    def tree_paths(self) -> Tuple[GroupoidPath, ...]:
        """For each vertex v, the maximal-tree path from the base to v."""
        g = self.graph
        stable = set(self.stable_edges.values())
        stable.update(g.edges[e].rev for e in list(stable))
        paths: Dict[int, GroupoidPath] = {self.base: GroupoidPath.trivial(g, self.base)}
        queue = deque([self.base])
        while queue:
            v = queue.popleft()
            for e in g.edges:
                if e.source != v or e.id in stable or e.target in paths:
                    continue
                step = GroupoidPath(g, v, (e.id,), (0, 0))
                paths[e.target] = paths[v] * step
                queue.append(e.target)
        return tuple(paths[v] for v in range(len(g.vertices)))

    @cached_property
    def factor_vertex(self) -> Dict[int, int]:
        return {f: v for v, f in enumerate(self.vertex_factor) if f is not None}

    @cached_property
    def _stable_letters(self) -> Dict[int, Syllable]:
        letters: Dict[int, Syllable] = {}
        for factor, e in self.stable_edges.items():
            letters[e] = (factor, 1)
            letters[self.graph.edges[e].rev] = (factor, -1)
        return letters

    def vertex_representative_path(self, v: int) -> GroupoidPath:
        """Maximal-tree path from ``v`` back to the base."""
        return self.tree_paths[v].inverse()

    def factor_loop(self, factor: int, x: int) -> Loop:
        """Loop at the base representing letter ``x`` of ``factor``."""
        g = self.graph
        if factor in self.stable_edges:
            e = self.stable_edges[factor]
            step = e if x > 0 else g.edges[e].rev
            return Loop(g, self.base, (step,) * abs(x), (0,) * (abs(x) + 1))
        v = self.factor_vertex[factor]
        to = self.tree_paths[v]
        return Loop.of(to * GroupoidPath.trivial(g, v, x) * to.inverse())

    def embed(self, w: Word) -> Loop:
        """Reduced loop at the base representing ``w``."""
        if w.signature != self.signature:
            raise ValidationError("word is not over the realised free product")
        path: GroupoidPath = GroupoidPath.trivial(self.graph, self.base)
        for i, x in w.syllables:
            path = path * self.factor_loop(i, x)
        return Loop.of(reduce_path(path))

    def word_of(self, loop: GroupoidPath) -> Word:
        """
        Read a loop at the base back as a free-product word.

        Raises
        ------
        BaseMismatch
            If the loop is not based at the base vertex.
        """
        if loop.start != self.base or loop.end != self.base:
            raise BaseMismatch(f"loop at {loop.start} but the base is {self.base}")
        raw: List[Syllable] = []
        vertices = loop.vertex_sequence
        for k, x in enumerate(loop.elements):
            factor = self.vertex_factor[vertices[k]]
            if x != 0 and factor is not None:
                raw.append((factor, x))
            if k < len(loop.edges) and loop.edges[k] in self._stable_letters:
                raw.append(self._stable_letters[loop.edges[k]])
        return normalize(raw, self.signature)

    def expected_translation_length(self, w: Word) -> int:
        """Translation length predicted from the word alone."""
        if self.shape is Shape.LOOP_FOR_Z:
            return exponent_sum(w)
        c, _ = cyclically_reduce(w)
        if len(c) < 2:
            return 0
        return len(c) if self.shape is Shape.SINGLE_EDGE else 2 * len(c)


def free_product_as_gog(
    sig: FreeProductSignature, shape: Shape = Shape.SINGLE_EDGE, base: int = 0
) -> FreeProductRealisation:
    """
    Realise a free product as a graph of groups with trivial edge groups.

    Parameters
    ----------
    sig : FreeProductSignature
        The free product.
    shape : Shape, default=Shape.SINGLE_EDGE
        ``single_edge`` for two finite factors, ``star`` for finite factors around
        a trivial centre (vertex 0, factor i at vertex i+1), ``loop_for_Z`` for one
        finite and one infinite cyclic factor.
    base : int, default=0
        Base vertex.

    Returns
    -------
    FreeProductRealisation
        The graph of groups with its embedding.

    Raises
    ------
    ShapeMismatch
        If the signature does not fit the shape.
    """
    shape = Shape(shape)
    factors = sig.factors
    if shape is Shape.SINGLE_EDGE:
        if len(factors) != 2 or not sig.is_finite:
            raise ShapeMismatch("single_edge needs exactly two finite factors")
        g0, g1 = sig.group(0), sig.group(1)
        graph = GraphOfGroups((g0, g1), _edge_pair(0, 0, 1, g0, g1))
        vertex_factor: Tuple[Optional[int], ...] = (0, 1)
        stable: Dict[int, int] = {}
    elif shape is Shape.STAR:
        if not sig.is_finite:
            raise ShapeMismatch("star needs finite factors")
        centre = trivial_group()
        vertices = (centre,) + tuple(sig.group(i) for i in range(len(factors)))
        edges: List[Edge] = []
        for i in range(len(factors)):
            edges.extend(_edge_pair(2 * i, 0, i + 1, centre, vertices[i + 1]))
        graph = GraphOfGroups(vertices, tuple(edges))
        vertex_factor = (None,) + tuple(range(len(factors)))
        stable = {}
    else:
        cyclic = [i for i, f in enumerate(factors) if f.is_infinite_cyclic]
        if len(factors) != 2 or len(cyclic) != 1:
            raise ShapeMismatch("loop_for_Z needs one finite and one infinite cyclic factor")
        z = cyclic[0]
        h = 1 - z
        group = sig.group(h)
        graph = GraphOfGroups((group,), _edge_pair(0, 0, 0, group, group))
        vertex_factor = (h,)
        stable = {z: 0}
    if not 0 <= base < len(graph.vertices):
        raise ShapeMismatch(f"base vertex {base} not in the {shape.value} graph")
    logger.debug("realised %s as %s based at %d", sig.describe(), shape.value, base)
    return FreeProductRealisation(sig, shape, graph, base, vertex_factor, stable)


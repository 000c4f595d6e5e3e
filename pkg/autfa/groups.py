"""Finite groups given by multiplication tables, and maps between them."""

import itertools
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from autfa.config import DEFAULT_SEARCH_BOUND
from autfa.errors import AxiomViolation, BoundExceeded, IndexOutOfRange, ValidationError

logger = logging.getLogger(__name__)

Table = Tuple[Tuple[int, ...], ...]


def _as_table(rows: Sequence[Sequence[int]]) -> Table:
    table = tuple(tuple(int(x) for x in row) for row in rows)
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise ValidationError("multiplication table must be a non-empty square array")
    return table


def _check_axioms(table: Table) -> None:
    """
    Check closure, identity at index 0, inverses and associativity.

    Raises
    ------
    AxiomViolation
        With the first offending triple found.
    """
    n = len(table)
    arr = np.asarray(table, dtype=np.int64)

    bad = np.argwhere((arr < 0) | (arr >= n))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise AxiomViolation("closure", (i, j, int(arr[i, j])))

    ident = np.arange(n)
    if not np.array_equal(arr[0], ident):
        x = int(np.flatnonzero(arr[0] != ident)[0])
        raise AxiomViolation("identity", (0, x, int(arr[0, x])))
    if not np.array_equal(arr[:, 0], ident):
        x = int(np.flatnonzero(arr[:, 0] != ident)[0])
        raise AxiomViolation("identity", (x, 0, int(arr[x, 0])))

    for x in range(n):
        candidates = np.flatnonzero(arr[x] == 0)
        if not any(arr[y, x] == 0 for y in candidates):
            raise AxiomViolation("inverse", (x,))

    # left[x, y, z] = (xy)z and right[x, y, z] = x(yz)
    left = arr[arr]
    right = arr[ident[:, None, None], arr[None, :, :]]
    mismatch = np.argwhere(left != right)
    if mismatch.size:
        x, y, z = (int(v) for v in mismatch[0])
        raise AxiomViolation("associativity", (x, y, z))


@dataclass(frozen=True)
class FiniteGroup:
    """
    A finite group given by its full multiplication table.

    Element 0 is the identity. ``table[x][y]`` is the product ``x·y``.

    Attributes
    ----------
    name : str
        Display name, e.g. ``"S3"``.
    table : Tuple[Tuple[int, ...], ...]
        The n×n multiplication table.
    inverse : Tuple[int, ...]
        Derived inverse of every element.
    """

    name: str
    table: Table
    inverse: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the group axioms and derive inverses."""
        table = _as_table(self.table)
        _check_axioms(table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "inverse", tuple(row.index(0) for row in table))

    @property
    def order(self) -> int:
        """Number of elements."""
        return len(self.table)

    def elements(self) -> range:
        """All element indices, identity first."""
        return range(self.order)

    def check_element(self, x: int) -> None:
        """Raise IndexOutOfRange unless ``x`` is an element index."""
        if not 0 <= x < self.order:
            raise IndexOutOfRange(f"element {x} not in {self.name} of order {self.order}")

    def multiply(self, x: int, y: int) -> int:
        """
        Multiply two elements.

        Parameters
        ----------
        x, y : int
            Element indices.

        Returns
        -------
        int
            The product ``x·y``.

        Raises
        ------
        IndexOutOfRange
            If either index is outside the group.
        """
        self.check_element(x)
        self.check_element(y)
        return self.table[x][y]

    def invert(self, x: int) -> int:
        self.check_element(x)
        return self.inverse[x]

    def conjugate(self, x: int, k: int) -> int:
        """Return ``k⁻¹·x·k``."""
        return self.table[self.table[self.inverse[k]][x]][k]

    def power(self, x: int, n: int) -> int:
        self.check_element(x)
        base = x if n >= 0 else self.inverse[x]
        result = 0
        for _ in range(abs(n)):
            result = self.table[result][base]
        return result

    def element_order(self, x: int) -> int:
        self.check_element(x)
        k, y = 1, x
        while y != 0:
            y = self.table[y][x]
            k += 1
        return k

    def is_abelian(self) -> bool:
        arr = np.asarray(self.table)
        return bool(np.array_equal(arr, arr.T))

    def span(self, generators: Sequence[int]) -> frozenset:
        """Subgroup generated by ``generators`` (closure under right multiplication)."""
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for g in generators:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def to_dict(self) -> dict:
        """Serialize group to dictionary."""
        return {"name": self.name, "order": self.order, "table": [list(row) for row in self.table]}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteGroup":
        """Deserialize group from dictionary, canonicalizing the identity to index 0."""
        group = validate_group(data["table"], name=data.get("name", "G"))
        if "order" in data and int(data["order"]) != group.order:
            raise ValidationError(
                f"declared order {data['order']} but table has {group.order} rows"
            )
        return group


def validate_group(table: Sequence[Sequence[int]], name: str = "G") -> FiniteGroup:
    """
    Build a FiniteGroup from a table whose identity may sit at any index.

    The identity is moved to index 0 by swapping labels.

    Parameters
    ----------
    table : Sequence[Sequence[int]]
        Square array of element indices.
    name : str, default="G"
        Group name.

    Returns
    -------
    FiniteGroup
        The validated group.

    Raises
    ------
    AxiomViolation
        If any group axiom fails.
    """
    rows = _as_table(table)
    n = len(rows)
    arr = np.asarray(rows, dtype=np.int64)
    bad = np.argwhere((arr < 0) | (arr >= n))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise AxiomViolation("closure", (i, j, int(arr[i, j])))

    ident = np.arange(n)
    identities = [
        e for e in range(n) if np.array_equal(arr[e], ident) and np.array_equal(arr[:, e], ident)
    ]
    if not identities:
        raise AxiomViolation("identity")
    e = identities[0]
    if e != 0:
        swap = list(range(n))
        swap[0], swap[e] = e, 0
        relabelled = [[0] * n for _ in range(n)]
        for x in range(n):
            for y in range(n):
                relabelled[swap[x]][swap[y]] = swap[rows[x][y]]
        rows = _as_table(relabelled)
    return FiniteGroup(name=name, table=rows)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(name="1", table=((0,),))


def cyclic_group(n: int, name: Optional[str] = None) -> FiniteGroup:
    """Cyclic group of order ``n`` with element ``k`` standing for the k-th power."""
    if n < 1:
        raise ValidationError(f"cyclic group order must be positive, got {n}")
    table = tuple(tuple((x + y) % n for y in range(n)) for x in range(n))
    return FiniteGroup(name=name or f"C{n}", table=table)


def direct_product(g: FiniteGroup, h: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    """Direct product with element ``(a, b)`` stored at index ``a·|H| + b``."""
    m = h.order
    table = tuple(
        tuple(
            g.table[x // m][y // m] * m + h.table[x % m][y % m] for y in range(g.order * m)
        )
        for x in range(g.order * m)
    )
    return FiniteGroup(name=name or f"{g.name}x{h.name}", table=table)


def symmetric_group(n: int, name: Optional[str] = None) -> FiniteGroup:
    """
    Symmetric group on ``n`` letters.

    Elements are the permutations in ``itertools.permutations`` order; the
    product ``x·y`` is the composition ``x∘y`` (apply ``y`` first).
    """
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(x[y[k]] for k in range(n))] for y in perms) for x in perms
    )
    return FiniteGroup(name=name or f"S{n}", table=table)


def is_homomorphism(images: Sequence[int], src: FiniteGroup, tgt: FiniteGroup) -> bool:
    """
    Check whether an element map is a homomorphism.

    Parameters
    ----------
    images : Sequence[int]
        Image of every source element.
    src, tgt : FiniteGroup
        Source and target groups.

    Returns
    -------
    bool
        True iff identity maps to identity and products are preserved.
    """
    if len(images) != src.order or any(not 0 <= y < tgt.order for y in images):
        return False
    if images[0] != 0:
        return False
    src_arr = np.asarray(src.table)
    tgt_arr = np.asarray(tgt.table)
    img = np.asarray(images)
    return bool(np.array_equal(img[src_arr], tgt_arr[img[:, None], img[None, :]]))


@dataclass(frozen=True)
class GroupMap:
    """
    A homomorphism between finite groups.

    Attributes
    ----------
    source : FiniteGroup
        Domain.
    target : FiniteGroup
        Codomain.
    images : Tuple[int, ...]
        Image of every source element.
    """

    source: FiniteGroup = field(repr=False)
    target: FiniteGroup = field(repr=False)
    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate the homomorphism property."""
        images = tuple(int(y) for y in self.images)
        object.__setattr__(self, "images", images)
        if not is_homomorphism(images, self.source, self.target):
            raise ValidationError(
                f"map {images} is not a homomorphism {self.source.name} -> {self.target.name}"
            )

    def __call__(self, x: int) -> int:
        return self.images[x]

    @property
    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and len(set(self.images)) == len(self.images)

    @property
    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_identity(self) -> bool:
        return self.images == tuple(range(self.source.order))

    def then(self, other: "GroupMap") -> "GroupMap":
        """Composite map: apply ``self`` first, then ``other``."""
        if other.source.table != self.target.table:
            raise ValidationError("maps are not composable")
        return GroupMap(self.source, other.target, tuple(other.images[y] for y in self.images))

    def inverse(self) -> "GroupMap":
        if not self.is_bijective:
            raise ValidationError("only isomorphisms can be inverted")
        inv = [0] * self.source.order
        for x, y in enumerate(self.images):
            inv[y] = x
        return GroupMap(self.target, self.source, tuple(inv))

    @classmethod
    def identity(cls, group: FiniteGroup, target: Optional[FiniteGroup] = None) -> "GroupMap":
        return cls(group, target or group, tuple(group.elements()))

    @classmethod
    def trivial(cls, source: FiniteGroup, target: FiniteGroup) -> "GroupMap":
        """The map sending everything to the identity."""
        return cls(source, target, (0,) * source.order)


def _order_profile(group: FiniteGroup) -> Counter:
    return Counter(group.element_order(x) for x in group.elements())


def _generating_set(group: FiniteGroup) -> Tuple[int, ...]:
    """Greedy generating set, largest element orders first."""
    ranked = sorted(group.elements(), key=lambda x: (-group.element_order(x), x))
    gens: List[int] = []
    span = frozenset({0})
    for x in ranked:
        if len(span) == group.order:
            break
        if x not in span:
            gens.append(x)
            span = group.span(gens)
    return tuple(gens)


def _extend(
    g: FiniteGroup, h: FiniteGroup, gens: Sequence[int], gen_images: Sequence[int]
) -> Optional[Tuple[int, ...]]:
    """Extend generator images over the Cayley graph; None on inconsistency."""
    images = [-1] * g.order
    images[0] = 0
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, t in zip(gens, gen_images):
            y = g.table[x][s]
            value = h.table[images[x]][t]
            if images[y] == -1:
                images[y] = value
                queue.append(y)
            elif images[y] != value:
                return None
    return tuple(images)


def _bijections(g: FiniteGroup, h: FiniteGroup) -> Iterator[Tuple[int, ...]]:
    gens = _generating_set(g)
    candidates = [
        [y for y in h.elements() if h.element_order(y) == g.element_order(s)] for s in gens
    ]
    for choice in itertools.product(*candidates):
        images = _extend(g, h, gens, choice)
        if images is None or len(set(images)) != g.order:
            continue
        if is_homomorphism(images, g, h):
            yield images


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> Optional[GroupMap]:
    """
    Find an isomorphism ``g -> h`` if one exists.

    Candidates are pruned by element-order multisets and commutativity, then
    generated from images of a greedy generating set.

    Returns
    -------
    Optional[GroupMap]
        A witness isomorphism, or None. Groups with identical tables get the
        identity map.
    """
    if g.order != h.order:
        return None
    if g.table == h.table:
        return GroupMap.identity(g, h)
    if _order_profile(g) != _order_profile(h) or g.is_abelian() != h.is_abelian():
        return None
    for images in _bijections(g, h):
        return GroupMap(g, h, images)
    return None


def automorphism_group(group: FiniteGroup, bound: int = DEFAULT_SEARCH_BOUND) -> List[GroupMap]:
    """
    Enumerate all automorphisms of a finite group.

    Parameters
    ----------
    group : FiniteGroup
        The group.
    bound : int, default=DEFAULT_SEARCH_BOUND
        Largest order searched.

    Returns
    -------
    List[GroupMap]
        Every automorphism, identity first, the rest in lexicographic order.

    Raises
    ------
    BoundExceeded
        If the group order exceeds ``bound``.
    """
    if group.order > bound:
        raise BoundExceeded(f"{group.name} has order {group.order} > search bound {bound}")
    identity = tuple(group.elements())
    found = sorted(set(_bijections(group, group)), key=lambda im: (im != identity, im))
    logger.debug("automorphism search on %s found %d maps", group.name, len(found))
    return [GroupMap(group, group, images) for images in found]


def abelianisation_order(group: FiniteGroup) -> int:
    """Order of ``G/[G,G]``."""
    commutators = {
        group.table[group.table[group.inverse[x]][group.inverse[y]]][group.table[x][y]]
        for x in group.elements()
        for y in group.elements()
    }
    derived = group.span(sorted(commutators))
    return group.order // len(derived)

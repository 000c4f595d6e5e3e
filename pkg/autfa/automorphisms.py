"""
Automorphisms of free products.

Automorphisms are words in atomic generators applied left to right, carried
together with their fully evaluated image on every factor element. Partial
conjugation (A,b) acts as a ↦ b⁻¹ab, so that (A,b)(A,b') = (A,b'b).
"""

import functools
import itertools
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from autfa.config import DEFAULT_INNER_BOUND, DEFAULT_SAMPLES, DEFAULT_SEED
from autfa.errors import ParseError, SignatureMismatch, ValidationError
from autfa.groups import GroupMap, automorphism_group
from autfa.reports import SuiteReport
from autfa.utils import Check, make_rng, run_checks
from autfa.words import (
    FreeProductSignature,
    Syllable,
    Word,
    conjugate,
    cyclically_reduce,
    invert as invert_word,
    multiply,
    normalize,
)

logger = logging.getLogger(__name__)

ImageMap = Tuple[Tuple[Word, ...], ...]


class AtomicAut(ABC):
    """A generator of the automorphism group of a free product."""

    @abstractmethod
    def validate(self, sig: FreeProductSignature) -> None:
        """Raise ValidationError unless the atom is valid for ``sig``."""

    @abstractmethod
    def letter_image(self, sig: FreeProductSignature, factor: int, x: int) -> List[Syllable]:
        """Raw image of letter ``x`` of ``factor``; an exponent for infinite cyclic factors."""

    @abstractmethod
    def inverse(self, sig: FreeProductSignature) -> "AtomicAut":
        """The inverse generator."""

    @abstractmethod
    def to_text(self) -> str:
        """Text syntax of the atom."""


def _check_index(sig: FreeProductSignature, i: int, what: str) -> None:
    if not 0 <= i < len(sig):
        raise ValidationError(f"{what} index {i} outside 0..{len(sig) - 1}")


def _check_letter(sig: FreeProductSignature, i: int, x: int, what: str) -> None:
    if x == 0 or not sig.factors[i].validate(x):
        raise ValidationError(f"{what} {x} is not a non-identity letter of factor {i}")


@dataclass(frozen=True)
class FactorAut(AtomicAut):
    """An automorphism of one factor, or inversion (sign -1) of an infinite cyclic factor."""

    factor: int
    mapping: Optional[GroupMap] = field(default=None, repr=False)
    sign: int = 1

    def validate(self, sig: FreeProductSignature) -> None:
        _check_index(sig, self.factor, "factor")
        spec = sig.factors[self.factor]
        if spec.group is None:
            if self.mapping is not None or self.sign not in (1, -1):
                raise ValidationError("an infinite cyclic factor only admits sign ±1")
            return
        m = self.mapping
        if m is None or m.source.table != spec.group.table or m.target.table != spec.group.table:
            raise ValidationError(f"factor automorphism must map {spec.name} to itself")
        if not m.is_bijective:
            raise ValidationError("factor automorphism is not bijective")

    def letter_image(self, sig: FreeProductSignature, factor: int, x: int) -> List[Syllable]:
        if factor != self.factor:
            return [(factor, x)]
        if self.mapping is None:
            return [(factor, self.sign * x)]
        return [(factor, self.mapping(x))]

    def inverse(self, sig: FreeProductSignature) -> "FactorAut":
        if self.mapping is None:
            return self
        return FactorAut(self.factor, self.mapping.inverse())

    def to_text(self) -> str:
        if self.mapping is None:
            return f"fa({self.factor},{self.sign})"
        return f"fa({self.factor},{' '.join(str(y) for y in self.mapping.images)})"


@dataclass(frozen=True)
class PermAut(AtomicAut):
    """
    Permutation of isomorphic factors along fixed isomorphisms.

    ``isomorphisms[i]`` maps G_i onto G_π(i); it is None for fixed factors and
    for infinite cyclic factors.
    """

    permutation: Tuple[int, ...]
    isomorphisms: Tuple[Optional[GroupMap], ...] = field(repr=False)

    def validate(self, sig: FreeProductSignature) -> None:
        perm = self.permutation
        n = len(sig)
        if len(perm) != n or sorted(perm) != list(range(n)) or len(self.isomorphisms) != n:
            raise ValidationError(f"{perm} is not a permutation of the {n} factors")
        for i, j in enumerate(perm):
            src, tgt = sig.factors[i], sig.factors[j]
            iso = self.isomorphisms[i]
            if src.is_infinite_cyclic or tgt.is_infinite_cyclic:
                if not (src.is_infinite_cyclic and tgt.is_infinite_cyclic) or iso is not None:
                    raise ValidationError(f"factor {i} cannot be moved to factor {j}")
                continue
            assert src.group is not None and tgt.group is not None
            if iso is None:
                if i != j:
                    raise ValidationError(f"missing isomorphism for moved factor {i}")
                continue
            if (
                iso.source.table != src.group.table
                or iso.target.table != tgt.group.table
                or not iso.is_bijective
            ):
                raise ValidationError(f"isomorphism for factor {i} is not onto factor {j}")
        for cycle in _cycles(perm):
            start = cycle[0]
            if sig.factors[start].group is None:
                continue
            images = list(sig.factors[start].group.elements())
            for i in cycle:
                iso = self.isomorphisms[i]
                if iso is not None:
                    images = [iso(y) for y in images]
            if images != list(range(len(images))):
                raise ValidationError(f"isomorphisms around cycle {cycle} are not compatible")

    def letter_image(self, sig: FreeProductSignature, factor: int, x: int) -> List[Syllable]:
        iso = self.isomorphisms[factor]
        return [(self.permutation[factor], iso(x) if iso is not None else x)]

    def inverse(self, sig: FreeProductSignature) -> "PermAut":
        n = len(self.permutation)
        perm = [0] * n
        isos: List[Optional[GroupMap]] = [None] * n
        for i, j in enumerate(self.permutation):
            perm[j] = i
            iso = self.isomorphisms[i]
            isos[j] = iso.inverse() if iso is not None else None
        return PermAut(tuple(perm), tuple(isos))

    def to_text(self) -> str:
        cycles = [c for c in _cycles(self.permutation) if len(c) > 1]
        return "perm(" + "".join("(" + " ".join(map(str, c)) + ")" for c in cycles) + ")"

    @classmethod
    def from_permutation(cls, sig: FreeProductSignature, permutation: Sequence[int]) -> "PermAut":
        """Permutation automorphism using the signature's compatible isomorphisms."""
        perm = tuple(int(j) for j in permutation)
        if sorted(perm) != list(range(len(sig))):
            raise ValidationError(f"{perm} is not a permutation of the {len(sig)} factors")
        isos = tuple(
            sig.canonical_isomorphism(i, j) if i != j else None for i, j in enumerate(perm)
        )
        atom = cls(perm, isos)
        atom.validate(sig)
        return atom

    @classmethod
    def transposition(cls, sig: FreeProductSignature, i: int, j: int) -> "PermAut":
        perm = list(range(len(sig)))
        perm[i], perm[j] = j, i
        return cls.from_permutation(sig, perm)


def _cycles(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = []
        i = start
        while i not in seen:
            seen.add(i)
            cycle.append(i)
            i = perm[i]
        cycles.append(tuple(cycle))
    return cycles


@dataclass(frozen=True)
class PartialConj(AtomicAut):
    """(A,b): conjugate each element of factor ``target`` by ``element`` of ``conjugator``."""

    target: int
    conjugator: int
    element: int

    def validate(self, sig: FreeProductSignature) -> None:
        _check_index(sig, self.target, "target factor")
        _check_index(sig, self.conjugator, "conjugator factor")
        if self.target == self.conjugator:
            raise ValidationError("partial conjugation needs two different factors")
        _check_letter(sig, self.conjugator, self.element, "conjugating element")

    def letter_image(self, sig: FreeProductSignature, factor: int, x: int) -> List[Syllable]:
        if factor != self.target:
            return [(factor, x)]
        j, b = self.conjugator, self.element
        return [(j, sig.factors[j].invert(b)), (factor, x), (j, b)]

    def inverse(self, sig: FreeProductSignature) -> "PartialConj":
        return PartialConj(
            self.target, self.conjugator, sig.factors[self.conjugator].invert(self.element)
        )

    def to_text(self) -> str:
        return f"pc({self.target},{self.conjugator}.{self.element})"


@dataclass(frozen=True)
class Transvection(AtomicAut):
    """x ↦ a·x on an infinite cyclic factor, ``a`` from another factor."""

    factor: int
    other: int
    element: int

    def validate(self, sig: FreeProductSignature) -> None:
        _check_index(sig, self.factor, "factor")
        _check_index(sig, self.other, "other factor")
        if not sig.factors[self.factor].is_infinite_cyclic:
            raise ValidationError(
                f"transvection needs an infinite cyclic factor, got {self.factor}"
            )
        if self.other == self.factor:
            raise ValidationError("transvection needs two different factors")
        _check_letter(sig, self.other, self.element, "transvecting element")

    def letter_image(self, sig: FreeProductSignature, factor: int, x: int) -> List[Syllable]:
        if factor != self.factor:
            return [(factor, x)]
        a = self.element
        if x > 0:
            return [(self.other, a), (factor, 1)] * x
        a_inv = sig.factors[self.other].invert(a)
        return [(factor, -1), (self.other, a_inv)] * (-x)

    def inverse(self, sig: FreeProductSignature) -> "Transvection":
        return Transvection(self.factor, self.other, sig.factors[self.other].invert(self.element))

    def to_text(self) -> str:
        return f"tv({self.factor},{self.other}.{self.element})"


@dataclass(frozen=True)
class InnerFactor(AtomicAut):
    """γ(a): conjugate factor ``factor`` by its own element ``a``, fixing the other factors."""

    factor: int
    element: int

    def validate(self, sig: FreeProductSignature) -> None:
        _check_index(sig, self.factor, "factor")
        group = sig.factors[self.factor].group
        if group is None:
            raise ValidationError("inner factor automorphisms need a finite factor")
        group.check_element(self.element)

    def letter_image(self, sig: FreeProductSignature, factor: int, x: int) -> List[Syllable]:
        group = sig.factors[factor].group
        if factor != self.factor or group is None:
            return [(factor, x)]
        return [(factor, group.conjugate(x, self.element))]

    def inverse(self, sig: FreeProductSignature) -> "InnerFactor":
        group = sig.group(self.factor)
        return InnerFactor(self.factor, group.inverse[self.element])

    def to_text(self) -> str:
        return f"inn({self.factor},{self.element})"


def _identity_map(sig: FreeProductSignature) -> ImageMap:
    images = []
    for i, spec in enumerate(sig.factors):
        if spec.group is None:
            images.append((Word.letter(sig, i, 1),))
        else:
            images.append(tuple(Word.letter(sig, i, x) for x in spec.group.elements()))
    return tuple(images)


def _atom_map(sig: FreeProductSignature, atom: AtomicAut) -> ImageMap:
    images = []
    for i, spec in enumerate(sig.factors):
        letters = [1] if spec.group is None else list(spec.group.elements())
        images.append(tuple(normalize(atom.letter_image(sig, i, x), sig) for x in letters))
    return tuple(images)


def _substitute(sig: FreeProductSignature, image_map: ImageMap, w: Word) -> Word:
    raw: List[Syllable] = []
    for i, x in w.syllables:
        if sig.factors[i].group is not None:
            raw.extend(image_map[i][x].syllables)
            continue
        gen = image_map[i][0]
        block = gen.syllables if x > 0 else invert_word(gen).syllables
        raw.extend(block * abs(x))
    return normalize(raw, sig)


def _same_signature(a: FreeProductSignature, b: FreeProductSignature) -> None:
    if a is not b and a != b:
        raise SignatureMismatch(f"{a.describe()} vs {b.describe()}")


@dataclass(frozen=True, eq=False)
class Automorphism:
    """
    An automorphism of a free product.

    Attributes
    ----------
    signature : FreeProductSignature
        The free product.
    atoms : Tuple[AtomicAut, ...]
        Generator word, applied left to right.
    image_map : Tuple[Tuple[Word, ...], ...]
        Per factor: images of all elements (finite) or of the generator (infinite cyclic).
    """

    signature: FreeProductSignature = field(repr=False)
    atoms: Tuple[AtomicAut, ...]
    image_map: ImageMap = field(repr=False)

    @classmethod
    def identity(cls, sig: FreeProductSignature) -> "Automorphism":
        return cls(sig, (), _identity_map(sig))

    @classmethod
    def from_atoms(cls, sig: FreeProductSignature, atoms: Sequence[AtomicAut]) -> "Automorphism":
        """
        Evaluate a generator word.

        Raises
        ------
        ValidationError
            If any atom is invalid for ``sig``.
        """
        image_map = _identity_map(sig)
        for atom in atoms:
            atom.validate(sig)
            step = _atom_map(sig, atom)
            image_map = tuple(
                tuple(_substitute(sig, step, w) for w in factor_images)
                for factor_images in image_map
            )
        return cls(sig, tuple(atoms), image_map)

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.signature == other.signature and self.image_map == other.image_map

    def __hash__(self) -> int:
        return hash(tuple(tuple(w.syllables for w in f) for f in self.image_map))

    def image(self, factor: int, x: int) -> Word:
        """Image of letter ``x`` of ``factor``; for infinite cyclic factors ``x`` is an exponent."""
        return apply(self, Word.letter(self.signature, factor, x))

    def is_identity(self) -> bool:
        return self.image_map == _identity_map(self.signature)

    def check_multiplicative(self) -> bool:
        """Exhaustively check that images multiply on every finite factor."""
        for i, spec in enumerate(self.signature.factors):
            group = spec.group
            if group is None:
                continue
            images = self.image_map[i]
            for x in group.elements():
                for y in group.elements():
                    if images[group.table[x][y]] != multiply(images[x], images[y]):
                        return False
        return True

    def to_text(self) -> str:
        return format_automorphism(self)


def apply(alpha: Automorphism, w: Word) -> Word:
    """
    Apply an automorphism to a word.

    Raises
    ------
    SignatureMismatch
        If the word lives in another free product.
    """
    _same_signature(alpha.signature, w.signature)
    return _substitute(alpha.signature, alpha.image_map, w)


def compose(alpha: Automorphism, beta: Automorphism) -> Automorphism:
    """Apply ``alpha`` then ``beta``."""
    _same_signature(alpha.signature, beta.signature)
    image_map = tuple(
        tuple(_substitute(beta.signature, beta.image_map, w) for w in factor_images)
        for factor_images in alpha.image_map
    )
    return Automorphism(alpha.signature, alpha.atoms + beta.atoms, image_map)


def invert(alpha: Automorphism) -> Automorphism:
    sig = alpha.signature
    return Automorphism.from_atoms(sig, [a.inverse(sig) for a in reversed(alpha.atoms)])


def equal(alpha: Automorphism, beta: Automorphism) -> bool:
    """Exact equality of the image maps."""
    _same_signature(alpha.signature, beta.signature)
    return alpha.image_map == beta.image_map


def commutator(alpha: Automorphism, beta: Automorphism) -> Automorphism:
    """``α⁻¹β⁻¹αβ``."""
    return compose(compose(compose(invert(alpha), invert(beta)), alpha), beta)


def partial_conjugation(
    sig: FreeProductSignature, target: int, conjugator: int, element: int
) -> Automorphism:
    """(A,b) as an automorphism; the identity when ``element`` is trivial."""
    if element == 0:
        return Automorphism.identity(sig)
    return Automorphism.from_atoms(sig, [PartialConj(target, conjugator, element)])


def factor_automorphism(sig: FreeProductSignature, factor: int, mapping: GroupMap) -> Automorphism:
    return Automorphism.from_atoms(sig, [FactorAut(factor, mapping)])


def inner_factor(sig: FreeProductSignature, factor: int, element: int) -> Automorphism:
    return Automorphism.from_atoms(sig, [InnerFactor(factor, element)])


def inner_atoms(sig: FreeProductSignature, g: Word) -> List[AtomicAut]:
    """
    Generator word for conjugation by ``g`` (x ↦ g⁻¹xg).

    Conjugation by a letter x of factor i is γ_i(x) followed by (j,x) for all j ≠ i.
    """
    atoms: List[AtomicAut] = []
    for i, x in g.syllables:
        if sig.factors[i].group is not None:
            atoms.append(InnerFactor(i, x))
        atoms.extend(PartialConj(j, i, x) for j in range(len(sig)) if j != i)
    return atoms


def inner_automorphism(sig: FreeProductSignature, g: Word) -> Automorphism:
    _same_signature(sig, g.signature)
    return Automorphism.from_atoms(sig, inner_atoms(sig, g))


class InnerStatus(str, Enum):
    """Outcome of the bounded inner-automorphism search."""

    INNER = "inner"
    NOT_INNER = "not_inner"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class InnerResult:
    """
    Result of ``is_inner``.

    Attributes
    ----------
    status : InnerStatus
        The outcome.
    witness : Optional[Word]
        Conjugator ``g`` with α = (x ↦ g⁻¹xg) when status is INNER.
    bound : int
        The search bound used.
    reason : str
        Why the automorphism is not inner, or why the search stopped.
    """

    status: InnerStatus
    witness: Optional[Word] = None
    bound: int = DEFAULT_INNER_BOUND
    reason: str = ""

    @property
    def is_inner(self) -> bool:
        return self.status is InnerStatus.INNER


def _conjugates_all(alpha: Automorphism, g: Word) -> bool:
    sig = alpha.signature
    for i, spec in enumerate(sig.factors):
        assert spec.group is not None
        for x in spec.group.elements():
            if alpha.image_map[i][x] != conjugate(Word.letter(sig, i, x), g):
                return False
    return True


def is_inner(alpha: Automorphism, bound: int = DEFAULT_INNER_BOUND) -> InnerResult:
    """
    Decide whether an automorphism is conjugation by some element.

    Picks a nontrivial letter ``a`` of the first nontrivial factor ``G_i`` and
    cyclically reduces its image to ``h⁻¹ch``. A conjugator must then be
    ``k·h`` with ``k ∈ G_i`` and ``k⁻¹ak = c``, so only those candidates are
    checked.

    Parameters
    ----------
    alpha : Automorphism
        Automorphism of a free product of finite groups.
    bound : int, default=DEFAULT_INNER_BOUND
        Longest conjugator (in syllables) accepted as a witness.

    Returns
    -------
    InnerResult
        INNER with the shortest witness, NOT_INNER, or UNDECIDED when the only
        conjugators are longer than ``bound``.

    Raises
    ------
    ValidationError
        If the free product has an infinite cyclic factor.
    """
    sig = alpha.signature
    if not sig.is_finite:
        raise ValidationError("inner search needs finite factors")
    factor = next((i for i, f in enumerate(sig.factors) if f.group and f.group.order > 1), None)
    if factor is None:
        return InnerResult(InnerStatus.INNER, Word.identity(sig), bound)
    group = sig.group(factor)
    a = 1
    c, h = cyclically_reduce(alpha.image_map[factor][a])
    if len(c) != 1 or c.syllables[0][0] != factor:
        return InnerResult(
            InnerStatus.NOT_INNER,
            None,
            bound,
            f"factor {factor} is not sent to a conjugate of itself",
        )
    target = c.syllables[0][1]
    witnesses = []
    for k in group.elements():
        if group.conjugate(a, k) != target:
            continue
        g = multiply(Word.letter(sig, factor, k), h)
        if _conjugates_all(alpha, g):
            witnesses.append(g)
    if not witnesses:
        return InnerResult(InnerStatus.NOT_INNER, None, bound, "no conjugator matches every factor")
    best = min(witnesses, key=lambda w: (len(w), w.syllables))
    if len(best) > bound:
        return InnerResult(InnerStatus.UNDECIDED, None, bound, f"conjugators longer than {bound}")
    return InnerResult(InnerStatus.INNER, best, bound)


@dataclass(frozen=True)
class SamplePolicy:
    """
    How many relation instances to check.

    Attributes
    ----------
    exhaustive : bool
        Check every instance.
    samples : int
        Number of instances drawn without replacement otherwise.
    seed : int
        Seed for the draw.
    """

    exhaustive: bool = True
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED


Composer = Callable[[Automorphism, Automorphism], Automorphism]
RelationBuilder = Callable[[], Tuple[Automorphism, Automorphism]]


def _relation_instances(
    sig: FreeProductSignature, composer: Composer
) -> List[Tuple[str, str, RelationBuilder]]:
    n = len(sig)
    groups = [sig.group(i) for i in range(n)]
    pc = functools.partial(partial_conjugation, sig)
    instances: List[Tuple[str, str, RelationBuilder]] = []

    # (A,b)(A,b') = (A,b'b)
    for a, j in itertools.permutations(range(n), 2):
        for b, b2 in itertools.product(range(1, groups[j].order), repeat=2):
            product = groups[j].table[b2][b]

            def build_product(a=a, j=j, b=b, b2=b2, p=product) -> Tuple[Automorphism, Automorphism]:
                return composer(pc(a, j, b), pc(a, j, b2)), pc(a, j, p)

            instances.append(("product", f"A={a} B={j} b={b} b'={b2}", build_product))

    # (A,b)(C,d) = (C,d)(A,b) for A ≠ C, b ∉ C, d ∉ A
    for a, c in itertools.permutations(range(n), 2):
        for jb in range(n):
            if jb in (a, c):
                continue
            for jd in range(n):
                if jd in (a, c):
                    continue
                pairs = itertools.product(range(1, groups[jb].order), range(1, groups[jd].order))
                for b, d in pairs:
                    def build(
                        a=a, c=c, jb=jb, jd=jd, b=b, d=d
                    ) -> Tuple[Automorphism, Automorphism]:
                        x, y = pc(a, jb, b), pc(c, jd, d)
                        return composer(x, y), composer(y, x)

                    instances.append(("commute", f"A={a} b={jb}.{b} C={c} d={jd}.{d}", build))

    # [(A,b)(C,b), (A,c)] = 1 for A, B, C distinct, b ∈ B, c ∈ C
    for a, jb, c in itertools.permutations(range(n), 3):
        for b, cc in itertools.product(range(1, groups[jb].order), range(1, groups[c].order)):
            def build3(a=a, jb=jb, c=c, b=b, cc=cc) -> Tuple[Automorphism, Automorphism]:
                x = composer(pc(a, jb, b), pc(c, jb, b))
                y = pc(a, c, cc)
                return composer(x, y), composer(y, x)

            instances.append(("triple", f"A={a} B={jb} C={c} b={b} c={cc}", build3))

    # φ⁻¹(A,b)φ = (Aφ, bφ) for factor and transposition automorphisms φ
    phis: List[Tuple[str, AtomicAut]] = []
    for i in range(n):
        for m in automorphism_group(groups[i])[1:]:
            phis.append((f"fa({i},{' '.join(map(str, m.images))})", FactorAut(i, m)))
    for i, j in itertools.combinations(range(n), 2):
        if sig.are_isomorphic(i, j):
            phis.append((f"swap({i},{j})", PermAut.transposition(sig, i, j)))
    for label, phi_atom in phis:
        for a, j in itertools.permutations(range(n), 2):
            for b in range(1, groups[j].order):
                def build_sd(phi_atom=phi_atom, a=a, j=j, b=b) -> Tuple[Automorphism, Automorphism]:
                    phi = Automorphism.from_atoms(sig, [phi_atom])
                    lhs = composer(composer(invert(phi), pc(a, j, b)), phi)
                    (ja, _), = phi_atom.letter_image(sig, a, 0)
                    (jj, bb), = phi_atom.letter_image(sig, j, b)
                    return lhs, pc(ja, jj, bb)

                instances.append(("semidirect", f"{label} A={a} b={j}.{b}", build_sd))
    return instances


def verify_relation_suite(
    sig: FreeProductSignature,
    policy: Optional[SamplePolicy] = None,
    composer: Composer = compose,
    jobs: int = 1,
) -> SuiteReport:
    """
    Check the defining relations of the partial-conjugation presentation.

    Families: ``product`` (A,b)(A,b') = (A,b'b); ``commute`` (A,b)(C,d) = (C,d)(A,b);
    ``triple`` [(A,b)(C,b),(A,c)] = 1; ``semidirect`` φ⁻¹(A,b)φ = (Aφ,bφ).

    Parameters
    ----------
    sig : FreeProductSignature
        Free product of finite groups.
    policy : Optional[SamplePolicy], default=None
        Exhaustive when None.
    composer : Composer, default=compose
        Composition used to build relation sides.
    jobs : int, default=1
        Worker threads.

    Returns
    -------
    SuiteReport
        Counts and counterexamples.
    """
    if not sig.is_finite:
        raise ValidationError("the relation suite needs finite factors")
    policy = policy or SamplePolicy()
    instances = _relation_instances(sig, composer)
    total = len(instances)
    if not policy.exhaustive and policy.samples < total:
        rng = make_rng(policy.seed)
        chosen = sorted(rng.sample(range(total), policy.samples))
        instances = [instances[k] for k in chosen]
    logger.info("relation suite on %s: %d of %d instances", sig.describe(), len(instances), total)

    def check_of(build: RelationBuilder) -> Callable[[], Optional[str]]:
        def check() -> Optional[str]:
            lhs, rhs = build()
            if equal(lhs, rhs):
                return None
            return f"lhs {format_automorphism(lhs)} differs from rhs {format_automorphism(rhs)}"

        return check

    checks: List[Check] = [(family, key, check_of(build)) for family, key, build in instances]
    details = {"signature": sig.describe(), "available": total}
    report = SuiteReport(suite="relations", details=details)
    return run_checks(report, checks, jobs=jobs)


_ATOM_PATTERNS = {
    "pc": re.compile(r"^pc\((\d+),(\d+)\.(-?\d+)\)$"),
    "tv": re.compile(r"^tv\((\d+),(\d+)\.(-?\d+)\)$"),
    "fa": re.compile(r"^fa\((\d+),([^)]*)\)$"),
    "perm": re.compile(r"^perm\(((?:\([^()]*\))*)\)$"),
    "inn": re.compile(r"^inn\((\d+),(\d+)\)$"),
}


def _parse_atom(text: str, sig: FreeProductSignature) -> AtomicAut:
    kind = text.split("(", 1)[0]
    pattern = _ATOM_PATTERNS.get(kind)
    m = pattern.match(text) if pattern else None
    if m is None:
        raise ParseError(f"cannot parse automorphism atom {text!r}")
    if kind == "pc":
        return PartialConj(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if kind == "tv":
        return Transvection(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if kind == "inn":
        return InnerFactor(int(m.group(1)), int(m.group(2)))
    if kind == "fa":
        i = int(m.group(1))
        args = [a for a in re.split(r"[\s,]+", m.group(2).strip()) if a]
        if i >= len(sig):
            raise ParseError(f"factor {i} out of range in {text!r}")
        spec = sig.factors[i]
        try:
            if spec.group is None:
                if len(args) != 1:
                    raise ParseError(f"expected a sign in {text!r}")
                return FactorAut(i, None, int(args[0]))
            return FactorAut(i, GroupMap(spec.group, spec.group, tuple(int(a) for a in args)))
        except ValueError as exc:
            raise ParseError(f"bad factor automorphism {text!r}: {exc}") from exc
    perm = list(range(len(sig)))
    for cycle_text in re.findall(r"\(([^()]*)\)", m.group(1)):
        cycle = [int(c) for c in re.split(r"[\s,]+", cycle_text.strip()) if c]
        if any(not 0 <= c < len(sig) for c in cycle):
            raise ParseError(f"cycle {cycle} out of range in {text!r}")
        for k, c in enumerate(cycle):
            perm[c] = cycle[(k + 1) % len(cycle)]
    return PermAut.from_permutation(sig, perm)


def parse_automorphism(text: str, sig: FreeProductSignature) -> Automorphism:
    """
    Parse ";"-separated atoms: ``pc(A,j.e)``, ``tv(i,j.e)``, ``fa(i,images)``,
    ``perm(cycles)`` and ``inn(i,e)``. Empty text is the identity.

    Raises
    ------
    ParseError
        On malformed atoms.
    ValidationError
        On atoms that are invalid for ``sig``.
    """
    atoms = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if not part.startswith(("fa(", "perm(")):
            part = re.sub(r"\s+", "", part)
        atoms.append(_parse_atom(part, sig))
    return Automorphism.from_atoms(sig, atoms)


def format_automorphism(alpha: Automorphism) -> str:
    return ";".join(a.to_text() for a in alpha.atoms)

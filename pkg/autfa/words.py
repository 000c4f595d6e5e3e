"""Reduced words in free products of finite and infinite cyclic groups."""

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from autfa.errors import BadLetter, IndexOutOfRange, ParseError, SignatureMismatch, ValidationError
from autfa.groups import FiniteGroup, GroupMap, find_isomorphism

Syllable = Tuple[int, int]


@dataclass(frozen=True)
class FactorSpec:
    """
    One free factor: a finite group, or the infinite cyclic group when ``group`` is None.

    Letters of a finite factor are element indices; letters of the infinite cyclic
    factor are integer exponents.
    """

    group: Optional[FiniteGroup] = None

    @property
    def is_infinite_cyclic(self) -> bool:
        return self.group is None

    @property
    def name(self) -> str:
        return "Z" if self.group is None else self.group.name

    def validate(self, letter: int) -> bool:
        if self.group is None:
            return isinstance(letter, int)
        return isinstance(letter, int) and 0 <= letter < self.group.order

    def multiply(self, x: int, y: int) -> int:
        if self.group is None:
            return x + y
        return self.group.table[x][y]

    def invert(self, x: int) -> int:
        if self.group is None:
            return -x
        return self.group.inverse[x]

    def nontrivial_letters(self) -> range:
        """Non-identity letters of a finite factor."""
        if self.group is None:
            raise ValidationError("the infinite cyclic factor has infinitely many letters")
        return range(1, self.group.order)


INFINITE_CYCLIC = FactorSpec()


@dataclass(frozen=True)
class FreeProductSignature:
    """
    The factor list of a free product ``G_1 * ... * G_k * F_r``.

    Attributes
    ----------
    factors : Tuple[FactorSpec, ...]
        Ordered free factors.
    degenerate : bool
        Allow fewer than two factors (quotient outputs only).
    """

    factors: Tuple[FactorSpec, ...]
    degenerate: bool = False

    def __post_init__(self) -> None:
        """Normalize factors and check the factor count."""
        factors = tuple(
            f if isinstance(f, FactorSpec) else FactorSpec(f) for f in self.factors
        )
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise ValidationError("a free product needs at least one factor")
        if len(factors) < 2 and not self.degenerate:
            raise ValidationError("a free product needs at least two factors")

    @classmethod
    def of(
        cls, *factors: Union[FiniteGroup, FactorSpec, str], degenerate: bool = False
    ) -> "FreeProductSignature":
        """Build a signature from groups, FactorSpecs or the string ``"Z"``."""
        specs = []
        for f in factors:
            if isinstance(f, FactorSpec):
                specs.append(f)
            elif isinstance(f, FiniteGroup):
                specs.append(FactorSpec(f))
            elif f == "Z":
                specs.append(INFINITE_CYCLIC)
            else:
                raise ValidationError(f"unknown factor {f!r}")
        return cls(tuple(specs), degenerate=degenerate)

    def __len__(self) -> int:
        return len(self.factors)

    def factor(self, i: int) -> FactorSpec:
        if not 0 <= i < len(self.factors):
            raise IndexOutOfRange(f"factor index {i} outside 0..{len(self.factors) - 1}")
        return self.factors[i]

    def group(self, i: int) -> FiniteGroup:
        """The finite group of factor ``i``."""
        spec = self.factor(i)
        if spec.group is None:
            raise ValidationError(f"factor {i} is infinite cyclic")
        return spec.group

    @property
    def is_finite(self) -> bool:
        """True when no factor is infinite cyclic."""
        return all(not f.is_infinite_cyclic for f in self.factors)

    def describe(self) -> str:
        return "*".join(f.name for f in self.factors)

    @cached_property
    def isomorphism_classes(self) -> Tuple[Tuple[int, ...], ...]:
        """Factor indices grouped by isomorphism type, in order of first appearance."""
        classes: List[List[int]] = []
        for i, spec in enumerate(self.factors):
            for cls_ in classes:
                other = self.factors[cls_[0]]
                if spec.is_infinite_cyclic and other.is_infinite_cyclic:
                    cls_.append(i)
                    break
                if (
                    spec.group is not None
                    and other.group is not None
                    and find_isomorphism(other.group, spec.group) is not None
                ):
                    cls_.append(i)
                    break
            else:
                classes.append([i])
        return tuple(tuple(c) for c in classes)

    @cached_property
    def reference_isomorphisms(self) -> Dict[int, GroupMap]:
        """For each finite factor i, a fixed isomorphism from its class representative to G_i."""
        refs: Dict[int, GroupMap] = {}
        for cls_ in self.isomorphism_classes:
            rep = self.factors[cls_[0]].group
            if rep is None:
                continue
            for i in cls_:
                target = self.factors[i].group
                assert target is not None
                iso = find_isomorphism(rep, target)
                assert iso is not None
                refs[i] = iso
        return refs

    def are_isomorphic(self, i: int, j: int) -> bool:
        return any(i in c and j in c for c in self.isomorphism_classes)

    def canonical_isomorphism(self, i: int, j: int) -> Optional[GroupMap]:
        """
        The compatible isomorphism ``G_i -> G_j``.

        Returns None for two infinite cyclic factors (the identity on exponents).

        Raises
        ------
        ValidationError
            If the factors are not isomorphic.
        """
        if not self.are_isomorphic(i, j):
            raise ValidationError(f"factors {i} and {j} are not isomorphic")
        if self.factor(i).is_infinite_cyclic:
            return None
        refs = self.reference_isomorphisms
        return refs[i].inverse().then(refs[j])


def _check_syllables(sig: FreeProductSignature, syllables: Sequence[Syllable]) -> None:
    previous = -1
    for i, x in syllables:
        spec = sig.factor(i)
        if not spec.validate(x) or x == 0:
            raise BadLetter(i, x)
        if i == previous:
            raise ValidationError(f"adjacent syllables in factor {i}: word is not reduced")
        previous = i


@dataclass(frozen=True)
class Word:
    """
    An element of a free product in reduced alternating normal form.

    Attributes
    ----------
    signature : FreeProductSignature
        The free product.
    syllables : Tuple[Tuple[int, int], ...]
        ``(factor_index, letter)`` pairs; empty for the identity.
    """

    signature: FreeProductSignature = field(repr=False, hash=False)
    syllables: Tuple[Syllable, ...] = ()

    def __post_init__(self) -> None:
        """Validate the normal form."""
        syllables = tuple((int(i), int(x)) for i, x in self.syllables)
        object.__setattr__(self, "syllables", syllables)
        _check_syllables(self.signature, syllables)

    @classmethod
    def identity(cls, sig: FreeProductSignature) -> "Word":
        return cls(sig, ())

    @classmethod
    def letter(cls, sig: FreeProductSignature, factor: int, x: int) -> "Word":
        """The one-syllable word ``x`` in factor ``factor`` (identity when ``x`` is trivial)."""
        return normalize([(factor, x)], sig)

    def __len__(self) -> int:
        return len(self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def is_identity(self) -> bool:
        return not self.syllables


def normalize(raw: Iterable[Syllable], sig: FreeProductSignature) -> Word:
    """
    Reduce a raw syllable list to normal form.

    Adjacent syllables of the same factor are multiplied together and identity
    letters are dropped; one stack pass reaches the fixpoint.

    Parameters
    ----------
    raw : Iterable[Tuple[int, int]]
        Syllables in any form.
    sig : FreeProductSignature
        The free product.

    Returns
    -------
    Word
        The reduced word.

    Raises
    ------
    BadLetter
        If a letter is invalid for its factor or the factor index is unknown.
    """
    stack: List[Syllable] = []
    for i, x in raw:
        if not 0 <= i < len(sig.factors):
            raise BadLetter(i, x)
        spec = sig.factors[i]
        if not spec.validate(x):
            raise BadLetter(i, x)
        if x == 0:
            continue
        if stack and stack[-1][0] == i:
            merged = spec.multiply(stack[-1][1], x)
            if merged == 0:
                stack.pop()
            else:
                stack[-1] = (i, merged)
        else:
            stack.append((i, x))
    return Word(sig, tuple(stack))


def _same_signature(u: Word, v: Word) -> None:
    if u.signature is not v.signature and u.signature != v.signature:
        raise SignatureMismatch(
            f"words over {u.signature.describe()} and {v.signature.describe()}"
        )


def multiply(u: Word, v: Word) -> Word:
    _same_signature(u, v)
    return normalize(u.syllables + v.syllables, u.signature)


def invert(u: Word) -> Word:
    sig = u.signature
    return Word(sig, tuple((i, sig.factors[i].invert(x)) for i, x in reversed(u.syllables)))


def conjugate(u: Word, g: Word) -> Word:
    """Return ``g⁻¹·u·g``."""
    _same_signature(u, g)
    return normalize(invert(g).syllables + u.syllables + g.syllables, u.signature)


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word, meaningful up to rotation."""

    word: Word

    def __post_init__(self) -> None:
        """Check cyclic reduction."""
        syl = self.word.syllables
        if len(syl) >= 2 and syl[0][0] == syl[-1][0]:
            raise ValidationError("first and last syllables share a factor")

    @property
    def syllables(self) -> Tuple[Syllable, ...]:
        return self.word.syllables

    def __len__(self) -> int:
        return len(self.word)

    def rotations(self) -> List[Tuple[Syllable, ...]]:
        syl = self.syllables
        return [syl[k:] + syl[:k] for k in range(len(syl))] or [()]

    def canonical_key(self) -> Tuple[Syllable, ...]:
        """Lexicographically least rotation."""
        return min(self.rotations())


def cyclically_reduce(u: Word) -> Tuple[CyclicWord, Word]:
    """
    Cyclically reduce a word.

    Returns
    -------
    Tuple[CyclicWord, Word]
        ``(c, h)`` with ``u = h⁻¹·c·h``.
    """
    sig = u.signature
    syl = list(u.syllables)
    prefix: List[Syllable] = []
    while len(syl) >= 2 and syl[0][0] == syl[-1][0]:
        i, x = syl[0]
        y = syl[-1][1]
        merged = sig.factors[i].multiply(y, x)
        mid = syl[1:-1]
        syl = ([(i, merged)] if merged != 0 else []) + mid
        # u = h⁻¹ (x·mid·y) h = (y·h)⁻¹ ((y·x)·mid) (y·h)
        prefix.insert(0, (i, y))
    return CyclicWord(Word(sig, tuple(syl))), normalize(prefix, sig)


def syllable_length(u: Union[Word, CyclicWord]) -> int:
    return len(u.syllables)


def exponent_sum(u: Word) -> int:
    """Sum of absolute exponents of infinite cyclic syllables after cyclic reduction."""
    c, _ = cyclically_reduce(u)
    sig = u.signature
    return sum(abs(x) for i, x in c.syllables if sig.factors[i].is_infinite_cyclic)


def are_conjugate(u: Word, v: Word) -> bool:
    """Decide conjugacy of two words."""
    _same_signature(u, v)
    cu, _ = cyclically_reduce(u)
    cv, _ = cyclically_reduce(v)
    if len(cu) != len(cv):
        return False
    if len(cu) <= 1:
        if not cu.syllables:
            return True
        (i, x), (j, y) = cu.syllables[0], cv.syllables[0]
        if i != j:
            return False
        spec = u.signature.factors[i]
        if spec.group is None:
            return x == y
        return any(spec.group.conjugate(x, k) == y for k in spec.group.elements())
    return cu.canonical_key() == cv.canonical_key()


_FINITE_TOKEN = re.compile(r"^f(\d+)\.(\d+)$")
_CYCLIC_TOKEN = re.compile(r"^x(\d+)\^([+-]?\d+)$")


def parse_word(text: str, sig: FreeProductSignature) -> Word:
    """
    Parse word text: ``f<i>.<e>`` finite syllables and ``x<i>^<n>`` cyclic syllables.

    Raises
    ------
    ParseError
        On a malformed token or a token of the wrong kind for its factor.
    """
    raw: List[Syllable] = []
    for token in text.split():
        m = _FINITE_TOKEN.match(token)
        if m:
            i, x = int(m.group(1)), int(m.group(2))
            if i >= len(sig) or sig.factors[i].is_infinite_cyclic:
                raise ParseError(f"token {token!r}: factor {i} is not a finite factor")
            raw.append((i, x))
            continue
        m = _CYCLIC_TOKEN.match(token)
        if m:
            i, n = int(m.group(1)), int(m.group(2))
            if i >= len(sig) or not sig.factors[i].is_infinite_cyclic:
                raise ParseError(f"token {token!r}: factor {i} is not infinite cyclic")
            if n == 0:
                raise ParseError(f"token {token!r}: zero exponent")
            raw.append((i, n))
            continue
        raise ParseError(f"cannot parse word token {token!r}")
    return normalize(raw, sig)


def format_word(u: Word) -> str:
    sig = u.signature
    return " ".join(
        f"x{i}^{x}" if sig.factors[i].is_infinite_cyclic else f"f{i}.{x}" for i, x in u.syllables
    )

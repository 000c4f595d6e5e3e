"""Seeded random words and automorphisms for the suites and the tests."""

import random
from typing import List, Optional

from autfa.automorphisms import (
    AtomicAut,
    Automorphism,
    FactorAut,
    PartialConj,
    PermAut,
    Transvection,
)
from autfa.groups import automorphism_group
from autfa.words import FreeProductSignature, Syllable, Word, normalize

MAX_RANDOM_EXPONENT = 3


def random_letter(sig: FreeProductSignature, factor: int, rng: random.Random) -> int:
    """A uniformly chosen non-identity letter; exponents lie in ±1..±3 for Z factors."""
    group = sig.factors[factor].group
    if group is None:
        return rng.choice([n for n in range(-MAX_RANDOM_EXPONENT, MAX_RANDOM_EXPONENT + 1) if n])
    return rng.randrange(1, group.order)


def random_word(
    sig: FreeProductSignature,
    max_length: int,
    rng: random.Random,
    min_length: int = 0,
    cyclic: bool = False,
) -> Word:
    """
    A random reduced word.

    Parameters
    ----------
    sig : FreeProductSignature
        The free product.
    max_length : int
        Largest syllable length.
    rng : random.Random
        Source of randomness.
    min_length : int, default=0
        Smallest syllable length.
    cyclic : bool, default=False
        Also make first and last syllables differ in factor.

    Returns
    -------
    Word
        A word of syllable length in ``[min_length, max_length]``.
    """
    length = rng.randint(min_length, max_length)
    n = len(sig)
    syllables: List[Syllable] = []
    previous: Optional[int] = None
    for k in range(length):
        choices = [i for i in range(n) if i != previous]
        if cyclic and k == length - 1 and length > 1:
            choices = [i for i in choices if i != syllables[0][0]] or choices
        factor = rng.choice(choices)
        syllables.append((factor, random_letter(sig, factor, rng)))
        previous = factor
    return normalize(syllables, sig)


def random_atom(sig: FreeProductSignature, rng: random.Random) -> AtomicAut:
    """A random generator: partial conjugation, factor automorphism, permutation or transvection."""
    n = len(sig)
    kinds = ["pc", "fa"]
    if any(len(c) > 1 for c in sig.isomorphism_classes):
        kinds.append("perm")
    cyclic = [i for i, f in enumerate(sig.factors) if f.is_infinite_cyclic]
    if cyclic:
        kinds.append("tv")
    kind = rng.choice(kinds)
    if kind == "pc":
        target, conjugator = rng.sample(range(n), 2)
        return PartialConj(target, conjugator, random_letter(sig, conjugator, rng))
    if kind == "fa":
        i = rng.randrange(n)
        group = sig.factors[i].group
        if group is None:
            return FactorAut(i, None, -1)
        return FactorAut(i, rng.choice(automorphism_group(group)))
    if kind == "perm":
        cls_ = rng.choice([c for c in sig.isomorphism_classes if len(c) > 1])
        i, j = rng.sample(list(cls_), 2)
        return PermAut.transposition(sig, i, j)
    i = rng.choice(cyclic)
    j = rng.choice([k for k in range(n) if k != i])
    return Transvection(i, j, random_letter(sig, j, rng))


def random_automorphism(sig: FreeProductSignature, atoms: int, rng: random.Random) -> Automorphism:
    return Automorphism.from_atoms(sig, [random_atom(sig, rng) for _ in range(atoms)])

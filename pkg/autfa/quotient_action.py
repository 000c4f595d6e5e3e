"""
Characteristic quotients and automorphism actions on Bass-Serre trees.

Covers the quotient onto the free product of the surviving factors, the
length-invariance suites for two-factor products, the presentation of the
outer automorphism group of a product of three isomorphic factors, the
geometry of the tripod tree, and the isometry an automorphism induces on a
tree when it preserves translation length.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from autfa.automorphisms import (
    AtomicAut,
    Automorphism,
    FactorAut,
    InnerFactor,
    InnerStatus,
    PartialConj,
    PermAut,
    Transvection,
    commutator,
    compose,
    equal,
    inner_automorphism,
    invert,
    is_inner,
    partial_conjugation,
)
from autfa.bstree import (
    Ball,
    TreeVertex,
    act,
    build_ball,
    distance,
    fixed_set,
    geodesic,
    neighbors,
    translation_length_adaptive,
)
from autfa.config import (
    DEFAULT_EQUIVARIANCE_RADIUS,
    DEFAULT_INNER_BOUND,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
)
from autfa.errors import (
    NotProjectable,
    StabilizerAmbiguity,
    TooFewFactors,
    UndecidedInner,
    ValidationError,
)
from autfa.gog import FreeProductRealisation, Loop, Shape, free_product_as_gog, translation_length
from autfa.groups import FiniteGroup, GroupMap, automorphism_group
from autfa.reports import SuiteReport
from autfa.sampling import random_word
from autfa.utils import Check, make_rng, run_checks
from autfa.words import FreeProductSignature, Word, cyclically_reduce, exponent_sum, normalize

logger = logging.getLogger(__name__)

# (family, label, automorphism)
Generator = Tuple[str, str, Automorphism]
RelationBuilder = Callable[[], Tuple[Automorphism, Automorphism]]


@dataclass(frozen=True)
class CharacteristicQuotient:
    """
    The quotient of a free product by the normal closure of some of its factors.

    Attributes
    ----------
    source : FreeProductSignature
        The free product G.
    killed : FrozenSet[int]
        Factors generating the normal subgroup N.
    target : FreeProductSignature
        G/N, the free product of the surviving factors.
    index_map : Tuple[Optional[int], ...]
        Position of each source factor in the target, None when killed.
    restricted : bool
        True when N is only invariant under partial conjugations and factor
        automorphisms, not under all of Aut(G).
    """

    source: FreeProductSignature
    killed: FrozenSet[int]
    target: FreeProductSignature
    index_map: Tuple[Optional[int], ...]
    restricted: bool = False

    @property
    def kept(self) -> Tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.index_map) if j is not None)


def characteristic_quotient(
    sig: FreeProductSignature, killed: Iterable[int], restricted: bool = False
) -> CharacteristicQuotient:
    """
    Build G/N for N the normal closure of the ``killed`` factors.

    Parameters
    ----------
    sig : FreeProductSignature
        The free product.
    killed : Iterable[int]
        Factor indices to kill.
    restricted : bool, default=False
        Allow a killed set that is not a union of isomorphism classes. Only the
        subgroup generated by partial conjugations and factor automorphisms
        then descends to the quotient.

    Returns
    -------
    CharacteristicQuotient
        The quotient data.

    Raises
    ------
    ValidationError
        If nothing survives, or (unrestricted) the killed set splits an
        isomorphism class.
    IndexOutOfRange
        If a killed index is not a factor.
    """
    killed_set = frozenset(int(i) for i in killed)
    for i in killed_set:
        sig.factor(i)
    if not restricted:
        for cls_ in sig.isomorphism_classes:
            members = set(cls_)
            if members & killed_set and not members <= killed_set:
                raise ValidationError(
                    f"killed factors {sorted(killed_set)} split the class {sorted(members)}"
                )
    kept = [i for i in range(len(sig)) if i not in killed_set]
    if not kept:
        raise ValidationError("the quotient would be trivial")
    index_map = tuple(kept.index(i) if i in kept else None for i in range(len(sig)))
    target = FreeProductSignature(
        tuple(sig.factors[i] for i in kept), degenerate=len(kept) < 2
    )
    logger.debug("quotient of %s onto %s", sig.describe(), target.describe())
    return CharacteristicQuotient(sig, killed_set, target, index_map, restricted)


def quotient_word(q: CharacteristicQuotient, w: Word) -> Word:
    """Delete killed syllables, renumber the rest and reduce."""
    if w.signature != q.source:
        raise ValidationError("word is not over the quotient's source")
    raw = []
    for i, x in w.syllables:
        j = q.index_map[i]
        if j is not None:
            raw.append((j, x))
    return normalize(raw, q.target)


def _quotient_atom(q: CharacteristicQuotient, atom: AtomicAut) -> Optional[AtomicAut]:
    """Image of one atom, None for the identity."""
    m = q.index_map
    if isinstance(atom, FactorAut):
        j = m[atom.factor]
        return None if j is None else FactorAut(j, atom.mapping, atom.sign)
    if isinstance(atom, InnerFactor):
        j = m[atom.factor]
        return None if j is None else InnerFactor(j, atom.element)
    if isinstance(atom, PartialConj):
        a, b = m[atom.target], m[atom.conjugator]
        return None if a is None or b is None else PartialConj(a, b, atom.element)
    if isinstance(atom, Transvection):
        a, b = m[atom.factor], m[atom.other]
        return None if a is None or b is None else Transvection(a, b, atom.element)
    if isinstance(atom, PermAut):
        n = len(q.target)
        perm = list(range(n))
        isos: List[Optional[GroupMap]] = [None] * n
        for i, j in enumerate(atom.permutation):
            mi, mj = m[i], m[j]
            if (mi is None) != (mj is None):
                raise NotProjectable(f"{atom.to_text()} moves factor {i} across the killed set")
            if mi is not None and mj is not None:
                perm[mi] = mj
                isos[mi] = atom.isomorphisms[i]
        if perm == list(range(n)):
            return None
        return PermAut(tuple(perm), tuple(isos))
    raise NotProjectable(f"no quotient rule for {atom.to_text()}")


def quotient_aut(q: CharacteristicQuotient, alpha: Automorphism) -> Automorphism:
    """
    The automorphism of G/N induced by ``alpha``, generator by generator.

    Atoms touching a killed factor become the identity.

    Raises
    ------
    NotProjectable
        If a permutation moves a killed factor onto a kept one, or a
        restricted quotient meets a permutation or a transvection.
    """
    if alpha.signature != q.source:
        raise ValidationError("automorphism is not of the quotient's source")
    atoms: List[AtomicAut] = []
    for atom in alpha.atoms:
        if q.restricted and isinstance(atom, (PermAut, Transvection)):
            raise NotProjectable(f"{atom.to_text()} does not descend to this quotient")
        image = _quotient_atom(q, atom)
        if image is not None:
            atoms.append(image)
    return Automorphism.from_atoms(q.target, atoms)


def check_induced(q: CharacteristicQuotient, alpha: Automorphism) -> Optional[str]:
    """
    Check that the induced automorphism commutes with the quotient map on every letter.

    Returns
    -------
    Optional[str]
        None on success, else a description of the first mismatching letter.
    """
    induced = quotient_aut(q, alpha)
    for i, spec in enumerate(q.source.factors):
        letters = [1] if spec.group is None else list(spec.nontrivial_letters())
        for x in letters:
            letter = Word.letter(q.source, i, x)
            lhs = quotient_word(q, alpha(letter))
            rhs = induced(quotient_word(q, letter))
            if lhs != rhs:
                return f"letter {i}.{x}: quotient of the image is {lhs}, induced image is {rhs}"
    return None


def no_prop_T_quotient(
    sig: FreeProductSignature, keep: Tuple[int, int] = (0, 1)
) -> CharacteristicQuotient:
    """
    Quotient by the normal closure of all but two factors.

    Raises
    ------
    TooFewFactors
        With fewer than three factors.
    """
    if len(sig) < 3:
        raise TooFewFactors(f"need at least three factors, got {len(sig)}")
    a, b = keep
    if a == b:
        raise ValidationError("keep two different factors")
    sig.factor(a)
    sig.factor(b)
    killed = [i for i in range(len(sig)) if i not in (a, b)]
    return characteristic_quotient(sig, killed, restricted=True)


def _letters(sig: FreeProductSignature, j: int) -> List[int]:
    spec = sig.factors[j]
    return [1, -1] if spec.group is None else list(spec.nontrivial_letters())


def _partial_conjugation_generators(sig: FreeProductSignature) -> List[Generator]:
    gens = []
    for a, j in itertools.permutations(range(len(sig)), 2):
        for b in _letters(sig, j):
            gens.append(("pc", f"pc({a},{j}.{b})", partial_conjugation(sig, a, j, b)))
    return gens


def _factor_generators(sig: FreeProductSignature) -> List[Generator]:
    gens = []
    for i, spec in enumerate(sig.factors):
        if spec.group is None:
            atom = FactorAut(i, None, -1)
            gens.append(("factor", atom.to_text(), Automorphism.from_atoms(sig, [atom])))
            continue
        for m in automorphism_group(spec.group)[1:]:
            atom = FactorAut(i, m)
            gens.append(("factor", atom.to_text(), Automorphism.from_atoms(sig, [atom])))
    return gens


def no_prop_T_generator_images(
    q: CharacteristicQuotient, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED
) -> SuiteReport:
    """
    Check the image of every generator of the subgroup that descends to ``q``.

    Families: ``pc`` and ``factor`` compare each image with its expected
    value (the identity when a killed factor is involved); ``induced`` checks
    the quotient map commutes with each generator; ``functorial`` checks random
    generator pairs map to the composite of their images.
    """
    sig = q.source
    report = SuiteReport(
        suite="no-prop-T",
        details={
            "source": sig.describe(),
            "target": q.target.describe(),
            "killed": sorted(q.killed),
        },
    )
    gens = _partial_conjugation_generators(sig) + _factor_generators(sig)
    for family, label, alpha in gens:
        expected_atom = _quotient_atom(q, alpha.atoms[0])
        expected = Automorphism.from_atoms(q.target, [expected_atom] if expected_atom else [])
        image = quotient_aut(q, alpha)
        report.record(family, label, equal(image, expected), f"image {image.to_text()!r}")
        detail = check_induced(q, alpha)
        report.record("induced", label, detail is None, detail or "")
    rng = make_rng(seed)
    for t in range(trials):
        (_, la, a), (_, lb, b) = rng.choice(gens), rng.choice(gens)
        both = compose(a, b)
        ok = equal(quotient_aut(q, both), compose(quotient_aut(q, a), quotient_aut(q, b)))
        detail = check_induced(q, both)
        report.record("functorial", f"{t:04d} {la};{lb}", ok and detail is None, detail or "")
    logger.info("%s", report.summary().splitlines()[0])
    return report


def two_factor_generators(sig: FreeProductSignature) -> List[Generator]:
    """Factor automorphisms, the swap when the factors are isomorphic, and partial conjugations."""
    if len(sig) != 2 or not sig.is_finite:
        raise ValidationError("two-factor generators need exactly two finite factors")
    gens = _factor_generators(sig)
    if sig.are_isomorphic(0, 1):
        swap = PermAut.transposition(sig, 0, 1)
        gens.append(("swap", swap.to_text(), Automorphism.from_atoms(sig, [swap])))
    return gens + _partial_conjugation_generators(sig)


def invariance_suite_two_factors(
    h: FiniteGroup,
    k: FiniteGroup,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    max_length: int = 10,
    jobs: int = 1,
) -> SuiteReport:
    """
    Check every generator of Aut(H*K) preserves translation length on the single-edge tree.

    Each generator is applied to the same ``trials`` random words; the
    translation lengths of the word and its image are read off the embedded
    loops and compared with each other and with the cyclic-length formula.
    Elliptic words must stay elliptic.

    Parameters
    ----------
    h, k : FiniteGroup
        The two factors.
    trials : int, default=DEFAULT_TRIALS
        Random words per generator.
    seed : int, default=DEFAULT_SEED
        Random seed.
    max_length : int, default=10
        Longest random word in syllables.
    jobs : int, default=1
        Worker threads.

    Returns
    -------
    SuiteReport
        Report named ``two-factors``; families ``factor``, ``swap`` and ``pc``.
    """
    sig = FreeProductSignature.of(h, k)
    realisation = free_product_as_gog(sig, Shape.SINGLE_EDGE)
    rng = make_rng(seed)
    words = [random_word(sig, max_length, rng) for _ in range(trials)]

    def check_of(alpha: Automorphism, w: Word) -> Callable[[], Optional[str]]:
        def check() -> Optional[str]:
            before = translation_length(realisation.embed(w))
            image = alpha(w)
            after = translation_length(realisation.embed(image))
            if before != after:
                return f"{w} has length {before} but its image {image} has length {after}"
            if after != realisation.expected_translation_length(image):
                return f"loop length {after} of {image} differs from the word formula"
            return None

        return check

    checks: List[Check] = [
        (family, f"{label} w{t:04d}", check_of(alpha, w))
        for family, label, alpha in two_factor_generators(sig)
        for t, w in enumerate(words)
    ]
    details = {"signature": sig.describe(), "words": trials}
    report = SuiteReport(suite="two-factors", details=details)
    return run_checks(report, checks, jobs=jobs)


def h_z_generators(sig: FreeProductSignature) -> List[Generator]:
    """Factor automorphisms, inversion, transvections and partial conjugations of H*Z."""
    if len(sig) != 2 or sig.factors[0].is_infinite_cyclic or not sig.factors[1].is_infinite_cyclic:
        raise ValidationError("expected a finite factor followed by Z")
    gens = _factor_generators(sig)
    for x in sig.factors[0].nontrivial_letters():
        tv = Transvection(1, 0, x)
        gens.append(("transvection", tv.to_text(), Automorphism.from_atoms(sig, [tv])))
    return gens + _partial_conjugation_generators(sig)


def invariance_suite_H_Z(
    h: FiniteGroup,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    max_length: int = 10,
    jobs: int = 1,
) -> SuiteReport:
    """
    Check every generator of Aut(H*Z) preserves the absolute exponent sum.

    The exponent sum of each image is also compared with its translation
    length on the one-vertex loop graph.

    Returns
    -------
    SuiteReport
        Report named ``hz``; families ``factor``, ``transvection`` and ``pc``.
    """
    sig = FreeProductSignature.of(h, "Z")
    realisation = free_product_as_gog(sig, Shape.LOOP_FOR_Z)
    rng = make_rng(seed)
    words = [random_word(sig, max_length, rng) for _ in range(trials)]

    def check_of(alpha: Automorphism, w: Word) -> Callable[[], Optional[str]]:
        def check() -> Optional[str]:
            image = alpha(w)
            before, after = exponent_sum(w), exponent_sum(image)
            if before != after:
                return f"{w} has exponent sum {before} but its image {image} has {after}"
            length = translation_length(realisation.embed(image))
            if length != after:
                return f"loop length {length} of {image} differs from exponent sum {after}"
            return None

        return check

    checks: List[Check] = [
        (family, f"{label} w{t:04d}", check_of(alpha, w))
        for family, label, alpha in h_z_generators(sig)
        for t, w in enumerate(words)
    ]
    report = SuiteReport(suite="hz", details={"signature": sig.describe(), "words": trials})
    return run_checks(report, checks, jobs=jobs)


# partial conjugations (A,c), (B,a), (C,b) are not among the Out generators
ELIMINATED = ((0, 2), (1, 0), (2, 1))


def substitute_eliminated(
    sig: FreeProductSignature, target: int, conjugator: int, z: int
) -> List[AtomicAut]:
    """
    Rewrite a partial conjugation in terms of the kept generators, modulo Inn.

    (X,z) with z in factor Z becomes γ_Z(z⁻¹)(Y,z⁻¹), Y the third factor.
    """
    if (target, conjugator) not in ELIMINATED:
        return [PartialConj(target, conjugator, z)]
    z_inv = sig.group(conjugator).inverse[z]
    third = 3 - target - conjugator
    return [InnerFactor(conjugator, z_inv), PartialConj(third, conjugator, z_inv)]


def out_relations(sig: FreeProductSignature) -> List[Tuple[str, str, RelationBuilder]]:
    """
    Relation instances of the Out presentation for A*A*A, as (family, key, builder).

    Each builder returns two automorphisms that must agree modulo inner
    automorphisms.
    """
    a = sig.group(0)
    nontrivial = range(1, a.order)
    auts = automorphism_group(a)
    iso = sig.canonical_isomorphism
    kept = ((0, 1), (1, 2), (2, 0))

    def build(atoms: List[AtomicAut]) -> Automorphism:
        return Automorphism.from_atoms(sig, atoms)

    def pc(t: int, j: int, y: int) -> Automorphism:
        return partial_conjugation(sig, t, j, y)

    def conj(s: Automorphism, x: Automorphism) -> Automorphism:
        return compose(compose(invert(s), x), s)

    sigma12 = PermAut.from_permutation(sig, (1, 0, 2))
    sigma123 = PermAut.from_permutation(sig, (1, 2, 0))
    s12, s123 = build([sigma12]), build([sigma123])
    identity = build([])
    out: List[Tuple[str, str, RelationBuilder]] = []

    for t, j in kept:
        for y, y2 in itertools.product(nontrivial, repeat=2):
            p = a.table[y2][y]
            out.append((
                "product",
                f"({t},{j}) y={y} y'={y2}",
                lambda t=t, j=j, y=y, y2=y2, p=p: (compose(pc(t, j, y), pc(t, j, y2)), pc(t, j, p)),
            ))

    for i in range(3):
        for m1, m2 in itertools.product(auts, repeat=2):
            def fa_product(i=i, m1=m1, m2=m2) -> Tuple[Automorphism, Automorphism]:
                merged = FactorAut(i, m1.then(m2))
                return build([FactorAut(i, m1), FactorAut(i, m2)]), build([merged])

            out.append(("factor-products", f"{i} {m1.images}{m2.images}", fa_product))
    for i, k in itertools.combinations(range(3), 2):
        for m1, m2 in itertools.product(auts[1:], repeat=2):
            def fa_commute(i=i, k=k, m1=m1, m2=m2) -> Tuple[Automorphism, Automorphism]:
                x, y = FactorAut(i, m1), FactorAut(k, m2)
                return build([x, y]), build([y, x])

            out.append(("factor-products", f"{i}x{k} {m1.images}{m2.images}", fa_commute))

    out.append(("s3", "sigma123^3", lambda: (build([sigma123] * 3), identity)))
    out.append(("s3", "sigma12^2", lambda: (build([sigma12] * 2), identity)))
    out.append(("s3", "(sigma123 sigma12)^2", lambda: (build([sigma123, sigma12] * 2), identity)))

    for i in range(3):
        for m in auts[1:]:
            for t, j in kept:
                for y in nontrivial:
                    def fa_conj(i=i, m=m, t=t, j=j, y=y) -> Tuple[Automorphism, Automorphism]:
                        image = m(y) if i == j else y
                        return conj(build([FactorAut(i, m)]), pc(t, j, y)), pc(t, j, image)

                    out.append(("factor-conjugation", f"fa({i},{m.images}) ({t},{j}).{y}", fa_conj))

    for y in nontrivial:
        # σ12⁻¹(A,b)σ12 = (B,a) ≡ γ_A(a⁻¹)(C,a⁻¹)
        def rel_a(y=y) -> Tuple[Automorphism, Automorphism]:
            x_inv = a.inverse[iso(1, 0)(y)]  # type: ignore[misc]
            return conj(s12, pc(0, 1, y)), build([InnerFactor(0, x_inv), PartialConj(2, 0, x_inv)])

        # σ12⁻¹(B,c)σ12 = (A,c) ≡ γ_C(c⁻¹)(B,c⁻¹)
        def rel_b(y=y) -> Tuple[Automorphism, Automorphism]:
            y_inv = a.inverse[y]
            return conj(s12, pc(1, 2, y)), build([InnerFactor(2, y_inv), PartialConj(1, 2, y_inv)])

        # σ12⁻¹(C,a)σ12 = (C,b) ≡ γ_B(b⁻¹)(A,b⁻¹)
        def rel_c(y=y) -> Tuple[Automorphism, Automorphism]:
            x_inv = a.inverse[iso(0, 1)(y)]  # type: ignore[misc]
            return conj(s12, pc(2, 0, y)), build([InnerFactor(1, x_inv), PartialConj(0, 1, x_inv)])

        out.append(("sigma12-A", f"b={y}", rel_a))
        out.append(("sigma12-B", f"c={y}", rel_b))
        out.append(("sigma12-C", f"a={y}", rel_c))

    perm = sigma123.permutation
    for t, j in kept:
        for y in nontrivial:
            def rel_rotate(t=t, j=j, y=y) -> Tuple[Automorphism, Automorphism]:
                moved = iso(j, perm[j])(y)  # type: ignore[misc]
                return conj(s123, pc(t, j, y)), pc(perm[t], perm[j], moved)

            out.append(("sigma123", f"({t},{j}).{y}", rel_rotate))

    for label, sigma, s in (("sigma12", sigma12, s12), ("sigma123", sigma123, s123)):
        for i in range(3):
            for m in auts[1:]:
                def rel_wreath(sigma=sigma, s=s, i=i, m=m) -> Tuple[Automorphism, Automorphism]:
                    target = sigma.permutation[i]
                    forward, back = iso(i, target), iso(target, i)
                    assert forward is not None and back is not None
                    moved = FactorAut(target, back.then(m).then(forward))
                    return conj(s, build([FactorAut(i, m)])), build([moved])

                out.append(("wreath", f"{label} fa({i},{m.images})", rel_wreath))

    def substituted(t: int, j: int, z: int) -> Automorphism:
        return build(substitute_eliminated(sig, t, j, z))

    for j in range(3):
        t1, t2 = sorted(set(range(3)) - {j})
        for y, y2 in itertools.product(nontrivial, repeat=2):
            def rel_commute(t1=t1, t2=t2, j=j, y=y, y2=y2) -> Tuple[Automorphism, Automorphism]:
                return commutator(substituted(t1, j, y), substituted(t2, j, y2)), identity

            out.append(("appendix-commute", f"[({t1},{j}).{y},({t2},{j}).{y2}]", rel_commute))
    for t, jb, c in itertools.permutations(range(3), 3):
        if not any(p in ELIMINATED for p in ((t, jb), (c, jb), (t, c))):
            continue
        for y, z in itertools.product(nontrivial, repeat=2):
            def rel_triple(t=t, jb=jb, c=c, y=y, z=z) -> Tuple[Automorphism, Automorphism]:
                pair = compose(substituted(t, jb, y), substituted(c, jb, y))
                return commutator(pair, substituted(t, c, z)), identity

            key = f"[({t},{jb}).{y}({c},{jb}).{y},({t},{c}).{z}]"
            out.append(("appendix-triple", key, rel_triple))
    return out


def out_presentation_suite(
    a: FiniteGroup, bound: int = DEFAULT_INNER_BOUND, jobs: int = 1
) -> SuiteReport:
    """
    Check the presentation of Out(A*A*A) exhaustively.

    Families: ``product``, ``factor-products``, ``s3``, ``factor-conjugation``,
    ``sigma12-A``, ``sigma12-B``, ``sigma12-C``, ``sigma123``, ``wreath``,
    and the rewritten Aut relations ``appendix-commute`` and
    ``appendix-triple``, each compared modulo inner automorphisms.

    Parameters
    ----------
    a : FiniteGroup
        The repeated factor.
    bound : int, default=DEFAULT_INNER_BOUND
        Longest conjugator accepted as an inner witness.
    jobs : int, default=1
        Worker threads.

    Returns
    -------
    SuiteReport
        Report named ``out-tripod`` with the longest witness in ``details``.

    Raises
    ------
    UndecidedInner
        If some comparison needs a conjugator longer than ``bound``.
    """
    if a.order < 2:
        raise ValidationError("the factor must be nontrivial")
    sig = FreeProductSignature.of(a, a, a)
    witness_lengths: Dict[str, int] = {}

    def check_of(family: str, key: str, make: RelationBuilder) -> Callable[[], Optional[str]]:
        def check() -> Optional[str]:
            lhs, rhs = make()
            result = is_inner(compose(lhs, invert(rhs)), bound)
            if result.status is InnerStatus.UNDECIDED:
                raise UndecidedInner(bound, f"{family} {key}")
            if result.status is InnerStatus.NOT_INNER:
                return f"sides differ by a non-inner automorphism: {result.reason}"
            assert result.witness is not None
            witness_lengths[f"{family} {key}"] = len(result.witness)
            return None

        return check

    checks: List[Check] = [
        (family, key, check_of(family, key, make)) for family, key, make in out_relations(sig)
    ]
    report = SuiteReport(suite="out-tripod", details={"factor": a.name, "bound": bound})
    run_checks(report, checks, jobs=jobs)
    report.details["max_witness_length"] = max(witness_lengths.values(), default=0)
    return report


def arm_vertices(realisation: FreeProductRealisation) -> List[TreeVertex]:
    """For each factor, the tree vertex of its type on the maximal tree."""
    if realisation.shape is not Shape.STAR:
        raise ValidationError("arm vertices are defined for the star shape")
    return [
        _representative(realisation, realisation.factor_vertex[i])
        for i in range(len(realisation.signature))
    ]


def tripod_action_geometry(a: FiniteGroup, radius: int = 3) -> SuiteReport:
    """
    Check the geometry of A*A*A acting on its star tree.

    Families: ``arm-distance`` (d(vᵢ,vⱼ) = 2), ``midpoint`` (the centre lies
    midway), ``fixed`` (a nontrivial element of factor i fixes exactly vᵢ in
    the ball), ``translation`` (‖hᵢhⱼ‖ = 4 = 2·d(vᵢ,vⱼ)) and ``opposite``
    (hᵢhⱼ and hⱼhᵢ move the centre to opposite sides of it).
    """
    if a.order < 2:
        raise ValidationError("the tripod needs a nontrivial factor")
    sig = FreeProductSignature.of(a, a, a)
    realisation = free_product_as_gog(sig, Shape.STAR)
    centre = TreeVertex.root(realisation.graph, realisation.base)
    arms = arm_vertices(realisation)
    ball = build_ball(centre, radius)
    report = SuiteReport(suite="tripod-geometry", details={"factor": a.name, "radius": radius})
    for i, j in itertools.combinations(range(3), 2):
        d = distance(arms[i], arms[j])
        report.record("arm-distance", f"{i}{j}", d == 2, f"d(v{i},v{j}) = {d}")
        path = geodesic(arms[i], arms[j])
        report.record("midpoint", f"{i}{j}", len(path) == 3 and path[1] == centre)
    for i in range(3):
        for x in range(1, a.order):
            fixed = fixed_set(realisation.factor_loop(i, x), ball)
            report.record("fixed", f"{i}.{x}", fixed == {arms[i]}, f"fixes {len(fixed)} vertices")
    for i, j in itertools.permutations(range(3), 2):
        for x, y in itertools.product(range(1, a.order), repeat=2):
            hi, hj = Word.letter(sig, i, x), Word.letter(sig, j, y)
            forward = realisation.embed(hi * hj)
            backward = realisation.embed(hj * hi)
            length = translation_length_adaptive(forward)
            expected = 2 * distance(arms[i], arms[j])
            key = f"{i}.{x} {j}.{y}"
            ok = length == expected == 4
            report.record("translation", key, ok, f"length {length}, expected {expected}")
            spread = distance(act(centre, forward), act(centre, backward))
            ok = spread == 2 * length
            report.record("opposite", key, ok, f"images of the centre are {spread} apart")
    return report


def _representative(r: FreeProductRealisation, w: int) -> TreeVertex:
    return TreeVertex(r.graph, r.base, r.vertex_representative_path(w))


@dataclass(frozen=True, eq=False)
class InducedIsometry:
    """
    The tree map f with f(x·g) = f(x)·α(g) induced by a length-preserving automorphism.

    Attributes
    ----------
    realisation : FreeProductRealisation
        Realisation whose Bass-Serre tree carries the map.
    alpha : Automorphism
        The automorphism.
    anchors : Dict[int, TreeVertex]
        Image of the maximal-tree representative of each vertex type.
    """

    realisation: FreeProductRealisation = field(repr=False)
    alpha: Automorphism
    anchors: Dict[int, TreeVertex] = field(repr=False)

    def __call__(self, x: TreeVertex) -> TreeVertex:
        r = self.realisation
        w = x.type_vertex
        if w not in self.anchors:
            raise StabilizerAmbiguity(f"no anchor for vertex type {w}")
        g = r.word_of(Loop.of(r.tree_paths[w] * x.path))
        return act(self.anchors[w], r.embed(self.alpha(g)))


def induced_isometry(realisation: FreeProductRealisation, alpha: Automorphism) -> InducedIsometry:
    """
    Build the induced isometry by matching vertex stabilizers.

    A vertex whose stabilizer is a conjugate of a factor goes to the vertex
    fixed by the image of that conjugate. A vertex with trivial stabilizer
    goes to the common neighbour of the images of its neighbours.

    Raises
    ------
    StabilizerAmbiguity
        If α does not send a factor into a conjugate of a finite factor, or
        the images around a trivial-stabilizer vertex have no common neighbour.
    """
    r = realisation
    if alpha.signature != r.signature:
        raise ValidationError("automorphism is not of the realised free product")
    anchors: Dict[int, TreeVertex] = {}
    for i, w in r.factor_vertex.items():
        group = r.signature.factors[i].group
        if group is None or group.order < 2:
            raise StabilizerAmbiguity(f"factor {i} has no finite nontrivial stabilizer")
        c, h = cyclically_reduce(alpha.image(i, 1))
        if len(c) != 1 or c.syllables[0][0] not in r.factor_vertex:
            raise StabilizerAmbiguity(f"factor {i} is not sent into a conjugate of a finite factor")
        target = r.factor_vertex[c.syllables[0][0]]
        anchor = act(_representative(r, target), r.embed(h))
        for x in range(1, group.order):
            if act(anchor, r.embed(alpha.image(i, x))) != anchor:
                raise StabilizerAmbiguity(f"the image of factor {i} fixes no common vertex")
        anchors[w] = anchor
    partial = InducedIsometry(r, alpha, anchors)
    for w in range(len(r.graph.vertices)):
        if w in anchors:
            continue
        images = [partial(v) for v in neighbors(_representative(r, w)) if v.type_vertex in anchors]
        if len(images) < 2 or distance(images[0], images[1]) != 2:
            raise StabilizerAmbiguity(f"images around vertex type {w} have no common neighbour")
        centre = geodesic(images[0], images[1])[1]
        if any(distance(centre, v) != 1 for v in images):
            raise StabilizerAmbiguity(f"images around vertex type {w} have no common neighbour")
        anchors[w] = centre
    return InducedIsometry(r, alpha, anchors)


def equivariance_check(
    alpha: Automorphism,
    realisation: FreeProductRealisation,
    ball: Ball,
    samples: int = 100,
    rng: Optional[random.Random] = None,
    subdivide: bool = False,
    label: str = "",
) -> SuiteReport:
    """
    Check the isometry induced by ``alpha`` on a ball.

    Parameters
    ----------
    alpha : Automorphism
        A length-preserving automorphism.
    realisation : FreeProductRealisation
        Realisation carrying the tree.
    ball : Ball
        Ball whose vertices are mapped.
    samples : int, default=100
        Sampled (vertex, word) pairs for the equivariance and isometry checks.
    rng : Optional[random.Random], default=None
        Random source.
    subdivide : bool, default=False
        Accept edge inversions, as on the barycentric subdivision.
    label : str, default=""
        Prefix for instance keys.

    Returns
    -------
    SuiteReport
        Families ``adjacency``, ``inversion``, ``equivariant`` and
        ``isometry``. A StabilizerAmbiguity is counted in ``details["skipped"]``
        instead of failing.
    """
    rng = rng or make_rng()
    report = SuiteReport(suite="equivariance", details={"skipped": 0, "inversions": 0})
    try:
        f = induced_isometry(realisation, alpha)
    except StabilizerAmbiguity as exc:
        logger.info("skipping %s: %s", label or alpha.to_text(), exc)
        report.details["skipped"] = 1
        return report
    images = [f(u) for u in ball.vertices]
    inversions = 0
    for k, adj in enumerate(ball.adjacency):
        for j in adj:
            if k > j:
                continue
            d = distance(images[k], images[j])
            report.record("adjacency", f"{label} {k}-{j}", d == 1, f"edge sent to distance {d}")
            if images[k] == ball.vertices[j] and images[j] == ball.vertices[k]:
                inversions += 1
    report.details["inversions"] = inversions
    if inversions and not subdivide:
        report.record("inversion", label, False, f"{inversions} inverted edges need subdivision")
    sig = realisation.signature
    for t in range(samples):
        k = rng.randrange(len(ball))
        g = random_word(sig, 4, rng)
        lhs = f(act(ball.vertices[k], realisation.embed(g)))
        rhs = act(images[k], realisation.embed(alpha(g)))
        report.record("equivariant", f"{label} {t:04d}", lhs == rhs, f"vertex {k}, word {g}")
        j = rng.randrange(len(ball))
        same = distance(images[k], images[j]) == distance(ball.vertices[k], ball.vertices[j])
        report.record("isometry", f"{label} {t:04d}", same, f"vertices {k} and {j}")
    return report


def inner_action_check(realisation: FreeProductRealisation, g: Word, ball: Ball) -> Optional[str]:
    """Conjugation by ``g`` must induce the action of ``g`` itself."""
    f = induced_isometry(realisation, inner_automorphism(realisation.signature, g))
    loop = realisation.embed(g)
    for k, u in enumerate(ball.vertices):
        if f(u) != act(u, loop):
            return f"vertex {k}: induced map differs from the action of {g}"
    return None


def composition_check(
    realisation: FreeProductRealisation, alpha: Automorphism, beta: Automorphism, ball: Ball
) -> Optional[str]:
    """The map induced by α then β is f_α followed by f_β."""
    fa, fb = induced_isometry(realisation, alpha), induced_isometry(realisation, beta)
    fab = induced_isometry(realisation, compose(alpha, beta))
    for k, u in enumerate(ball.vertices):
        if fab(u) != fb(fa(u)):
            return f"vertex {k}: composite map differs"
    return None


def equivariance_suite(
    h: FiniteGroup,
    k: FiniteGroup,
    radius: int = DEFAULT_EQUIVARIANCE_RADIUS,
    samples: int = 50,
    seed: int = DEFAULT_SEED,
    pairs: int = 10,
) -> SuiteReport:
    """
    Induced isometries of every Aut(H*K) generator on the single-edge tree.

    The swap is checked with subdivision allowed. Inner automorphisms of
    random words are compared with the action of the word, and random
    generator pairs with the composite of their maps.
    """
    sig = FreeProductSignature.of(h, k)
    realisation = free_product_as_gog(sig, Shape.SINGLE_EDGE)
    ball = build_ball(TreeVertex.root(realisation.graph, realisation.base), radius)
    rng = make_rng(seed)
    gens = two_factor_generators(sig)
    report = SuiteReport(
        suite="equivariance", details={"signature": sig.describe(), "radius": radius}
    )
    skipped = inversions = 0
    for family, label, alpha in gens:
        part = equivariance_check(
            alpha, realisation, ball, samples, rng, subdivide=family == "swap", label=label
        )
        skipped += part.details["skipped"]
        inversions += part.details["inversions"]
        report = report.merge(SuiteReport(part.suite, part.instances, part.failures))
    for t in range(pairs):
        g = random_word(sig, 4, rng)
        detail = inner_action_check(realisation, g, ball)
        report.record("inner", f"{t:04d}", detail is None, detail or "")
        (_, la, a), (_, lb, b) = rng.choice(gens), rng.choice(gens)
        detail = composition_check(realisation, a, b, ball)
        report.record("composition", f"{t:04d} {la};{lb}", detail is None, detail or "")
    report.details["skipped"] = skipped
    report.details["inversions"] = inversions
    return report

"""Deciding Property (FA) for Aut of a free product from its factor multiplicities."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from autfa.config import DEFAULT_SEARCH_BOUND
from autfa.errors import BoundExceeded, TrivialProduct, UnsupportedZ, ValidationError
from autfa.groups import FiniteGroup, find_isomorphism
from autfa.words import FactorSpec

logger = logging.getLogger(__name__)


class Tristate(str, Enum):
    """A hypothesis that may be known true, known false, or unknown."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: Union["Tristate", bool, str, None]) -> "Tristate":
        if isinstance(value, Tristate):
            return value
        if value is None:
            return cls.UNKNOWN
        if isinstance(value, bool):
            return cls.TRUE if value else cls.FALSE
        try:
            return cls(str(value).lower())
        except ValueError as exc:
            raise ValidationError(f"unknown tristate value {value!r}") from exc


FLAG_NAMES = ("has_fa", "aut_has_fa", "aut_finite_abelianisation", "aut_no_increasing_union")


@dataclass(frozen=True)
class AbstractFlags:
    """
    A free factor known only through the hypotheses the decision uses.

    Attributes
    ----------
    name : str
        Display name.
    has_fa : Tristate
        The factor has Property (FA).
    aut_has_fa : Tristate
        Its automorphism group has Property (FA).
    aut_finite_abelianisation : Tristate
        Its automorphism group has finite abelianisation.
    aut_no_increasing_union : Tristate
        Its automorphism group is not a union of a properly increasing chain of subgroups.
    """

    name: str
    has_fa: Tristate = Tristate.UNKNOWN
    aut_has_fa: Tristate = Tristate.UNKNOWN
    aut_finite_abelianisation: Tristate = Tristate.UNKNOWN
    aut_no_increasing_union: Tristate = Tristate.UNKNOWN

    def __post_init__(self) -> None:
        """Normalize flag values."""
        if not self.name:
            raise ValidationError("abstract factor needs a name")
        for flag in FLAG_NAMES:
            object.__setattr__(self, flag, Tristate.of(getattr(self, flag)))

    @classmethod
    def finite(cls, name: str) -> "AbstractFlags":
        """Finite groups and their automorphism groups satisfy every hypothesis."""
        return cls(name, Tristate.TRUE, Tristate.TRUE, Tristate.TRUE, Tristate.TRUE)

    def to_dict(self) -> dict:
        data: Dict[str, str] = {"name": self.name}
        data.update({flag: getattr(self, flag).value for flag in FLAG_NAMES})
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "AbstractFlags":
        return cls(data["name"], **{flag: data.get(flag) for flag in FLAG_NAMES})


FactorKind = Union[FiniteGroup, AbstractFlags, FactorSpec]


@dataclass(frozen=True)
class FactorClassInput:
    """
    One isomorphism class of free factors and its multiplicity.

    Attributes
    ----------
    spec : FiniteGroup | AbstractFlags | FactorSpec
        A finite group, a flagged abstract group, or INFINITE_CYCLIC.
    count : int
        Number of factors in the class.
    """

    spec: FactorKind
    count: int

    def __post_init__(self) -> None:
        """Unwrap finite FactorSpecs and check the count."""
        if isinstance(self.spec, FactorSpec) and self.spec.group is not None:
            object.__setattr__(self, "spec", self.spec.group)
        if not isinstance(self.spec, (FiniteGroup, AbstractFlags, FactorSpec)):
            raise ValidationError(f"unsupported factor {self.spec!r}")
        if self.count < 1:
            raise ValidationError(f"multiplicity must be at least 1, got {self.count}")

    @property
    def is_infinite_cyclic(self) -> bool:
        return isinstance(self.spec, FactorSpec)

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def flags(self) -> AbstractFlags:
        if isinstance(self.spec, AbstractFlags):
            return self.spec
        if isinstance(self.spec, FiniteGroup):
            return AbstractFlags.finite(self.spec.name)
        raise ValidationError("the infinite cyclic factor carries no flags")


class Result(str, Enum):
    """Verdict outcomes."""

    FA = "FA"
    NOT_FA = "NotFA"
    UNKNOWN = "Unknown"

    @property
    def exit_code(self) -> int:
        return {Result.FA: 0, Result.NOT_FA: 1, Result.UNKNOWN: 2}[self]


RULES: Dict[str, str] = {
    "count-two-or-three": "a free factor appears exactly two or three times",
    "two-singletons": "two free factors appear exactly once",
    "singleton-aut-lacks-fa": (
        "the automorphism group of a factor appearing once lacks Property (FA)"
    ),
    "repeated-aut-infinite-abelianisation": (
        "the automorphism group of a repeated factor has infinite abelianisation"
    ),
    "repeated-aut-increasing-union": (
        "the automorphism group of a repeated factor is a union of a properly increasing chain"
    ),
    "all-repeated-at-least-four": (
        "every factor has (FA), its automorphism group has finite abelianisation and is not an"
        " increasing union, and it appears at least four times"
    ),
    "one-singleton-rest-at-least-four": (
        "one factor appears once and it and its automorphism group have (FA);"
        " every other factor appears at least four times with the hypotheses above"
    ),
    "free-rank-two": "the free rank is exactly 2",
    "free-rank-one-with-singleton": "the free rank is exactly 1 and another factor appears once",
    "free-group-rank-at-least-three": "Aut(F_n) has Property (FA) for n >= 3",
    "free-group-rank-one": (
        "Aut(Z) has order 2, and finite groups have Property (FA)"
        " (a derived fact, not one of the free-product rules)"
    ),
}


@dataclass(frozen=True)
class TraceEntry:
    """
    One rule that fired.

    Attributes
    ----------
    rule : str
        Rule identifier, a key of RULES.
    condition : str
        The concrete instance, e.g. ``"C2 appears 3 times"``.
    """

    rule: str
    condition: str

    @property
    def statement(self) -> str:
        return RULES[self.rule]

    def to_dict(self) -> dict:
        return {"rule": self.rule, "condition": self.condition, "statement": self.statement}


@dataclass(frozen=True)
class Verdict:
    """
    Outcome of ``decide``.

    Attributes
    ----------
    result : Result
        FA, NotFA or Unknown.
    trace : Tuple[TraceEntry, ...]
        Rules that fired, in evaluation order.
    unresolved : Tuple[str, ...]
        For Unknown: the hypotheses whose truth would settle the question.
    classes : Tuple[Tuple[str, int], ...]
        The merged factor classes the decision saw.
    """

    result: Result
    trace: Tuple[TraceEntry, ...] = ()
    unresolved: Tuple[str, ...] = ()
    classes: Tuple[Tuple[str, int], ...] = field(default=())

    @property
    def exit_code(self) -> int:
        return self.result.exit_code

    def to_dict(self) -> dict:
        return {
            "result": self.result.value,
            "classes": [{"factor": n, "count": c} for n, c in self.classes],
            "trace": [t.to_dict() for t in self.trace],
            "unresolved": list(self.unresolved),
        }


def _kind_order(c: FactorClassInput) -> int:
    if isinstance(c.spec, FiniteGroup):
        return 0
    return 1 if isinstance(c.spec, AbstractFlags) else 2


def _sort_key(c: FactorClassInput) -> Tuple:
    if isinstance(c.spec, FiniteGroup):
        return (0, c.spec.order, c.spec.name, c.spec.table)
    if isinstance(c.spec, AbstractFlags):
        return (1, 0, c.spec.name, tuple(getattr(c.spec, f).value for f in FLAG_NAMES))
    return (2, 0, "Z", ())


def merge_classes(classes: Sequence[FactorClassInput]) -> List[FactorClassInput]:
    """
    Merge entries naming isomorphic factors and sort the result.

    Finite groups are merged up to isomorphism; abstract factors by equal
    name and flags; infinite cyclic entries together.
    """
    merged: List[FactorClassInput] = []
    for c in sorted(classes, key=_sort_key):
        for k, m in enumerate(merged):
            if _kind_order(m) != _kind_order(c):
                continue
            same = (
                isinstance(c.spec, FiniteGroup)
                and isinstance(m.spec, FiniteGroup)
                and find_isomorphism(m.spec, c.spec) is not None
            ) or (not isinstance(c.spec, FiniteGroup) and m.spec == c.spec)
            if same:
                merged[k] = FactorClassInput(m.spec, m.count + c.count)
                break
        else:
            merged.append(c)
    return merged


def classify_factors(
    groups: Sequence[FiniteGroup], bound: int = DEFAULT_SEARCH_BOUND
) -> List[Tuple[FiniteGroup, int]]:
    """
    Partition factor groups into isomorphism classes.

    Parameters
    ----------
    groups : Sequence[FiniteGroup]
        Factor groups in decomposition order.
    bound : int, default=DEFAULT_SEARCH_BOUND
        Largest order compared by exhaustive search.

    Returns
    -------
    List[Tuple[FiniteGroup, int]]
        (first representative, multiplicity), in order of first appearance.

    Raises
    ------
    BoundExceeded
        If a group is larger than ``bound``.
    """
    out: List[Tuple[FiniteGroup, int]] = []
    for g in groups:
        if g.order > bound:
            raise BoundExceeded(f"{g.name} has order {g.order} > search bound {bound}")
        for k, (rep, count) in enumerate(out):
            if find_isomorphism(rep, g) is not None:
                out[k] = (rep, count + 1)
                break
        else:
            out.append((g, 1))
    return out


def fired_necessary_rules(classes: Sequence[FactorClassInput]) -> List[TraceEntry]:
    """Non-(FA) rules that apply to a product without infinite cyclic factors."""
    fired: List[TraceEntry] = []
    for c in classes:
        if c.count in (2, 3):
            fired.append(TraceEntry("count-two-or-three", f"{c.name} appears {c.count} times"))
    singletons = [c for c in classes if c.count == 1]
    if len(singletons) >= 2:
        names = ", ".join(c.name for c in singletons)
        fired.append(TraceEntry("two-singletons", f"{names} each appear once"))
    for c in singletons:
        if c.flags.aut_has_fa is Tristate.FALSE:
            fired.append(TraceEntry("singleton-aut-lacks-fa", f"Aut({c.name}) lacks (FA)"))
    for c in classes:
        if c.count < 2:
            continue
        condition = f"Aut({c.name}), {c.name} x{c.count}"
        if c.flags.aut_finite_abelianisation is Tristate.FALSE:
            fired.append(TraceEntry("repeated-aut-infinite-abelianisation", condition))
        if c.flags.aut_no_increasing_union is Tristate.FALSE:
            fired.append(TraceEntry("repeated-aut-increasing-union", condition))
    return fired


def _repeated_requirements(c: FactorClassInput) -> List[Tuple[str, Tristate]]:
    f = c.flags
    return [
        (f"{c.name}.has_fa", f.has_fa),
        (f"{c.name}.aut_finite_abelianisation", f.aut_finite_abelianisation),
        (f"{c.name}.aut_no_increasing_union", f.aut_no_increasing_union),
    ]


def _sufficient_requirements(
    classes: Sequence[FactorClassInput],
) -> Optional[Tuple[str, List[Tuple[str, Tristate]]]]:
    """The FA rule whose count pattern matches, with the hypotheses it still needs."""
    singletons = [c for c in classes if c.count == 1]
    if any(c.count in (2, 3) for c in classes) or len(singletons) > 1:
        return None
    needs: List[Tuple[str, Tristate]] = []
    for c in classes:
        if c.count == 1:
            needs.append((f"{c.name}.has_fa", c.flags.has_fa))
            needs.append((f"{c.name}.aut_has_fa", c.flags.aut_has_fa))
        else:
            needs.extend(_repeated_requirements(c))
    rule = "one-singleton-rest-at-least-four" if singletons else "all-repeated-at-least-four"
    return rule, needs


def fired_sufficient_rules(classes: Sequence[FactorClassInput]) -> List[TraceEntry]:
    """(FA) rules whose count pattern and hypotheses all hold."""
    found = _sufficient_requirements(classes)
    if found is None:
        return []
    rule, needs = found
    if all(value is Tristate.TRUE for _, value in needs):
        counts = ", ".join(f"{c.name} x{c.count}" for c in classes)
        return [TraceEntry(rule, counts)]
    return []


def _decide_with_z(z: FactorClassInput, others: List[FactorClassInput], names: Tuple) -> Verdict:
    rank = z.count
    if not others:
        if rank >= 3:
            entry = TraceEntry("free-group-rank-at-least-three", f"F_{rank}")
            return Verdict(Result.FA, (entry,), (), names)
        if rank == 2:
            return Verdict(Result.NOT_FA, (TraceEntry("free-rank-two", "F_2"),), (), names)
        return Verdict(Result.FA, (TraceEntry("free-group-rank-one", "Z"),), (), names)
    if rank == 2:
        return Verdict(Result.NOT_FA, (TraceEntry("free-rank-two", "free rank 2"),), (), names)
    singleton = next((c for c in others if c.count == 1), None)
    if rank == 1 and singleton is not None:
        condition = f"free rank 1, {singleton.name} appears once"
        entry = TraceEntry("free-rank-one-with-singleton", condition)
        return Verdict(Result.NOT_FA, (entry,), (), names)
    raise UnsupportedZ(
        f"free rank {rank} with other factors: cases with infinite cyclic factors"
        " are in general still open"
    )


def decide(classes: Sequence[FactorClassInput]) -> Verdict:
    """
    Decide whether Aut(G) has Property (FA).

    Parameters
    ----------
    classes : Sequence[FactorClassInput]
        Factor classes with multiplicities; isomorphic entries are merged.

    Returns
    -------
    Verdict
        NotFA when a necessary condition fails, FA when a sufficient condition
        holds, Unknown otherwise (never for finite factors).

    Raises
    ------
    TrivialProduct
        If there are fewer than two factors, except for a lone infinite cyclic
        factor.
    UnsupportedZ
        For infinite cyclic configurations no rule covers.

    Notes
    -----
    A lone infinite cyclic factor is the one single-factor input that is
    accepted. It is read as the free group of rank 1 and decided FA because
    Aut(Z) is finite; the trace entry ``free-group-rank-one`` marks this as
    a derived fact rather than a free-product rule. Any other single factor
    raises TrivialProduct.
    """
    merged = merge_classes(classes)
    names = tuple((c.name, c.count) for c in merged)
    total = sum(c.count for c in merged)
    z = next((c for c in merged if c.is_infinite_cyclic), None)
    others = [c for c in merged if not c.is_infinite_cyclic]
    if total < 2 and not (z is not None and not others):
        raise TrivialProduct(f"a free product needs at least two factors, got {total}")
    if z is not None:
        verdict = _decide_with_z(z, others, names)
        logger.debug("decided %s with free rank %d: %s", names, z.count, verdict.result.value)
        return verdict

    necessary = fired_necessary_rules(merged)
    if necessary:
        return Verdict(Result.NOT_FA, tuple(necessary), (), names)
    sufficient = fired_sufficient_rules(merged)
    if sufficient:
        return Verdict(Result.FA, tuple(sufficient), (), names)

    found = _sufficient_requirements(merged)
    assert found is not None
    _, needs = found
    unresolved = tuple(
        f"{flag} is {value.value}" for flag, value in needs if value is not Tristate.TRUE
    )
    return Verdict(Result.UNKNOWN, (), unresolved, names)


def explain(verdict: Verdict) -> str:
    """Human-readable verdict with the rules that fired."""
    classes = ", ".join(f"{n}:{c}" for n, c in verdict.classes)
    lines = [f"Aut({classes or '-'}): {verdict.result.value}"]
    for entry in verdict.trace:
        lines.append(f"  [{entry.rule}] {entry.condition}: {entry.statement}")
    if verdict.unresolved:
        lines.append("  neither rule applies; it would be settled by:")
        lines.extend(f"    - {u}" for u in verdict.unresolved)
    return "\n".join(lines)

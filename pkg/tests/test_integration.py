"""Integration tests for the full workflow."""

import pytest

from autfa.automorphisms import is_inner, parse_automorphism
from autfa.bstree import translation_length_oracle
from autfa.fa_decision import AbstractFlags, FactorClassInput, Result, classify_factors, decide
from autfa.gog import Shape, free_product_as_gog, translation_length
from autfa.io import parse_factor_counts, parse_signature, resolve_group
from autfa.quotient_action import characteristic_quotient, quotient_aut
from autfa.sampling import random_word
from autfa.utils import make_rng
from autfa.words import cyclically_reduce, parse_word


@pytest.mark.parametrize(
    "factors, expected, rule",
    [
        ("C2:4", Result.FA, "all-repeated-at-least-four"),
        ("C2:3", Result.NOT_FA, "count-two-or-three"),
        ("C2:1,C3:1", Result.NOT_FA, "two-singletons"),
        ("C2:4,S3:1", Result.FA, "one-singleton-rest-at-least-four"),
        ("C2:2,C3:4", Result.NOT_FA, "count-two-or-three"),
    ],
)
def test_fa_scenarios(factors, expected, rule):
    """Verdicts and cited rules for the standard count patterns."""
    verdict = decide(parse_factor_counts(factors))
    assert verdict.result is expected
    assert verdict.trace[0].rule == rule


def test_abstract_factor_is_unknown():
    """Five copies of a group with unknown hypotheses cannot be decided."""
    verdict = decide([FactorClassInput(AbstractFlags("G"), 5)])
    assert verdict.result is Result.UNKNOWN
    assert len(verdict.unresolved) == 3


def test_classify_then_decide():
    """Factors from a decomposition are grouped before deciding."""
    groups = [resolve_group(name) for name in ("C2", "C3", "C2", "S3", "C6")]
    classes = classify_factors(groups)
    assert [(g.name, n) for g, n in classes] == [("C2", 2), ("C3", 1), ("S3", 1), ("C6", 1)]
    verdict = decide([FactorClassInput(g, n) for g, n in classes])
    assert verdict.result is Result.NOT_FA


def test_tripod_oracle():
    """On the star of C2*C2*C2 the product of two generators translates by 4."""
    sig = parse_signature("C2,C2,C2")
    r = free_product_as_gog(sig, Shape.STAR)
    loop = r.embed(parse_word("f0.1 f1.1", sig))
    assert translation_length_oracle(loop, 6) == translation_length(loop) == 4


def test_automorphism_preserves_lengths_on_every_shape():
    """A factor automorphism then a partial conjugation keeps cyclic length on both trees."""
    sig = parse_signature("S3,C3")
    alpha = parse_automorphism("fa(1,0 2 1);pc(0,1.1)", sig)
    assert not is_inner(alpha).is_inner
    rng = make_rng(11)
    for shape in (Shape.SINGLE_EDGE, Shape.STAR):
        r = free_product_as_gog(sig, shape)
        for _ in range(20):
            w = random_word(sig, 6, rng)
            assert translation_length(r.embed(alpha(w))) == translation_length(r.embed(w))


def test_quotient_of_automorphism():
    """Killing the C3 factors sends an automorphism to one of C2*C2."""
    sig = parse_signature("C2,C2,C3,C3")
    q = characteristic_quotient(sig, [2, 3])
    alpha = parse_automorphism("pc(0,1.1);pc(1,2.1);perm((0 1))", sig)
    image = quotient_aut(q, alpha)
    w = parse_word("f0.1 f1.1", q.target)
    c, _ = cyclically_reduce(image(w))
    assert len(c) == 2

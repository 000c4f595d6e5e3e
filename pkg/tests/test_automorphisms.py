"""Tests for automorphisms module."""

import functools

import pytest
from hypothesis import given, settings, strategies as st

from autfa.automorphisms import (
    Automorphism,
    FactorAut,
    InnerStatus,
    PartialConj,
    PermAut,
    SamplePolicy,
    Transvection,
    apply,
    compose,
    equal,
    inner_automorphism,
    invert,
    is_inner,
    parse_automorphism,
    partial_conjugation,
    verify_relation_suite,
)
from autfa.errors import ParseError, SignatureMismatch, ValidationError
from autfa.groups import GroupMap, cyclic_group
from autfa.sampling import random_automorphism, random_word
from autfa.utils import make_rng
from autfa.words import FreeProductSignature, Word, format_word, multiply, parse_word

C2_C2_C3 = FreeProductSignature.of(cyclic_group(2), cyclic_group(2), cyclic_group(3))


class TestAtoms:
    """Tests for the atomic generators."""

    def test_partial_conjugation(self, c2_c3):
        """Test (A,b) sends a to b⁻¹ab and fixes the conjugating factor."""
        alpha = parse_automorphism("pc(0,1.1)", c2_c3)
        assert format_word(alpha(parse_word("f0.1", c2_c3))) == "f1.2 f0.1 f1.1"
        assert format_word(alpha(parse_word("f1.1", c2_c3))) == "f1.1"

    def test_partial_conjugation_product(self, c2_c3):
        """Test (A,b)(A,b') = (A,b'b)."""
        pc = functools.partial(partial_conjugation, c2_c3, 0, 1)
        assert equal(compose(pc(1), pc(1)), pc(2))
        assert compose(pc(1), pc(2)).is_identity()
        assert partial_conjugation(c2_c3, 0, 1, 0).is_identity()

    def test_factor_automorphism(self, c2_c3):
        """Test a factor automorphism only touches its factor."""
        alpha = parse_automorphism("fa(1,0 2 1)", c2_c3)
        assert format_word(alpha(parse_word("f0.1 f1.1", c2_c3))) == "f0.1 f1.2"
        assert apply(alpha, parse_word("f1.2", c2_c3)) == parse_word("f1.1", c2_c3)

    def test_transvection(self, c2_z):
        """Test x ↦ a·x on positive and negative exponents."""
        alpha = parse_automorphism("tv(1,0.1)", c2_z)
        assert format_word(alpha(parse_word("x1^2", c2_z))) == "f0.1 x1^1 f0.1 x1^1"
        assert format_word(alpha(parse_word("x1^-1", c2_z))) == "x1^-1 f0.1"

    def test_inversion_of_z(self, c2_z):
        """Test fa(i,-1) inverts an infinite cyclic factor."""
        alpha = parse_automorphism("fa(1,-1)", c2_z)
        assert format_word(alpha(parse_word("x1^2 f0.1", c2_z))) == "x1^-2 f0.1"

    def test_permutation(self):
        """Test perm swaps isomorphic factors."""
        alpha = parse_automorphism("perm((0 1))", C2_C2_C3)
        assert format_word(alpha(parse_word("f0.1 f1.1 f2.1", C2_C2_C3))) == "f1.1 f0.1 f2.1"
        assert alpha.to_text() == "perm((0 1))"

    def test_inner_factor(self, s3, c2):
        """Test inn(i,k) conjugates factor i by k."""
        sig = FreeProductSignature.of(s3, c2)
        alpha = parse_automorphism("inn(0,3)", sig)
        for x in s3.elements():
            assert alpha.image(0, x) == Word.letter(sig, 0, s3.conjugate(x, 3))


class TestAtomValidation:
    """Tests for invalid generators."""

    def test_partial_conjugation_needs_two_factors(self, c2_c3):
        """Test (A,a) is rejected."""
        with pytest.raises(ValidationError, match="two different factors"):
            Automorphism.from_atoms(c2_c3, [PartialConj(0, 0, 1)])

    def test_partial_conjugation_needs_nontrivial_element(self, c2_c3):
        """Test the conjugating element must be a non-identity letter."""
        with pytest.raises(ValidationError, match="non-identity letter"):
            parse_automorphism("pc(0,1.0)", c2_c3)

    def test_transvection_needs_infinite_cyclic(self, c2_c3):
        """Test transvections act on Z factors only."""
        with pytest.raises(ValidationError, match="infinite cyclic factor"):
            Automorphism.from_atoms(c2_c3, [Transvection(1, 0, 1)])

    def test_factor_automorphism_must_be_bijective(self, c2_c3, c3):
        """Test the trivial endomorphism is not a factor automorphism."""
        with pytest.raises(ValidationError, match="not bijective"):
            Automorphism.from_atoms(c2_c3, [FactorAut(1, GroupMap.trivial(c3, c3))])

    def test_factor_automorphism_must_be_homomorphism(self, c2_c3):
        """Test images that break products are rejected."""
        with pytest.raises(ValidationError, match="not a homomorphism"):
            parse_automorphism("fa(1,0 1 1)", c2_c3)

    def test_permutation_of_non_isomorphic_factors(self):
        """Test C2 and C3 cannot be swapped."""
        with pytest.raises(ValidationError, match="not isomorphic"):
            parse_automorphism("perm((0 2))", C2_C2_C3)

    def test_unknown_atom(self, c2_c3):
        """Test unknown atom syntax raises ParseError."""
        with pytest.raises(ParseError, match="cannot parse automorphism atom"):
            parse_automorphism("xx(1)", c2_c3)

    def test_empty_text_is_identity(self, c2_c3):
        """Test the empty generator word."""
        assert parse_automorphism("", c2_c3).is_identity()

    def test_apply_to_foreign_word(self, c2_c3, c3, c2):
        """Test automorphisms refuse words of another product."""
        alpha = Automorphism.identity(c2_c3)
        other = FreeProductSignature.of(c3, c2)
        with pytest.raises(SignatureMismatch):
            alpha(Word.letter(other, 0, 1))


class TestComposition:
    """Tests for composition, inversion and text round-trips."""

    def test_compose_applies_left_first(self, c2_c3):
        """Test compose(α, β) applies α then β."""
        alpha = parse_automorphism("pc(0,1.1)", c2_c3)
        beta = parse_automorphism("fa(1,0 2 1)", c2_c3)
        w = parse_word("f0.1", c2_c3)
        assert compose(alpha, beta)(w) == beta(alpha(w))

    def test_inverse(self, c2_c3):
        """Test α followed by α⁻¹ is the identity."""
        alpha = parse_automorphism("pc(0,1.1);fa(1,0 2 1);pc(1,0.1)", c2_c3)
        assert compose(alpha, invert(alpha)).is_identity()
        assert compose(invert(alpha), alpha).is_identity()

    def test_text_round_trip(self, c2_z):
        """Test to_text parses back to the same automorphism."""
        alpha = parse_automorphism("tv(1,0.1); fa(1,-1); pc(0,1.1)", c2_z)
        assert parse_automorphism(alpha.to_text(), c2_z) == alpha


class TestIsInner:
    """Tests for the inner automorphism search."""

    def test_conjugation_by_word_is_inner(self, c2_c3):
        """Test conjugation by a word is found with a matching witness."""
        g = parse_word("f0.1 f1.1", c2_c3)
        alpha = inner_automorphism(c2_c3, g)
        result = is_inner(alpha)
        assert result.is_inner
        assert equal(inner_automorphism(c2_c3, result.witness), alpha)

    def test_partial_conjugation_of_two_factors_is_inner(self, c2_c3):
        """Test (A,b) in a product of two abelian factors is conjugation by b."""
        result = is_inner(partial_conjugation(c2_c3, 0, 1, 1))
        assert result.status is InnerStatus.INNER
        assert result.witness == Word.letter(c2_c3, 1, 1)

    def test_factor_automorphism_is_not_inner(self, c2_c3):
        """Test an outer factor automorphism is recognised."""
        result = is_inner(parse_automorphism("fa(1,0 2 1)", c2_c3))
        assert result.status is InnerStatus.NOT_INNER
        assert result.reason

    def test_long_conjugator_is_undecided(self, c2_c3):
        """Test witnesses beyond the bound give UNDECIDED."""
        g = parse_word("f0.1 f1.1 f0.1 f1.1", c2_c3)
        result = is_inner(inner_automorphism(c2_c3, g), bound=1)
        assert result.status is InnerStatus.UNDECIDED

    def test_infinite_cyclic_factor_rejected(self, c2_z):
        """Test the search needs finite factors."""
        with pytest.raises(ValidationError, match="finite factors"):
            is_inner(Automorphism.identity(c2_z))


class TestRelationSuite:
    """Tests for the partial-conjugation relation suite."""

    def test_exhaustive_suite_passes(self):
        """Test every relation instance holds on C2*C2*C3."""
        report = verify_relation_suite(C2_C2_C3)
        assert report.passed
        assert report.instances == report.details["available"]
        assert report.instances > 0

    def test_sampled_suite(self):
        """Test a sampling policy checks the requested number of instances."""
        policy = SamplePolicy(exhaustive=False, samples=10, seed=1)
        report = verify_relation_suite(C2_C2_C3, policy)
        assert report.instances == 10
        assert report.passed

    def test_wrong_composition_order_is_caught(self, s3, c2):
        """Test composing in the wrong order breaks the product relation."""
        sig = FreeProductSignature.of(s3, c2)
        report = verify_relation_suite(sig, composer=lambda a, b: compose(b, a))
        assert not report.passed
        assert "product" in report.count_families()

    def test_parallel_matches_serial(self):
        """Test worker threads do not change the report."""
        serial = verify_relation_suite(C2_C2_C3)
        parallel = verify_relation_suite(C2_C2_C3, jobs=4)
        assert serial.to_dict() == parallel.to_dict()

    def test_infinite_cyclic_factor_rejected(self, c2_z):
        """Test the suite needs finite factors."""
        with pytest.raises(ValidationError, match="finite factors"):
            verify_relation_suite(c2_z)

    def test_exhaustive_suite_with_nonabelian_factor(self, c2, c3, s3):
        """Test every relation instance holds on C2*C3*S3."""
        report = verify_relation_suite(FreeProductSignature.of(c2, c3, s3))
        assert report.passed, report.summary()
        assert report.instances == report.details["available"]

    @pytest.mark.slow
    def test_sampled_suite_on_four_copies_of_s3(self, s3):
        """Test 2000 sampled relation instances hold on S3*S3*S3*S3."""
        sig = FreeProductSignature.of(s3, s3, s3, s3)
        report = verify_relation_suite(sig, SamplePolicy(exhaustive=False, samples=2000, seed=0))
        assert report.details["available"] == 3660
        assert report.instances == 2000
        assert report.passed, report.summary()


@settings(max_examples=30, derandomize=True)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_random_automorphisms_are_automorphisms(seed):
    """Random automorphisms are multiplicative and undone by their inverses."""
    rng = make_rng(seed)
    sig = FreeProductSignature.of(cyclic_group(2), cyclic_group(3), "Z")
    alpha = random_automorphism(sig, 4, rng)
    u, v = random_word(sig, 5, rng), random_word(sig, 5, rng)
    assert alpha.check_multiplicative()
    assert alpha(multiply(u, v)) == multiply(alpha(u), alpha(v))
    assert invert(alpha)(alpha(u)) == u

"""Tests for quotient_action module."""

import pytest

from autfa.automorphisms import (
    Automorphism,
    InnerFactor,
    PartialConj,
    compose,
    equal,
    parse_automorphism,
    partial_conjugation,
)
from autfa.bstree import TreeVertex, build_ball
from autfa.errors import (
    NotProjectable,
    StabilizerAmbiguity,
    TooFewFactors,
    UndecidedInner,
    ValidationError,
)
from autfa.gog import Shape, free_product_as_gog
from autfa.groups import cyclic_group, symmetric_group
from autfa.quotient_action import (
    arm_vertices,
    characteristic_quotient,
    check_induced,
    composition_check,
    equivariance_check,
    equivariance_suite,
    h_z_generators,
    induced_isometry,
    inner_action_check,
    invariance_suite_H_Z,
    invariance_suite_two_factors,
    no_prop_T_generator_images,
    no_prop_T_quotient,
    out_presentation_suite,
    quotient_aut,
    quotient_word,
    substitute_eliminated,
    tripod_action_geometry,
    two_factor_generators,
)
from autfa.sampling import random_atom, random_word
from autfa.utils import make_rng
from autfa.words import FreeProductSignature, parse_word

C2, C3, S3 = cyclic_group(2), cyclic_group(3), symmetric_group(3)
C2_C2_C3 = FreeProductSignature.of(C2, C2, C3)


def _single_edge(sig, radius=2):
    r = free_product_as_gog(sig, Shape.SINGLE_EDGE)
    return r, build_ball(TreeVertex.root(r.graph, r.base), radius)


class TestCharacteristicQuotient:
    """Tests for quotients by normal closures of factors."""

    def test_kill_whole_class(self):
        """Test killing C3 leaves C2*C2."""
        q = characteristic_quotient(C2_C2_C3, [2])
        assert q.target.describe() == "C2*C2"
        assert q.kept == (0, 1)
        assert q.index_map == (0, 1, None)
        assert not q.restricted

    def test_split_class_rejected(self):
        """Test killing one of two isomorphic factors is not characteristic."""
        with pytest.raises(ValidationError, match="split the class"):
            characteristic_quotient(C2_C2_C3, [0])

    def test_trivial_quotient_rejected(self):
        """Test something must survive."""
        with pytest.raises(ValidationError, match="quotient would be trivial"):
            characteristic_quotient(C2_C2_C3, [0, 1, 2])

    def test_quotient_word(self):
        """Test killed syllables vanish and the rest reduces."""
        q = characteristic_quotient(C2_C2_C3, [2])
        w = parse_word("f0.1 f2.1 f0.1 f1.1", C2_C2_C3)
        assert quotient_word(q, w) == parse_word("f1.1", q.target)

    def test_permutation_descends(self):
        """Test a swap of kept factors becomes a swap in the quotient."""
        q = characteristic_quotient(C2_C2_C3, [2])
        alpha = parse_automorphism("perm((0 1))", C2_C2_C3)
        assert equal(quotient_aut(q, alpha), parse_automorphism("perm((0 1))", q.target))
        assert check_induced(q, alpha) is None

    def test_killed_partial_conjugation_is_identity(self):
        """Test atoms touching a killed factor vanish."""
        q = characteristic_quotient(C2_C2_C3, [2])
        for target, conjugator in ((0, 2), (2, 0)):
            alpha = partial_conjugation(C2_C2_C3, target, conjugator, 1)
            assert quotient_aut(q, alpha).is_identity()
            assert check_induced(q, alpha) is None

    @pytest.mark.slow
    @pytest.mark.parametrize("killed", [[2, 3], [0, 1]])
    def test_quotient_word_is_a_homomorphism(self, c2_c2_c3_c3, killed):
        """Test the quotient map respects products on 500 random pairs."""
        q = characteristic_quotient(c2_c2_c3_c3, killed)
        rng = make_rng(9)
        for _ in range(500):
            u, v = random_word(q.source, 8, rng), random_word(q.source, 8, rng)
            assert quotient_word(q, u * v) == quotient_word(q, u) * quotient_word(q, v)

    @pytest.mark.slow
    def test_quotient_aut_respects_composition(self, c2_c2_c3_c3):
        """Test inducing commutes with composing on 100 generator pairs."""
        q = characteristic_quotient(c2_c2_c3_c3, [2, 3])
        rng = make_rng(10)
        for _ in range(100):
            a = Automorphism.from_atoms(q.source, [random_atom(q.source, rng)])
            b = Automorphism.from_atoms(q.source, [random_atom(q.source, rng)])
            induced = compose(quotient_aut(q, a), quotient_aut(q, b))
            assert equal(quotient_aut(q, compose(a, b)), induced)
            assert check_induced(q, compose(a, b)) is None


class TestNoPropTQuotient:
    """Tests for the quotient onto two factors."""

    def test_needs_three_factors(self):
        """Test two factors are refused."""
        with pytest.raises(TooFewFactors, match="at least three factors"):
            no_prop_T_quotient(FreeProductSignature.of(C2, C3))

    def test_restricted_refuses_permutations(self):
        """Test permutations do not descend to a restricted quotient."""
        q = no_prop_T_quotient(FreeProductSignature.of(C2, C2, C2))
        assert q.restricted
        with pytest.raises(NotProjectable, match="does not descend"):
            quotient_aut(q, parse_automorphism("perm((0 1))", q.source))

    def test_generator_images(self):
        """Test every generator maps to its expected image."""
        q = no_prop_T_quotient(C2_C2_C3)
        report = no_prop_T_generator_images(q, trials=20, seed=3)
        assert report.passed
        assert report.suite == "no-prop-T"
        assert report.details["target"] == "C2*C2"
        assert report.details["killed"] == [2]


class TestInvariance:
    """Tests for translation-length invariance on two-factor products."""

    def test_two_factor_suite(self):
        """Test every generator of Aut(C2*C3) preserves length."""
        report = invariance_suite_two_factors(C2, C3, trials=15, seed=2)
        assert report.passed
        assert report.suite == "two-factors"
        assert report.instances == 4 * 15

    def test_isomorphic_factors_include_swap(self):
        """Test the swap is a generator of Aut(C2*C2) and preserves length."""
        families = [f for f, _, _ in two_factor_generators(FreeProductSignature.of(C2, C2))]
        assert families.count("swap") == 1
        assert invariance_suite_two_factors(C2, C2, trials=15).passed

    def test_h_z_suite(self):
        """Test generators of Aut(C3*Z) preserve the absolute exponent sum."""
        report = invariance_suite_H_Z(C3, trials=15, seed=4)
        assert report.passed
        assert report.suite == "hz"

    def test_h_z_needs_finite_then_z(self):
        """Test factor order is checked."""
        with pytest.raises(ValidationError, match="finite factor followed by Z"):
            h_z_generators(FreeProductSignature.of("Z", C3))

    @pytest.mark.slow
    @pytest.mark.parametrize("h, k", [(C2, C2), (C2, C3), (C3, C3), (S3, S3)])
    def test_two_factor_suite_on_hundred_words(self, h, k):
        """Test every generator preserves length on 100 words, including non-abelian factors."""
        report = invariance_suite_two_factors(h, k, trials=100, seed=0)
        assert report.passed, report.summary()
        gens = two_factor_generators(FreeProductSignature.of(h, k))
        assert report.instances == 100 * len(gens)

    @pytest.mark.slow
    @pytest.mark.parametrize("h", [C2, S3])
    def test_h_z_suite_on_hundred_words(self, h):
        """Test every generator of Aut(H*Z) preserves the absolute exponent sum."""
        report = invariance_suite_H_Z(h, trials=100, seed=0)
        assert report.passed, report.summary()


class TestOutPresentation:
    """Tests for the Out(A*A*A) presentation suite."""

    def test_substitute_eliminated(self):
        """Test eliminated partial conjugations are rewritten."""
        sig = FreeProductSignature.of(C3, C3, C3)
        assert substitute_eliminated(sig, 0, 2, 1) == [InnerFactor(2, 2), PartialConj(1, 2, 2)]
        assert substitute_eliminated(sig, 0, 1, 1) == [PartialConj(0, 1, 1)]

    @pytest.mark.parametrize("n", [2, 3])
    def test_relations_hold(self, n):
        """Test every relation holds modulo inner automorphisms."""
        report = out_presentation_suite(cyclic_group(n))
        assert report.passed, report.summary()
        assert report.suite == "out-tripod"
        assert report.details["max_witness_length"] >= 1

    def test_zero_bound_is_undecided(self):
        """Test a bound below the needed conjugators raises."""
        with pytest.raises(UndecidedInner, match="undecided at bound 0"):
            out_presentation_suite(C2, bound=0)

    @pytest.mark.slow
    def test_relations_hold_for_s3(self):
        """Test the presentation holds modulo inner automorphisms for a non-abelian factor."""
        report = out_presentation_suite(S3)
        assert report.passed, report.summary()
        assert 1 <= report.details["max_witness_length"] <= 6

    def test_trivial_factor_rejected(self):
        """Test the factor must be nontrivial."""
        with pytest.raises(ValidationError, match="nontrivial"):
            out_presentation_suite(cyclic_group(1))


class TestTripodGeometry:
    """Tests for A*A*A acting on the star tree."""

    @pytest.mark.parametrize("n", [2, 3])
    def test_geometry_holds(self, n):
        """Test distances, fixed sets and translation lengths."""
        report = tripod_action_geometry(cyclic_group(n))
        assert report.passed, report.summary()
        assert report.suite == "tripod-geometry"

    def test_arm_vertices_need_star(self):
        """Test arm vertices are only defined on the star."""
        r = free_product_as_gog(FreeProductSignature.of(C2, C3), Shape.SINGLE_EDGE)
        with pytest.raises(ValidationError, match="star shape"):
            arm_vertices(r)


class TestInducedIsometry:
    """Tests for isometries induced by automorphisms."""

    def test_swap_needs_subdivision(self):
        """Test swapping C2*C2 inverts an edge."""
        sig = FreeProductSignature.of(C2, C2)
        r, ball = _single_edge(sig)
        swap = parse_automorphism("perm((0 1))", sig)
        report = equivariance_check(swap, r, ball, samples=30, rng=make_rng(0), subdivide=True)
        assert report.passed
        assert report.details["inversions"] > 0
        strict = equivariance_check(swap, r, ball, samples=5, rng=make_rng(0))
        assert not strict.passed
        assert "inversion" in strict.count_families()

    def test_trivial_factor_is_skipped(self):
        """Test a trivial factor has no stabilizer to match."""
        sig = FreeProductSignature.of(cyclic_group(1), C2)
        r, ball = _single_edge(sig, radius=1)
        with pytest.raises(StabilizerAmbiguity):
            induced_isometry(r, Automorphism.identity(sig))
        report = equivariance_check(Automorphism.identity(sig), r, ball)
        assert report.details["skipped"] == 1
        assert report.instances == 0

    def test_inner_and_composite_maps(self):
        """Test conjugation acts as its element and maps compose."""
        sig = FreeProductSignature.of(C2, C3)
        r, ball = _single_edge(sig)
        assert inner_action_check(r, parse_word("f0.1 f1.2", sig), ball) is None
        alpha = parse_automorphism("fa(1,0 2 1)", sig)
        beta = parse_automorphism("pc(0,1.1)", sig)
        assert composition_check(r, alpha, beta, ball) is None

    def test_suite(self):
        """Test the full equivariance suite on C2*C3."""
        report = equivariance_suite(C2, C3, radius=2, samples=10, pairs=3, seed=5)
        assert report.passed, report.summary()
        assert report.details["skipped"] == 0

    def test_generator_pairs_compose_on_radius_five_ball(self):
        """Test every pair of C2*C3 generators composes correctly within radius 5."""
        sig = FreeProductSignature.of(C2, C3)
        r, ball = _single_edge(sig, radius=5)
        gens = [alpha for _, _, alpha in two_factor_generators(sig)]
        for alpha in gens:
            for beta in gens:
                assert composition_check(r, alpha, beta, ball) is None

    @pytest.mark.slow
    def test_suite_defaults_to_radius_five(self):
        """Test the suite checks composites within radius 5 unless told otherwise."""
        report = equivariance_suite(C2, C3, samples=10, pairs=10, seed=2)
        assert report.details["radius"] == 5
        assert report.passed, report.summary()

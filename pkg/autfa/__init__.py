"""autfa: free products, their automorphisms, Bass-Serre trees and the Property (FA) rule."""

from autfa.automorphisms import Automorphism, apply, compose, invert, is_inner, parse_automorphism
from autfa.fa_decision import FactorClassInput, Verdict, decide, explain
from autfa.gog import GraphOfGroups, Shape, free_product_as_gog, translation_length
from autfa.groups import FiniteGroup, automorphism_group, validate_group
from autfa.io import parse_factor_counts, parse_signature, resolve_group
from autfa.words import FreeProductSignature, Word, normalize, parse_word

__version__ = "0.1.0"
__all__ = [
    "Automorphism",
    "FactorClassInput",
    "FiniteGroup",
    "FreeProductSignature",
    "GraphOfGroups",
    "Shape",
    "Verdict",
    "Word",
    "apply",
    "automorphism_group",
    "compose",
    "decide",
    "explain",
    "free_product_as_gog",
    "invert",
    "is_inner",
    "normalize",
    "parse_automorphism",
    "parse_factor_counts",
    "parse_signature",
    "parse_word",
    "resolve_group",
    "translation_length",
    "validate_group",
]

"""Shared fixtures: small groups and the free products built from them."""

import pytest

from autfa.groups import FiniteGroup, cyclic_group, direct_product, symmetric_group
from autfa.words import FreeProductSignature


@pytest.fixture
def c2() -> FiniteGroup:
    return cyclic_group(2)


@pytest.fixture
def c3() -> FiniteGroup:
    return cyclic_group(3)


@pytest.fixture
def s3() -> FiniteGroup:
    return symmetric_group(3)


@pytest.fixture
def klein(c2) -> FiniteGroup:
    return direct_product(c2, c2, name="C2xC2")


@pytest.fixture
def c2_c3(c2, c3) -> FreeProductSignature:
    """C2 * C3."""
    return FreeProductSignature.of(c2, c3)


@pytest.fixture
def c2_z(c2) -> FreeProductSignature:
    """C2 * Z."""
    return FreeProductSignature.of(c2, "Z")


@pytest.fixture
def c2_c2_c3_c3(c2, c3) -> FreeProductSignature:
    return FreeProductSignature.of(c2, c2, c3, c3)

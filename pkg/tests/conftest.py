"""
Shared test fixtures

Field contexts, seeded generators and random symbol blocks.
"""

import numpy as np
import pytest

from src.core.field import get_field


# ============================================
# FIELD FIXTURES
# ============================================

@pytest.fixture
def gf13():
    """GF(13) with generator 2"""
    return get_field(13)


@pytest.fixture
def gf257():
    """GF(257) with generator 3"""
    return get_field(257)


# ============================================
# RANDOMNESS FIXTURES
# ============================================

@pytest.fixture
def rng():
    """Seeded numpy generator"""
    return np.random.default_rng(20240601)


@pytest.fixture
def random_symbols(rng):
    """Factory for (K, W) blocks of random field symbols."""

    def make(ctx, K, W=1):
        return ctx.GF.Random((K, W), seed=rng)

    return make

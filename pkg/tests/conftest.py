import numpy as np
import pytest


def make_rng(entropy: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@pytest.fixture
def rng():
    return make_rng(20260809)

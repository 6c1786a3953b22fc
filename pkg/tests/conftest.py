import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from procmat.operators import CANONICAL_LABELS, HermitianOperator


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


def random_hermitian(rng, side, labels=None):
    g = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
    mat = (g + g.conj().T) / 2
    if labels is None:
        labels = CANONICAL_LABELS
    return HermitianOperator(labels, mat)


@pytest.fixture
def random_canonical(rng):
    def make():
        return random_hermitian(rng, 16)

    return make

from __future__ import annotations

import numpy as np
import pytest

from famsplit.matrix import CrossErrorMatrix, SynthParams, synth_matrix


def make_matrix(values, families=None) -> CrossErrorMatrix:
    grid = np.asarray(values, dtype=np.float64)
    if families is None:
        families = tuple(f"fam{i:02d}" for i in range(grid.shape[0]))
    return CrossErrorMatrix(tuple(families), grid)


def constant_matrix(k: int, value: float, diag: float = 1.0) -> CrossErrorMatrix:
    grid = np.full((k, k), value)
    np.fill_diagonal(grid, diag)
    return make_matrix(grid)


@pytest.fixture(scope="session")
def paper_matrix() -> CrossErrorMatrix:
    """Planted-structure matrix at paper scale: defaults, k=184, seed=7."""
    return synth_matrix(SynthParams(k=184, seed=7))

import numpy as np
import pytest

from kanext.quantum import BipartitePure


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)


def bell_state() -> BipartitePure:
    return BipartitePure(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


def product_state() -> BipartitePure:
    return BipartitePure(np.array([1, 0, 0, 0], dtype=complex), (2, 2))


def ghz3_state() -> BipartitePure:
    v = np.zeros(9, dtype=complex)
    v[[0, 4, 8]] = 1 / np.sqrt(3)  # |00> + |11> + |22>
    return BipartitePure(v, (3, 3))


def random_pure(rng: np.random.Generator, dims: tuple[int, int]) -> BipartitePure:
    v = rng.normal(size=dims[0] * dims[1]) + 1j * rng.normal(size=dims[0] * dims[1])
    return BipartitePure(v / np.linalg.norm(v), dims)

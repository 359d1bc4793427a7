import numpy as np
import pytest

from decosim import DensityMatrix, Operator, StateVector


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    probs = rng.dirichlet(np.ones(rank))
    u = random_unitary(rng, dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for k in range(rank):
        v = u[:, k]
        mat += probs[k] * np.outer(v, v.conj())
    return 0.5 * (mat + mat.conj().T)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)


def as_state(vec) -> StateVector:
    return StateVector(np.asarray(vec, dtype=complex) / np.linalg.norm(vec))


def as_density(mat, dims=()) -> DensityMatrix:
    return DensityMatrix(mat, dims)


def as_operator(mat, dims=()) -> Operator:
    return Operator(mat, dims)

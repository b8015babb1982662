import numpy as np
import pytest

from risce.phase_model import ReflectionModel, reflection_coefficient
from risce.system import ReflectionPattern, TrainingMatrix


def random_feasible_pattern(rng, m, b, model) -> ReflectionPattern:
    """Random law-feasible pattern with the mandatory all-ones last row."""
    thetas = rng.uniform(0.0, 2.0 * np.pi, (m, b))
    v = np.ones((m + 1, b), dtype=complex)
    v[:m] = reflection_coefficient(thetas, model)
    return ReflectionPattern(v=v)


def random_training(rng, k, tau, power) -> TrainingMatrix:
    """Random training rows scaled exactly to their power budgets."""
    power = np.asarray(power, dtype=float)
    x = rng.standard_normal((k, tau)) + 1j * rng.standard_normal((k, tau))
    x *= (np.sqrt(power) / np.linalg.norm(x, axis=1))[:, None]
    return TrainingMatrix(x=x, power=power)


def random_hpd(rng, n, jitter=0.1) -> np.ndarray:
    """Random Hermitian positive definite matrix."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ a.conj().T + jitter * np.eye(n)


@pytest.fixture
def model():
    return ReflectionModel()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

import numpy as np
import pytest

from molfluor import ModelParams


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of the difference of two Hermitian matrices."""
    return 0.5 * float(np.abs(np.linalg.eigvalsh(np.asarray(a) - np.asarray(b))).sum())


@pytest.fixture(scope="session")
def two_photon_weak_params() -> ModelParams:
    """Weak pure two-photon driving (q = 1e-4)."""
    return ModelParams(q=1e-4, omega12=6.0, gamma_u=0.5, gamma_v=0.5, gamma_b=1.0)


@pytest.fixture(scope="session")
def cascade_weak_params() -> ModelParams:
    """Weak one-photon cascade driving (omega_ab = omega_bc = 0.01)."""
    return ModelParams(omega_ab=0.01, omega_bc=0.01, omega12=6.0,
                       gamma_u=0.5, gamma_v=0.5, gamma_b=1.0)


@pytest.fixture(scope="session")
def strong_cascade_params() -> ModelParams:
    """Strong cascade driving (omega = 1, gamma_b = 0.15)."""
    return ModelParams(omega_ab=1.0, omega_bc=1.0, omega12=6.0,
                       gamma_u=0.5, gamma_v=0.5, gamma_b=0.15)

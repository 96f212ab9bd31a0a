import numpy as np
import pytest

from spincontact import CouplingMatrix, project_to_commutant


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_commutant(n, rng, scale=1.0):
    """Random Hermitian coupling commuting with the swap."""
    d = n * n
    raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return project_to_commutant(scale * raw)


def random_hermitian(d, rng, scale=1.0):
    raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (raw + raw.conj().T) / 2


def coupling(entries):
    arr = np.asarray(entries, dtype=complex)
    n = int(round(arr.shape[0] ** 0.5))
    return CouplingMatrix(n=n, entries=arr)

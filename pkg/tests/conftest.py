"""Shared fixtures: the default grid and the small state library.

States are immutable snapshots, so everything here is session scoped.
"""

import numpy as np
import pytest

from cqm import Grid1D, gaussian_packet, sho_eigenstate, superpose

INV_SQRT2 = 2.0 ** -0.5


@pytest.fixture(scope="session")
def grid():
    return Grid1D(-10.0, 10.0, 1024)


@pytest.fixture(scope="session")
def psi0(grid):
    return sho_eigenstate(0, grid)


@pytest.fixture(scope="session")
def psi1(grid):
    return sho_eigenstate(1, grid)


@pytest.fixture(scope="session")
def gauss_packet(grid):
    return gaussian_packet(1.0, 2.0, 0.8, grid)


@pytest.fixture(scope="session")
def superposition(psi0, psi1):
    # (ψ₀ + iψ₁)/√2
    return superpose([psi0, psi1], [INV_SQRT2, 1.0j * INV_SQRT2])


@pytest.fixture(scope="session")
def coherent(grid):
    # |ψ|² is the displaced vacuum: rigid-translation dynamics
    return gaussian_packet(1.0, 0.0, INV_SQRT2, grid)


def l_inf(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))

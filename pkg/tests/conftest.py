import importlib.util
import pathlib
import sys

import numpy as np
import pytest
from scipy.linalg import eigvals

ROOT = pathlib.Path(__file__).resolve().parents[1]
if importlib.util.find_spec('quartic_spectrum') is None:
    sys.path.insert(0, str(ROOT.joinpath('src', 'quartic_spectrum')))

from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.models.model_types import IntegratorConfig

FIXTURES = pathlib.Path(__file__).resolve().parent.joinpath('fixtures')
CONFIGS = ROOT.joinpath('config')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long acceptance runs')


@pytest.fixture
def zero():
    return PeriodicCoefficient()


@pytest.fixture
def smooth_pair():
    """p = sin 2 pi x + 0.3 cos 4 pi x, q = cos 2 pi x + 0.2 sin 6 pi x"""
    p = PeriodicCoefficient(harmonics=((1, 0.0, 1.0), (2, 0.3, 0.0)))
    q = PeriodicCoefficient(harmonics=((1, 1.0, 0.0), (3, 0.0, 0.2)))
    return p, q


@pytest.fixture
def sin_pair():
    """p = sin 2 pi x, q = cos 2 pi x + 0.5 sin 4 pi x"""
    p = PeriodicCoefficient(harmonics=((1, 0.0, 1.0),))
    q = PeriodicCoefficient(harmonics=((1, 1.0, 0.0), (2, 0.0, 0.5)))
    return p, q


@pytest.fixture
def double_config():
    return IntegratorConfig.for_precision('double')


@pytest.fixture
def extended_config():
    return IntegratorConfig.for_precision('extended')


def random_trig_pair(rng, degree=3, amplitude=1.0):
    def _one():
        harmonics = tuple((k, amplitude * rng.uniform(-1, 1), amplitude * rng.uniform(-1, 1))
                          for k in range(1, degree + 1))
        return PeriodicCoefficient(constant_term=amplitude * rng.uniform(-1, 1), harmonics=harmonics)
    return _one(), _one()


def unperturbed_mu(n):
    return (np.pi / 2 + np.pi * n) ** 4


def chebyshev_differentiation(N):
    t = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** np.arange(N + 1)
    T = np.tile(t, (N + 1, 1)).T
    dT = T - T.T
    D = np.outer(c, 1.0 / c) / (dT + np.eye(N + 1))
    D = D - np.diag(D.sum(axis=1))
    return D, t


def collocation_eigenvalues(p, q, N=200):
    """
    Dense Chebyshev collocation of (y, y', y'', y''' + p y')' = [[0,1,0,0],[0,0,1,0],[0,-p,0,1],[lambda-q,0,0,0]]
    on x = (t + 1)/2. Each component drops its equation at the endpoint where its boundary row is imposed:
    y(1) = y''(1) = 0 and y'(0) = (y''' + p y')(0) = 0.
    """
    D, t = chebyshev_differentiation(N)
    x = (t + 1) / 2
    Dx = 2 * D
    M = N + 1
    I = np.eye(M)
    Z = np.zeros((M, M))
    P = np.diag(p.eval(x))
    Q = np.diag(q.eval(x))

    A = np.block([[Dx, -I, Z, Z],
                  [Z, Dx, -I, Z],
                  [Z, P, Dx, -I],
                  [Q, Z, Z, Dx]])
    B = np.block([[Z, Z, Z, Z],
                  [Z, Z, Z, Z],
                  [Z, Z, Z, Z],
                  [I, Z, Z, Z]])

    at_one, at_zero = 0, N
    for component, node in ((0, at_one), (1, at_zero), (2, at_one), (3, at_zero)):
        row = component * M + node
        A[row, :] = 0.0
        B[row, :] = 0.0
        A[row, component * M + node] = 1.0

    w = eigvals(A, B)
    w = w[np.isfinite(w)]
    w = w[np.abs(w.imag) <= 1e-6 * np.maximum(1.0, np.abs(w))]
    return np.sort(w.real)

#!/usr/bin python3
'''
Periodic coefficients p, q of the operator and the half-odd-frequency Fourier functionals
f_0, f_cn = int f cos(pi(2n+1)x), f_sn = int f sin(pi(2n+1)x) consumed by the asymptotic formulas.
'''
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Tuple
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from loguru import logger

from quartic_spectrum.pytypes import FourierRecord
from quartic_spectrum.utils.exceptions import UnsupportedDerivativeError, QuadratureAccuracyError

MAX_DEGREE = 64
GAUSS_POINTS = 16
GEOMETRIC_PANELS = 24

_gl_nodes, _gl_weights = leggauss(GAUSS_POINTS)

# d^j/dtheta^j of (cos, sin) expressed in (cos, sin), indexed by j mod 4
_COS_ROTATION = ((1, 0), (0, -1), (-1, 0), (0, 1))
_SIN_ROTATION = ((0, 1), (1, 0), (0, -1), (-1, 0))


@dataclass(frozen=True)
class PeriodicCoefficient:
    '''
    f(x) = a_0 + sum_k (a_k cos 2 pi k x + b_k sin 2 pi k x), k <= 64.

    smoothness_order is the highest derivative the representation vouches for. Trig polynomials
    built directly are smooth and default to 4; coefficients built from samples keep the declared
    class and refuse derivatives beyond it.
    '''
    constant_term: float                        = field(default = 0.0)
    harmonics: Tuple[Tuple[int, float, float], ...] = field(default = ())
    smoothness_order: int                       = field(default = 4)
    sampled: bool                               = field(default = False)

    def __post_init__(self):
        merged = {}
        for entry in self.harmonics:
            k, a, b = entry
            if int(k) != k or k < 1:
                raise ValueError('Harmonic index must be a positive integer, got %s' % str(k))
            if k > MAX_DEGREE:
                raise ValueError('Harmonic index %d exceeds the supported degree %d' % (k, MAX_DEGREE))
            a_old, b_old = merged.get(int(k), (0.0, 0.0))
            merged[int(k)] = (a_old + float(a), b_old + float(b))
        if self.smoothness_order not in range(5):
            raise ValueError('Smoothness order must lie in 0..4, got %s' % str(self.smoothness_order))

        object.__setattr__(self, 'constant_term', float(self.constant_term))
        object.__setattr__(self, 'harmonics', tuple((k, a, b) for k, (a, b) in sorted(merged.items())))

    @classmethod
    def constant(cls, value: float) -> 'PeriodicCoefficient':
        return cls(constant_term=value)

    @classmethod
    def from_samples(cls, values: Sequence[float], smoothness_order: int = 2) -> 'PeriodicCoefficient':
        '''
        Trigonometric interpolant of uniform samples f(j/M), j = 0..M-1.
        '''
        values = np.asarray(values, dtype=float)
        M = values.size
        if M < 3:
            raise ValueError('At least three samples are needed, got %d' % M)
        F = np.fft.rfft(values) / M

        harmonics = []
        for k in range(1, F.size):
            if k > MAX_DEGREE:
                logger.warning(f'Dropping sampled harmonics above degree {MAX_DEGREE} ({F.size - 1 - MAX_DEGREE} terms)')
                break
            if M % 2 == 0 and k == M // 2:
                harmonics.append((k, F[k].real, 0.0))
            else:
                harmonics.append((k, 2 * F[k].real, -2 * F[k].imag))

        return cls(constant_term=F[0].real, harmonics=tuple(harmonics),
                   smoothness_order=smoothness_order, sampled=True)

    @cached_property
    def _k(self) -> np.ndarray:
        return np.array([h[0] for h in self.harmonics], dtype=float)

    @cached_property
    def _a(self) -> np.ndarray:
        return np.array([h[1] for h in self.harmonics], dtype=float)

    @cached_property
    def _b(self) -> np.ndarray:
        return np.array([h[2] for h in self.harmonics], dtype=float)

    @property
    def degree(self) -> int:
        return self.harmonics[-1][0] if self.harmonics else 0

    @property
    def is_zero(self) -> bool:
        return self.constant_term == 0 and all(a == 0 and b == 0 for _, a, b in self.harmonics)

    def _check_order(self, derivative_order: int):
        if derivative_order < 0:
            raise ValueError('Derivative order must be nonnegative, got %d' % derivative_order)
        if self.sampled and derivative_order > self.smoothness_order:
            raise UnsupportedDerivativeError('Derivative of order %d requested from a sampled coefficient of class %d'
                                             % (derivative_order, self.smoothness_order),
                                             errors={'requested': derivative_order, 'available': self.smoothness_order})

    def eval(self, x, derivative_order: int = 0):
        '''
        f^(derivative_order)(x mod 1); x may be a scalar or a numpy array.
        '''
        self._check_order(derivative_order)
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)

        out = np.full(x.shape, self.constant_term if derivative_order == 0 else 0.0)
        if self.harmonics:
            nu = 2 * np.pi * self._k
            theta = np.multiply.outer(x, nu)
            c, s = np.cos(theta), np.sin(theta)
            cc, cs = _COS_ROTATION[derivative_order % 4]
            sc, ss = _SIN_ROTATION[derivative_order % 4]
            scale = nu ** derivative_order
            out = out + ((c * cc + s * cs) * (self._a * scale) + (c * sc + s * ss) * (self._b * scale)).sum(axis=-1)

        return float(out[0]) if scalar else out

    __call__ = eval

    def derivative(self, order: int = 1) -> 'PeriodicCoefficient':
        self._check_order(order)
        harmonics = []
        for k, a, b in self.harmonics:
            scale = (2 * np.pi * k) ** order
            cc, cs = _COS_ROTATION[order % 4]
            sc, ss = _SIN_ROTATION[order % 4]
            harmonics.append((k, scale * (a * cc + b * sc), scale * (a * cs + b * ss)))
        return PeriodicCoefficient(constant_term=self.constant_term if order == 0 else 0.0,
                                   harmonics=tuple(harmonics),
                                   smoothness_order=max(self.smoothness_order - order, 0) if self.sampled else 4,
                                   sampled=self.sampled)

    def reflected(self) -> 'PeriodicCoefficient':
        '''f(1 - x)'''
        return PeriodicCoefficient(constant_term=self.constant_term,
                                   harmonics=tuple((k, a, -b) for k, a, b in self.harmonics),
                                   smoothness_order=self.smoothness_order,
                                   sampled=self.sampled)

    def __add__(self, other: 'PeriodicCoefficient') -> 'PeriodicCoefficient':
        return PeriodicCoefficient(constant_term=self.constant_term + other.constant_term,
                                   harmonics=self.harmonics + other.harmonics,
                                   smoothness_order=min(self.smoothness_order, other.smoothness_order),
                                   sampled=self.sampled or other.sampled)

    def shifted(self, c: float) -> 'PeriodicCoefficient':
        return PeriodicCoefficient(constant_term=self.constant_term + c, harmonics=self.harmonics,
                                   smoothness_order=self.smoothness_order, sampled=self.sampled)

    def mean(self) -> float:
        return self.constant_term

    def taylor(self, x0, order: int, ctx=None) -> list:
        '''
        Taylor coefficients f^(j)(x0) / j!, j = 0..order.
        ctx is an mpmath context for extended precision; plain floats otherwise.
        '''
        if ctx is None:
            ctx = math
            pi, cos, sin = math.pi, math.cos, math.sin
            zero = 0.0
        else:
            pi, cos, sin = ctx.pi, ctx.cos, ctx.sin
            zero = ctx.mpf(0)

        out = [zero] * (order + 1)
        out[0] += self.constant_term
        for k, a, b in self.harmonics:
            nu = 2 * pi * k
            theta = nu * x0
            c, s = cos(theta), sin(theta)
            # cos/sin derivatives cycle with period 4; the factor nu^j / j! is built incrementally
            cycle = [a * c + b * s, -a * s + b * c, -a * c - b * s, a * s - b * c]
            factor = 1
            for j in range(order + 1):
                if j > 0:
                    factor = factor * nu / j
                out[j] += factor * cycle[j % 4]
        return out

    def to_dict(self) -> dict:
        return {'constant': self.constant_term,
                'harmonics': [{'k': k, 'a': a, 'b': b} for k, a, b in self.harmonics],
                'smoothness_order': self.smoothness_order}


def half_odd_frequency(n: int) -> float:
    return np.pi * (2 * n + 1)


def eval(c: PeriodicCoefficient, x, derivative_order: int = 0):
    return c.eval(x, derivative_order)


def fourier(c: PeriodicCoefficient, n: int, method: str = 'closed') -> FourierRecord:
    '''
    f_0, f_cn, f_sn, f_n at the frequency pi(2n+1).

    Each harmonic integrates in closed form: both combination frequencies pi(2n+1) +- 2 pi k are odd
    multiples of pi, so int cos vanishes and int sin equals 2 / frequency.
    '''
    if n < 0:
        raise ValueError('Fourier index must be nonnegative, got %d' % n)
    if method == 'quadrature':
        return fourier_quadrature(c.eval, n)
    elif method != 'closed':
        raise ValueError('Fourier method %s not recognized' % method)

    omega = half_odd_frequency(n)
    f_cn = 0.0
    f_sn = 2 * c.constant_term / omega
    if c.harmonics:
        nu = 2 * np.pi * c._k
        f_cn += float(np.sum(c._b * 2 * nu / (nu ** 2 - omega ** 2)))
        f_sn += float(np.sum(c._a * 2 * omega / (omega ** 2 - nu ** 2)))
    return FourierRecord(n=n, f0=c.constant_term, f_hat_cn=f_cn, f_hat_sn=f_sn)


def l2_norm_sq(c: PeriodicCoefficient) -> float:
    '''int_0^1 f^2 dx by Parseval.'''
    return c.constant_term ** 2 + 0.5 * sum(a ** 2 + b ** 2 for _, a, b in c.harmonics)


def gauss_legendre_panels(breaks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    '''Nodes and weights of the composite 16-point rule on consecutive break points.'''
    breaks = np.asarray(breaks, dtype=float)
    left, right = breaks[:-1], breaks[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * _gl_nodes[None, :]).ravel()
    weights = (half[:, None] * _gl_weights[None, :]).ravel()
    return nodes, weights


def fourier_quadrature(f: Callable, n: int, panels: int = None, tol: float = 1e-13,
                       max_refinements: int = 6) -> FourierRecord:
    '''
    Panel Gauss-Legendre evaluation of the Fourier functionals of any vectorized callable on [0, 1].
    Panels start at length 1/(2n+2); the result is accepted once a halving of every panel changes
    it by less than tol (relative to max(1, |f|)).
    '''
    if n < 0:
        raise ValueError('Fourier index must be nonnegative, got %d' % n)
    omega = half_odd_frequency(n)
    panels = panels or max(2 * n + 2, 8)

    def _integrate(m):
        x, w = gauss_legendre_panels(np.linspace(0.0, 1.0, m + 1))
        fx = np.asarray(f(x), dtype=float)
        return np.array([np.dot(w, fx), np.dot(w, fx * np.cos(omega * x)), np.dot(w, fx * np.sin(omega * x))]), fx

    coarse, fx = _integrate(panels)
    scale = max(1.0, float(np.max(np.abs(fx))))
    estimate = np.inf
    for _ in range(max_refinements):
        panels *= 2
        fine, fx = _integrate(panels)
        estimate = float(np.max(np.abs(fine - coarse)))
        if estimate <= tol * scale:
            return FourierRecord(n=n, f0=fine[0], f_hat_cn=fine[1], f_hat_sn=fine[2])
        coarse = fine

    raise QuadratureAccuracyError('Fourier quadrature at n=%d did not converge, achieved %.3e' % (n, estimate),
                                  errors=estimate)


def endpoint_panels(n: int, degree: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    '''
    Break points refined geometrically (ratio 1/2, 24 panels) toward both s=0 and s=1, with every
    panel split further so that it spans at most a quarter period of the fastest oscillation.
    '''
    u = 0.5 * 0.5 ** np.arange(GEOMETRIC_PANELS)
    breaks = np.concatenate(([0.0], u[::-1], 1.0 - u[1:], [1.0]))
    h_max = 1.0 / (4.0 * (degree + n + 1))
    refined = [breaks[0]]
    for left, right in zip(breaks[:-1], breaks[1:]):
        m = max(1, int(np.ceil((right - left) / h_max)))
        refined.extend(np.linspace(left, right, m + 1)[1:])
    return gauss_legendre_panels(np.array(refined))


def endpoint_weighted_integral(f: Callable, n: int, degree: int = 0) -> float:
    '''int_0^1 exp(-pi(2n+1)s) f(s) ds'''
    s, w = endpoint_panels(n, degree)
    return float(np.dot(w, np.exp(-half_odd_frequency(n) * s) * np.asarray(f(s), dtype=float)))

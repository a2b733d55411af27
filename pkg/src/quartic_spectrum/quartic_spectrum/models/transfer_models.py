#!/usr/bin python3

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple
import math

import numpy as np
import mpmath
from scipy.integrate import solve_ivp
from loguru import logger

from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.models.abstract_model import AbstractModel
from quartic_spectrum.models.model_types import IntegratorConfig
from quartic_spectrum.utils.exceptions import IntegrationFailureError

Entries = Tuple[Tuple[int, int, float], ...]


@dataclass(frozen=True)
class LinearSystem:
    '''
    y' = M(x) y with M(x) = C + (lambda - q(x)) L + p(x) P, each matrix stored as (row, col, value) entries.
    '''
    name: str
    dim: int
    constant: Entries
    spectral: Entries
    potential: Entries

    def _dense(self, entries: Entries) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for r, c, v in entries:
            out[r, c] = v
        return out

    @cached_property
    def C(self) -> np.ndarray:
        return self._dense(self.constant)

    @cached_property
    def L(self) -> np.ndarray:
        return self._dense(self.spectral)

    @cached_property
    def P(self) -> np.ndarray:
        return self._dense(self.potential)


# first order form of y'''' + (p y')' + q y = lambda y in (y, y', y'', y''' + p y')
FUNDAMENTAL = LinearSystem(name='fundamental', dim=4,
                           constant=((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)),
                           spectral=((3, 0, 1.0),),
                           potential=((2, 1, -1.0),))

# second compound of the same system, components ordered 12, 13, 14, 23, 24, 34
WEDGE = LinearSystem(name='wedge', dim=6,
                     constant=((0, 1, 1.0), (1, 3, 1.0), (1, 2, 1.0), (2, 4, 1.0), (3, 4, 1.0), (4, 5, 1.0)),
                     spectral=((4, 0, -1.0), (5, 1, -1.0)),
                     potential=((1, 0, -1.0), (5, 4, -1.0)))
WEDGE_INDEX = {'12': 0, '13': 1, '14': 2, '23': 3, '24': 4, '34': 5}


class SystemMatrixEvaluator:
    '''
    M(x) of a linear system for fixed coefficients and spectral parameter.
    '''
    def __init__(self, p: PeriodicCoefficient, q: PeriodicCoefficient, lam: complex, system: LinearSystem = FUNDAMENTAL):
        self.p = p
        self.q = q
        self.lam = complex(lam)
        self.system = system

    @property
    def abs_z(self) -> float:
        return abs(self.lam) ** 0.25

    def __call__(self, x: float) -> np.ndarray:
        s = self.system
        return s.C + (self.lam - self.q.eval(x)) * s.L + self.p.eval(x) * s.P

    def rhs(self, cols: int):
        dim = self.system.dim
        if cols == 1:
            return lambda x, y: self(x) @ y
        return lambda x, y: (self(x) @ y.reshape(dim, cols)).ravel()


@dataclass
class ScaledTransferMatrix:
    '''
    mantissa * exp(log_scale); log_det is the accumulated log det of the segment propagators.
    '''
    mantissa: np.ndarray            = field(default = None)
    log_scale: float                = field(default = 0.0)
    log_det: complex                = field(default = 0j)
    segments: int                   = field(default = 0)
    precision: str                  = field(default = 'double')

    @property
    def value(self) -> np.ndarray:
        return self.mantissa * np.exp(self.log_scale)


class DoubleTransferModel(AbstractModel):
    '''
    Adaptive 8(7) Runge-Kutta propagation in segments of length at most segment_growth / |z|.
    Matrix-valued solutions are built as products of segment propagators started from the identity.
    '''
    def __init__(self, model_config: IntegratorConfig):
        super().__init__(model_config)
        self.method = model_config.method
        self.renormalize_bound = math.exp(model_config.renormalize_log)

    def _renormalize(self, mantissa: np.ndarray, log_scale: float) -> Tuple[np.ndarray, float]:
        largest = float(np.max(np.abs(mantissa)))
        if largest > self.renormalize_bound or 0 < largest < 1:
            return mantissa / largest, log_scale + math.log(largest)
        return mantissa, log_scale

    def propagate(self, evaluator: SystemMatrixEvaluator, y0):
        cfg = self.model_config
        y0 = np.asarray(y0, dtype=complex)
        matrix_valued = y0.ndim == 2
        dim = evaluator.system.dim
        cols = y0.shape[1] if matrix_valued else 1

        abs_z = evaluator.abs_z
        max_step = cfg.step_cap_factor / (1 + abs_z)
        n_segments = max(1, int(np.ceil(abs_z / cfg.segment_growth)))
        breaks = np.linspace(0.0, 1.0, n_segments + 1)
        f = evaluator.rhs(dim if matrix_valued else 1)

        mantissa, log_scale = self._renormalize(y0.copy(), 0.0)
        log_det = 0j
        for x_a, x_b in zip(breaks[:-1], breaks[1:]):
            start = np.eye(dim, dtype=complex) if matrix_valued else mantissa
            sol = solve_ivp(f, (x_a, x_b), start.ravel(), method=self.method,
                            rtol=self.tolerance, atol=self.tolerance * 1e-2, max_step=max_step)
            end = sol.y[:, -1] if sol.y.size else None
            if not sol.success or end is None or not np.all(np.isfinite(end)):
                reached = float(sol.t[-1]) if sol.t.size else float(x_a)
                raise IntegrationFailureError('Integration at lambda=%s stopped at x=%.6f: %s'
                                              % (evaluator.lam, reached, sol.message), errors=reached)

            if matrix_valued:
                end = end.reshape(dim, dim)
                sign, logabs = np.linalg.slogdet(end)
                log_det += np.log(sign) + logabs
                mantissa = end @ mantissa
            else:
                mantissa = end
            mantissa, log_scale = self._renormalize(mantissa, log_scale)

        if self.verbose:
            logger.debug(f'{evaluator.system.name} at lambda={evaluator.lam:.6g}: {n_segments} segments, log scale {log_scale:.3f}')
        return mantissa, log_scale, complex(log_det), n_segments


class ExtendedTransferModel(AbstractModel):
    '''
    Taylor series stepper in mpmath arithmetic. Taylor coefficients of the solution follow from
    (m+1) Y_{m+1} = C Y_m + lambda L Y_m - L (q * Y)_m + P (p * Y)_m with * the Cauchy product.
    '''
    def __init__(self, model_config: IntegratorConfig):
        super().__init__(model_config)
        self.dps = model_config.extended_dps
        self.order = model_config.taylor_order

    def _step(self, system: LinearSystem, pt, qt, lam, Y0, h, zero):
        dim, cols = system.dim, len(Y0[0])
        coeffs = [Y0]
        for m in range(self.order):
            Ym = coeffs[m]
            new = [[zero] * cols for _ in range(dim)]
            for r, c, v in system.constant:
                for j in range(cols):
                    new[r][j] += v * Ym[c][j]
            for r, c, v in system.spectral:
                for j in range(cols):
                    conv = sum(qt[i] * coeffs[m - i][c][j] for i in range(m + 1)) if qt is not None else zero
                    new[r][j] += v * (lam * Ym[c][j] - conv)
            if pt is not None:
                for r, c, v in system.potential:
                    for j in range(cols):
                        new[r][j] += v * sum(pt[i] * coeffs[m - i][c][j] for i in range(m + 1))
            coeffs.append([[e / (m + 1) for e in row] for row in new])

        out = coeffs[self.order]
        for m in range(self.order - 1, -1, -1):
            out = [[coeffs[m][r][j] + h * out[r][j] for j in range(cols)] for r in range(dim)]
        return out

    def propagate(self, evaluator: SystemMatrixEvaluator, y0):
        system = evaluator.system
        p, q = evaluator.p, evaluator.q
        y0 = np.asarray(y0, dtype=complex)
        matrix_valued = y0.ndim == 2
        dim = system.dim

        degree = max(p.degree, q.degree)
        h_max = min(2.0 / (evaluator.abs_z + 1), 2.0 / (2 * np.pi * degree + 1))
        n_steps = max(1, int(np.ceil(1.0 / h_max)))

        with mpmath.workdps(self.dps):
            ctx = mpmath.mp
            zero = ctx.mpc(0)
            lam = ctx.mpc(evaluator.lam.real, evaluator.lam.imag)
            h = ctx.mpf(1) / n_steps
            identity = [[ctx.mpc(1) if r == c else zero for c in range(dim)] for r in range(dim)]
            if matrix_valued:
                Y = [[ctx.mpc(v.real, v.imag) for v in row] for row in y0]
            else:
                Y = [[ctx.mpc(v.real, v.imag)] for v in y0]

            log_det = zero
            for k in range(n_steps):
                x0 = k * h
                pt = None if p.is_zero else p.taylor(x0, self.order, ctx)
                qt = None if q.is_zero else q.taylor(x0, self.order, ctx)
                if matrix_valued:
                    Phi = self._step(system, pt, qt, lam, identity, h, zero)
                    log_det += ctx.log(ctx.det(ctx.matrix(Phi)))
                    Y = [[ctx.fsum(Phi[r][i] * Y[i][j] for i in range(dim)) for j in range(dim)] for r in range(dim)]
                else:
                    Y = self._step(system, pt, qt, lam, Y, h, zero)

            largest = max(abs(v) for row in Y for v in row)
            if not ctx.isfinite(largest):
                raise IntegrationFailureError('Extended integration at lambda=%s overflowed' % evaluator.lam, errors=1.0)
            if largest == 0:
                largest = ctx.mpf(1)
            mantissa = np.array([[complex(v / largest) for v in row] for row in Y])
            log_scale = float(ctx.log(largest))
            log_det = complex(log_det)

        if not matrix_valued:
            mantissa = mantissa[:, 0]
        if self.verbose:
            logger.debug(f'{system.name} at lambda={evaluator.lam:.6g}: {n_steps} Taylor steps of order {self.order}')
        return mantissa, log_scale, log_det, n_steps


def get_transfer_model(model_config: IntegratorConfig) -> AbstractModel:
    '''
    Helper function for getting a transfer model class from its precision name
    '''
    if model_config.model_name == 'double':
        return DoubleTransferModel(model_config)
    elif model_config.model_name == 'extended':
        return ExtendedTransferModel(model_config)
    else:
        raise ValueError('Unrecognized transfer model name: %s' % model_config.model_name)

'''
Eigenvalue localization, counting and refinement.

Above the crossover index N* every eigenvalue mu_n sits alone in the disk |z - pi/2 - pi n| < pi/4 of
the z = mu^(1/4) plane and is bracketed on the real diameter of that disk. Below N* both halves of the
real lambda axis are scanned through lambda = +-s^4, 0 <= s <= pi N*, and the number of sign changes is
checked against the winding number of D around the ball |lambda| < (pi N*)^4. All root finding happens
in s, where dmu = 4 s^3 ds keeps the targets well scaled.
'''
from functools import partial
from typing import Callable, List, Tuple

import numpy as np
from scipy.optimize import brentq
from loguru import logger

from quartic_spectrum.pytypes import CharValue, EigenvalueRecord, SearchPlan, WindingReport
from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.characteristic import char_det
from quartic_spectrum.models.model_types import IntegratorConfig
from quartic_spectrum.utils.exceptions import ContourTooCloseError, MissingRootError
from quartic_spectrum.utils.parallel import parallel_map

CONTOUR_SAMPLES = 64
MAX_CONTOUR_SAMPLES = 1 << 14
MAX_BRACKET_WIDENINGS = 6
EXTENDED_SECANT_STEPS = 4


def disk_center(n: int) -> float:
    return np.pi / 2 + np.pi * n


def ball_radius(N: int) -> float:
    '''|lambda| radius of the ball holding mu_0 .. mu_N'''
    return (np.pi / 2 + np.pi * (N + 0.5)) ** 4


class RealAxisCharacteristic:
    '''
    s -> D(side * s^4) for real s >= 0, as a real number scaled by exp(-log_ref) so that it stays
    continuous in s and finite over a disk diameter. side = -1 walks the negative lambda axis, where
    D is real as well since the coefficients are.
    '''
    def __init__(self, p: PeriodicCoefficient, q: PeriodicCoefficient, config: IntegratorConfig, log_ref: float = 0.0,
                 side: float = 1.0):
        self.p = p
        self.q = q
        self.config = config
        self.log_ref = log_ref
        self.side = side
        self.evaluations = 0

    def char_value(self, z: float) -> CharValue:
        self.evaluations += 1
        return char_det(self.p, self.q, self.side * float(z) ** 4, config=self.config)

    def __call__(self, z: float) -> float:
        D = self.char_value(z)
        return float(D.mantissa.real * np.exp(D.log_scale - self.log_ref))


def _winding_number(evaluate: Callable[[float], CharValue], residual_tol: float) -> Tuple[int, int]:
    '''
    Argument principle on a closed contour parametrized by theta in [0, 2 pi). The sampling doubles,
    reusing earlier samples, until every phase increment is below pi/2.
    '''
    def _sample(theta):
        D = evaluate(theta)
        if not abs(D.mantissa) >= residual_tol:
            raise ContourTooCloseError('Contour passes within %.1e of a zero of D at theta=%.6f'
                                       % (residual_tol, theta), errors=theta)
        return complex(D.mantissa)

    N = CONTOUR_SAMPLES
    thetas = 2 * np.pi * np.arange(N) / N
    values = np.array([_sample(t) for t in thetas])
    while True:
        increments = np.angle(np.roll(values, -1) / values)
        if np.max(np.abs(increments)) < np.pi / 2:
            return int(round(np.sum(increments) / (2 * np.pi))), N
        if 2 * N > MAX_CONTOUR_SAMPLES:
            raise ContourTooCloseError('Contour phase not resolved with %d samples' % N, errors=N)

        midpoints = thetas + np.pi / N
        new_values = np.array([_sample(t) for t in midpoints])
        thetas = np.stack([thetas, midpoints], axis=1).ravel()
        values = np.stack([values, new_values], axis=1).ravel()
        N *= 2
        logger.debug(f'Refined contour to {N} samples')


def _double_config(config: IntegratorConfig = None) -> IntegratorConfig:
    return config if config is not None else IntegratorConfig.for_precision('double')


def count_zeros_in_disk(p: PeriodicCoefficient, q: PeriodicCoefficient, n: int, radius: float = np.pi / 4,
                        residual_tol: float = 1e-9, config: IntegratorConfig = None, samples_out: list = None) -> int:
    if n < 1:
        raise ValueError('Disk index must be at least 1, got %d' % n)
    config = _double_config(config)
    c = disk_center(n)

    def _evaluate(theta):
        z = c + radius * np.exp(1j * theta)
        return char_det(p, q, z ** 4, config=config)

    winding, samples = _winding_number(_evaluate, residual_tol)
    if samples_out is not None:
        samples_out.append(samples)
    logger.debug(f'Disk n={n}, radius {radius:.4f}: winding {winding} from {samples} samples')
    return winding


def count_zeros_in_ball(p: PeriodicCoefficient, q: PeriodicCoefficient, N: int, residual_tol: float = 1e-9,
                        config: IntegratorConfig = None) -> int:
    if N < 0:
        raise ValueError('Ball index must be nonnegative, got %d' % N)
    config = _double_config(config)
    R = ball_radius(N)

    def _evaluate(theta):
        return char_det(p, q, R * np.exp(1j * theta), config=config)

    winding, samples = _winding_number(_evaluate, residual_tol)
    logger.debug(f'Ball N={N}: winding {winding} from {samples} samples')
    return winding


def localize(p: PeriodicCoefficient, q: PeriodicCoefficient, n_range: Tuple[int, int], residual_tol: float = 1e-9,
             config: IntegratorConfig = None) -> List[WindingReport]:
    '''
    Winding count of every disk in n_range (n >= 1). A contour that grazes a zero is retried with the
    radius perturbed by +5% and then -5%.
    '''
    reports = []
    for n in range(max(1, n_range[0]), n_range[1] + 1):
        c = disk_center(n)
        for radius in (np.pi / 4, 1.05 * np.pi / 4, 0.95 * np.pi / 4):
            samples = []
            try:
                winding = count_zeros_in_disk(p, q, n, radius=radius, residual_tol=residual_tol,
                                              config=config, samples_out=samples)
                break
            except ContourTooCloseError as e:
                logger.warning(f'Disk n={n} radius {radius:.4f}: {e}; perturbing radius')
        else:
            raise ContourTooCloseError('Every perturbed contour of disk n=%d grazes a zero of D' % n, errors=n)

        z_interval = (c - radius, c + radius)
        reports.append(WindingReport(index=n, z_center=c, radius=radius, z_interval=z_interval,
                                     lambda_interval=(z_interval[0] ** 4, z_interval[1] ** 4),
                                     winding=winding, samples=samples[0]))
    return reports


def _refine(f: RealAxisCharacteristic, a: float, b: float, plan: SearchPlan) -> Tuple[float, Tuple[float, float], int]:
    '''
    Brent refinement of a sign change of f on (a, b), then a bracket of width z_abs_tol around the root.
    '''
    root, result = brentq(f, a, b, xtol=plan.z_abs_tol / 4, rtol=4 * np.finfo(float).eps,
                          maxiter=200, full_output=True)
    half = plan.z_abs_tol / 2
    for _ in range(MAX_BRACKET_WIDENINGS + 1):
        lo, hi = max(a, root - half), min(b, root + half)
        if f(lo) * f(hi) <= 0:
            return root, (lo, hi), result.iterations
        half *= 2
        logger.warning(f'No sign change within +-{half / 2:.2e} of z={root:.15g}; widening bracket')
    return root, (a, b), result.iterations


def _polish_extended(root: float, bracket: Tuple[float, float], p, q, extended: IntegratorConfig,
                     side: float = 1.0) -> Tuple[float, int, CharValue]:
    '''Secant steps on the extended precision D starting from the double precision bracket.'''
    f = RealAxisCharacteristic(p, q, extended, side=side)
    f.log_ref = f.char_value(root).log_scale
    z0, z1 = bracket
    f0, f1 = f(z0), f(z1)
    steps = 0
    for _ in range(EXTENDED_SECANT_STEPS):
        if f1 == f0:
            break
        z2 = z1 - f1 * (z1 - z0) / (f1 - f0)
        steps += 1
        z0, f0, z1 = z1, f1, z2
        f1 = f(z1)
        if abs(z1 - z0) <= 4 * np.finfo(float).eps * abs(z1):
            break
    if not bracket[0] <= z1 <= bracket[1]:
        logger.warning(f'Extended polish left the bracket at z={root:.15g}; keeping the double precision root')
        z1 = root
    return z1, steps, f.char_value(z1)


def _finish_record(n: int, root: float, bracket, iterations: int, f: RealAxisCharacteristic,
                   method: str, p, q, extended: IntegratorConfig = None) -> EigenvalueRecord:
    if extended is not None:
        root, steps, D = _polish_extended(root, bracket, p, q, extended, side=f.side)
        iterations += steps
        precision = 'extended'
    else:
        D = f.char_value(root)
        precision = 'double'
    if f.side < 0:
        # signed real coordinate, mu = z |z|^3
        root, bracket = -root, (-bracket[1], -bracket[0])
    return EigenvalueRecord(index=n, mu=root * abs(root) ** 3, z_root=root, bracket=tuple(bracket),
                            char_residual=float(abs(D.mantissa)), refinement_iterations=int(iterations),
                            precision=precision, method=method)


def _solve_disk(n: int, p: PeriodicCoefficient, q: PeriodicCoefficient, plan: SearchPlan,
                config: IntegratorConfig, extended: IntegratorConfig = None) -> EigenvalueRecord:
    c = disk_center(n)
    a, b = c - np.pi / 4, c + np.pi / 4
    f = RealAxisCharacteristic(p, q, config)
    f.log_ref = f.char_value(c).log_scale
    fa, fb = f(a), f(b)
    if fa * fb > 0:
        raise MissingRootError('No sign change of D on the diameter of disk n=%d' % n,
                               errors={'index': n, 'values': (fa, fb)})

    root, bracket, iterations = _refine(f, a, b, plan)
    record = _finish_record(n, root, bracket, iterations, f, 'disk', p, q, extended)
    logger.info(f'mu_{n} = {record.mu:.15g} (z = {record.z_root:.15g}, {f.evaluations} evaluations)')
    return record


def _scan_side(f: RealAxisCharacteristic, plan: SearchPlan) -> List[Tuple[float, float]]:
    grid = np.arange(0.0, plan.low_region_z_max, plan.low_region_step)
    grid = np.append(grid, plan.low_region_z_max)
    values = np.array([f(z) for z in grid])

    brackets = []
    for k in range(grid.size - 1):
        if values[k] == 0:
            logger.warning(f'D vanishes on the scan grid at lambda={f.side * grid[k] ** 4:.15g}')
        if values[k] * values[k + 1] < 0:
            brackets.append((grid[k], grid[k + 1]))
    return brackets


def _scan_low(p: PeriodicCoefficient, q: PeriodicCoefficient, plan: SearchPlan, config: IntegratorConfig,
              extended: IntegratorConfig = None) -> List[EigenvalueRecord]:
    '''
    Real eigenvalues in |lambda| < (pi N*)^4, labelled in ascending order. Negative eigenvalues come from
    the scan of D(-s^4), whose brackets are walked from large s down.
    '''
    negative = RealAxisCharacteristic(p, q, config, side=-1.0)
    positive = RealAxisCharacteristic(p, q, config)
    brackets = [(negative, a, b) for a, b in reversed(_scan_side(negative, plan))]
    if brackets:
        logger.info(f'{len(brackets)} negative eigenvalues in the low region')
    brackets += [(positive, a, b) for a, b in _scan_side(positive, plan)]

    records = []
    for n, (f, a, b) in enumerate(brackets):
        root, bracket, iterations = _refine(f, a, b, plan)
        records.append(_finish_record(n, root, bracket, iterations, f, 'scan', p, q, extended))

    if plan.crossover_index > 0:
        winding = count_zeros_in_ball(p, q, plan.crossover_index - 1, plan.residual_tol, config)
        if winding != len(records):
            raise MissingRootError('Scan found %d real roots with |lambda| < %.6g but the winding number is %d; '
                                   'double roots or roots closer than the scan step are present'
                                   % (len(records), ball_radius(plan.crossover_index - 1), winding),
                                   errors={'records': records, 'sign_changes': len(records), 'winding': winding})
    return records


def solve_range(p: PeriodicCoefficient, q: PeriodicCoefficient, plan: SearchPlan, precision: str = 'double',
                config: IntegratorConfig = None, threads: int = 1, quiet: bool = False) -> List[EigenvalueRecord]:
    config = _double_config(config)
    extended = IntegratorConfig.for_precision('extended') if precision == 'extended' else None
    if precision not in ('double', 'extended'):
        raise ValueError('Precision %s not recognized' % precision)

    records = []
    if plan.scan_indices:
        wanted = set(plan.scan_indices)
        records += [r for r in _scan_low(p, q, plan, config, extended) if r.index in wanted]

    solve = partial(_solve_disk, p=p, q=q, plan=plan, config=config, extended=extended)
    records += parallel_map(solve, plan.disk_indices, threads=threads, desc='eigenvalues', quiet=quiet)
    records.sort(key=lambda r: r.index)

    for prev, cur in zip(records[:-1], records[1:]):
        if not prev.mu < cur.mu:
            raise MissingRootError('Eigenvalues mu_%d = %.15g and mu_%d = %.15g are not strictly increasing'
                                   % (prev.index, prev.mu, cur.index, cur.mu), errors={'records': records})
    return records

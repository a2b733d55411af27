'''
High energy expansions of the eigenvalues mu_n, the kappa sequences, the phase functions alpha/beta,
the leading terms gamma_{sigma,1/2} of det phi, and the asymptotics of D itself.

Throughout m = pi/2 + pi n and w = pi(2n+1) = 2m.
'''
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
from loguru import logger

from quartic_spectrum.pytypes import AsymptoticCharValue, AsymptoticEigenvalue, EigenvalueRecord, KappaValue, ResidualFit
from quartic_spectrum.coefficients import (PeriodicCoefficient, endpoint_weighted_integral, fourier,
                                           half_odd_frequency, l2_norm_sq)
from quartic_spectrum.characteristic import z_of_lambda
from quartic_spectrum.utils.exceptions import UnsupportedOrderError

ORDERS = ('rough', 'L1', 'p1', 'p2', 'p3_full')
FORMS = ('cosine', 'sine')

# derivatives of (p, q) each order reads
_REQUIRED = {'rough': (0, 0), 'L1': (0, 0), 'p1': (1, 0), 'p2': (2, 0), 'p3_full': (3, 1)}
_KAPPA_REQUIRED = {1: (0, 0), 2: (1, 0), 3: (2, 0), 4: (3, 1)}

NEAR_ZERO_COS = 1e-3
MIN_ASYMPTOTIC_Z = 10.0


@dataclass(frozen=True)
class PhasePair:
    sigma: int
    alpha: Callable[[complex], complex]
    beta: Callable[[complex], complex]


def _check_smoothness(p: PeriodicCoefficient, q: PeriodicCoefficient, needed: Tuple[int, int], label: str):
    for c, k, name in ((p, needed[0], 'p'), (q, needed[1], 'q')):
        if c.sampled and c.smoothness_order < k:
            raise UnsupportedOrderError('%s needs %s of class %d, the coefficient declares class %d'
                                        % (label, name, k, c.smoothness_order),
                                        errors={'coefficient': name, 'needed': k, 'declared': c.smoothness_order})


def _check_sigma(sigma: int):
    if sigma not in (1, 2, 3, 4):
        raise ValueError('Reduction order sigma must be 1..4, got %s' % str(sigma))


def mu_asymptotic(p: PeriodicCoefficient, q: PeriodicCoefficient, n: int, order: str = 'p3_full',
                  form: str = 'cosine') -> AsymptoticEigenvalue:
    """
    Truncated expansion of mu_n. 'p3_full' comes in two equivalent forms: 'cosine' in p_cn, q_cn and
    'sine' in p'''_sn, q'_sn; they agree for smooth coefficients.
    """
    if order not in ORDERS:
        raise UnsupportedOrderError('Expansion order %s not recognized' % order, errors=order)
    if form not in FORMS:
        raise ValueError('Expansion form %s not recognized' % form)
    if n < 0:
        raise ValueError('Eigenvalue index must be nonnegative, got %d' % n)
    _check_smoothness(p, q, _REQUIRED[order], 'Order %s' % order)

    m = np.pi / 2 + np.pi * n
    w = half_odd_frequency(n)
    p0, q0 = p.mean(), q.mean()
    terms = {'leading': m ** 4}

    if order == 'L1':
        terms['p_term'] = m ** 2 * (fourier(p, n).f_hat_cn - p0)
    elif order == 'p1':
        terms['p_term'] = -m ** 2 * p0
        terms['p_prime_term'] = -m * fourier(p.derivative(1), n).f_hat_sn / 2
    elif order in ('p2', 'p3_full'):
        norm_sq = l2_norm_sq(p)
        dp0 = p.eval(0.0, 1)
        q_cn = fourier(q, n).f_hat_cn
        if order == 'p2':
            terms['p_term'] = -m ** 2 * p0
            terms['constant_block'] = (p0 ** 2 - norm_sq) / 8 + q0 - dp0 / 2
            terms['oscillatory_block'] = -fourier(p.derivative(2), n).f_hat_cn / 4 + q_cn
        elif form == 'cosine':
            terms['p_term'] = m ** 2 * (fourier(p, n).f_hat_cn - p0)
            terms['constant_block'] = (p0 ** 2 - norm_sq) / 8 + q0
            terms['oscillatory_block'] = q_cn
        else:
            terms['p_term'] = -m ** 2 * p0
            terms['constant_block'] = (p0 ** 2 - norm_sq) / 8 + q0 - dp0 / 2
            terms['oscillatory_block'] = fourier(p.derivative(3), n).f_hat_sn / (4 * w) \
                                         - fourier(q.derivative(1), n).f_hat_sn / w

    return AsymptoticEigenvalue(index=n, order=order, value=float(sum(terms.values())),
                                terms={k: float(v) for k, v in terms.items()},
                                form=form if order == 'p3_full' else 'cosine')


def z_asymptotic(p: PeriodicCoefficient, q: PeriodicCoefficient, n: int, order: str = 'p3_full') -> float:
    '''Expansion of the quartic root z_n = mu_n^(1/4).'''
    m = np.pi / 2 + np.pi * n
    w = half_odd_frequency(n)
    if order == 'rough':
        return m
    elif order == 'L1':
        return m + (fourier(p, n).f_hat_cn - p.mean()) / (2 * w)
    elif order == 'p3_full':
        _check_smoothness(p, q, _REQUIRED[order], 'Order p3_full')
        p0, q0 = p.mean(), q.mean()
        return m - p0 / (2 * w) \
               + (-l2_norm_sq(p) + 8 * q0 - 2 * p0 ** 2 - 4 * p.eval(0.0, 1)) / (4 * w ** 3) \
               + (fourier(p.derivative(3), n).f_hat_sn - 4 * fourier(q.derivative(1), n).f_hat_sn) / (2 * w ** 4)
    raise UnsupportedOrderError('No z-space expansion for order %s' % order, errors=order)


def kappa(p: PeriodicCoefficient, q: PeriodicCoefficient, sigma: int, n: int) -> KappaValue:
    """
    kappa_{sigma,n} = c_sigma int_0^1 exp(-pi(2n+1)s) g_sigma(s) ds with
      g_1 = p(s) - p(1-s)                                  c_1 = 1/4
      g_2 = p'(s) + p'(1-s)                                c_2 = 1/8
      g_3 = p''(s) - p''(1-s) - 4q(s) + 4q(1-s)            c_3 = 1/16
      g_4 = p'''(s) + p'''(1-s) - 4q'(s) - 4q'(1-s)        c_4 = 1/32
    """
    _check_sigma(sigma)
    if n < 0:
        raise ValueError('Kappa index must be nonnegative, got %d' % n)
    _check_smoothness(p, q, _KAPPA_REQUIRED[sigma], 'kappa_%d' % sigma)

    if sigma == 1:
        g, c = lambda s: p.eval(s) - p.eval(1 - s), 0.25
    elif sigma == 2:
        g, c = lambda s: p.eval(s, 1) + p.eval(1 - s, 1), 0.125
    elif sigma == 3:
        g, c = lambda s: p.eval(s, 2) - p.eval(1 - s, 2) - 4 * q.eval(s) + 4 * q.eval(1 - s), 1 / 16
    else:
        g, c = lambda s: p.eval(s, 3) + p.eval(1 - s, 3) - 4 * q.eval(s, 1) - 4 * q.eval(1 - s, 1), 1 / 32

    value = c * endpoint_weighted_integral(g, n, degree=max(p.degree, q.degree))
    return KappaValue(sigma=sigma, n=n, value=value)


def psi_pair(p: PeriodicCoefficient) -> Tuple[complex, complex]:
    dp0 = p.eval(0.0, 1)
    return (1 - 1j) * dp0 / 8, (1 + 1j) * dp0 / 8


def phase_pair(p: PeriodicCoefficient, q: PeriodicCoefficient, sigma: int) -> PhasePair:
    '''alpha_sigma = int T_{sigma,2} ds and beta_sigma = int T_{sigma,1} ds in closed form.'''
    _check_sigma(sigma)
    p0, q0 = p.mean(), q.mean()
    if sigma <= 2:
        return PhasePair(sigma=sigma,
                         alpha=lambda z: 1 + p0 / (4 * z ** 2),
                         beta=lambda z: 1j - 1j * p0 / (4 * z ** 2))
    norm_sq = l2_norm_sq(p)
    return PhasePair(sigma=sigma,
                     alpha=lambda z: 1 + norm_sq / (32 * z ** 4) - q0 / (4 * z ** 4) + p0 / (4 * z ** 2),
                     beta=lambda z: 1j + 1j * norm_sq / (32 * z ** 4) - 1j * q0 / (4 * z ** 4) - 1j * p0 / (4 * z ** 2))


def gamma_leading(p: PeriodicCoefficient, q: PeriodicCoefficient, sigma: int, n: int, z: complex) -> Tuple[complex, complex]:
    _check_sigma(sigma)
    if z == 0:
        raise ValueError('gamma terms are defined for z != 0')
    _check_smoothness(p, q, _KAPPA_REQUIRED[sigma], 'gamma_%d' % sigma)
    k = kappa(p, q, sigma, n).value

    if sigma == 1:
        return 1j * fourier(p, n).f_hat_cn / (2 * z) + k / z, k / z
    elif sigma == 2:
        return -1j * fourier(p.derivative(1), n).f_hat_sn / (4 * z ** 2) + k / z ** 2, k / z ** 2

    psi1, psi2 = psi_pair(p)
    if sigma == 3:
        g1 = psi1 / z ** 3 - 1j * fourier(p.derivative(2), n).f_hat_cn / (8 * z ** 3) \
             + 1j * fourier(q, n).f_hat_cn / (2 * z ** 3) + k / z ** 3
        return g1, psi2 / z ** 3 + k / z ** 3

    p00 = p.eval(0.0) ** 2
    g1 = psi1 / z ** 3 + 3 * p00 / (32 * z ** 4) + 1j * fourier(p.derivative(3), n).f_hat_sn / (16 * z ** 4) \
         - 1j * fourier(q.derivative(1), n).f_hat_sn / (4 * z ** 4) + k / z ** 4
    g2 = psi2 / z ** 3 + 3 * p00 / (32 * z ** 4) + k / z ** 4
    return g1, g2


def _scaled_trig(w: complex) -> Tuple[complex, complex, float]:
    '''cos w and sin w divided by exp(|Im w|), plus that exponent.'''
    s = abs(w.imag)
    a, b = np.exp(1j * w - s), np.exp(-1j * w - s)
    return (a + b) / 2, (a - b) / 2j, s


def _disk_index(z: complex) -> int:
    return max(0, int(round((z.real - np.pi / 2) / np.pi)))


def det_phi_leading(p: PeriodicCoefficient, q: PeriodicCoefficient, sigma: int, n: int, z: complex) -> complex:
    '''4i z^6 exp(-i beta z)(2 cos(alpha z) + exp(-i alpha z) gamma_1 + exp(i alpha z) gamma_2)'''
    z = complex(z)
    phases = phase_pair(p, q, sigma)
    a, b = phases.alpha(z), phases.beta(z)
    g1, g2 = gamma_leading(p, q, sigma, n, z)
    return complex(4j * z ** 6 * np.exp(-1j * b * z)
                   * (2 * np.cos(a * z) + np.exp(-1j * a * z) * g1 + np.exp(1j * a * z) * g2))


def char_from_determinant_form(p: PeriodicCoefficient, q: PeriodicCoefficient, sigma: int,
                               lam: complex) -> AsymptoticCharValue:
    '''D = det phi / det A(0, z) with det A(0, z) = -16i z^6 (1 + 3 p(0)^2 / 32 z^4) to the same order.'''
    z = z_of_lambda(lam)
    if abs(z) <= MIN_ASYMPTOTIC_Z:
        raise ValueError('Asymptotic form needs |z| > %g, got %.4g' % (MIN_ASYMPTOTIC_Z, abs(z)))
    n = _disk_index(z)
    denominator = -16j * z ** 6 * (1 + 3 * p.eval(0.0) ** 2 / (32 * z ** 4))
    value = det_phi_leading(p, q, sigma, n, z) / denominator
    log_scale = float(np.log(abs(value))) if value != 0 else 0.0
    return AsymptoticCharValue(mantissa=value * np.exp(-log_scale), log_scale=log_scale, z=z, n=n)


def char_asymptotic(p: PeriodicCoefficient, q: PeriodicCoefficient, lam: complex) -> AsymptoticCharValue:
    '''
    D(lambda) ~ -(exp(-i beta_4 z) cos(alpha_4 z)/2)(1 + kappa_{4,n}/z^4 + p'(0)(1 - tan(alpha_4 z))/8z^3),
    with n the disk index nearest to z.
    '''
    z = z_of_lambda(lam)
    if abs(z) <= MIN_ASYMPTOTIC_Z:
        raise ValueError('Asymptotic form needs |z| > %g, got %.4g' % (MIN_ASYMPTOTIC_Z, abs(z)))
    n = _disk_index(z)
    phases = phase_pair(p, q, 4)
    a, b = phases.alpha(z), phases.beta(z)
    k4 = kappa(p, q, 4, n).value
    dp0 = p.eval(0.0, 1)

    cos_s, sin_s, s = _scaled_trig(a * z)
    near_zero = abs(cos_s) < NEAR_ZERO_COS
    if near_zero:
        logger.warning(f'|cos(alpha_4 z)| = {abs(cos_s):.2e} at z={z:.6g}; tangent term unreliable')
    tan = sin_s / cos_s if cos_s != 0 else np.inf
    bracket = 1 + k4 / z ** 4 + dp0 * (1 - tan) / (8 * z ** 3)

    exponent = -1j * b * z
    mantissa = -np.exp(1j * exponent.imag) * cos_s / 2 * bracket
    return AsymptoticCharValue(mantissa=complex(mantissa), log_scale=float(exponent.real + s), z=z, n=n,
                               near_zero=bool(near_zero))


def noise_floor(mu: float, precision: str = 'double') -> float:
    eps = np.finfo(float).eps
    return (64 if precision == 'double' else 4) * eps * abs(mu)


def fit_residual_order(numeric: List[EigenvalueRecord], p: PeriodicCoefficient, q: PeriodicCoefficient,
                       order: str, form: str = 'cosine') -> ResidualFit:
    '''
    Least squares slope of log|mu_n(numeric) - mu_n(order)| against log n. Residuals under the noise
    floor of the records' precision are excluded; fewer than three usable points is inconclusive.
    '''
    records = sorted(numeric, key=lambda r: r.index)
    indices = [r.index for r in records]
    if len(records) < 6:
        raise ValueError('Residual fit needs at least 6 records, got %d' % len(records))
    if indices[0] < 4 or indices != list(range(indices[0], indices[0] + len(indices))):
        raise ValueError('Residual fit needs consecutive indices n >= 4, got %s' % indices)

    residuals, excluded, xs, ys = [], [], [], []
    for r in records:
        res = r.mu - mu_asymptotic(p, q, r.index, order, form).value
        residuals.append((r.index, float(res)))
        if abs(res) < noise_floor(r.mu, r.precision):
            excluded.append(r.index)
        else:
            xs.append(np.log(r.index))
            ys.append(np.log(abs(res)))

    if len(xs) < 3:
        logger.info(f'Residual fit for order {order} inconclusive: {len(excluded)} of {len(records)} at the noise floor')
        return ResidualFit(order=order, status='inconclusive', residuals=residuals, excluded_points=excluded)

    slope, intercept = np.polyfit(xs, ys, 1)
    logger.info(f'Residual fit for order {order}: slope {slope:.3f}, intercept {intercept:.3f}')
    return ResidualFit(order=order, slope=float(slope), intercept=float(intercept), status='ok',
                       residuals=residuals, excluded_points=excluded)

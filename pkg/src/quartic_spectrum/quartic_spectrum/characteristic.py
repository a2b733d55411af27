'''
Characteristic function D(lambda) = -(A11 A33 - A13 A31)(1, lambda), whose zeros are the eigenvalues,
the unperturbed D0(lambda) = -cos z cosh z and the branch z = lambda^(1/4), arg z in (-pi/4, pi/4].
'''
import numpy as np

from quartic_spectrum.pytypes import CharValue
from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.models.model_types import IntegratorConfig
from quartic_spectrum.models.transfer_models import WEDGE_INDEX
from quartic_spectrum.ode_core import integrate_fundamental, integrate_wedge


def z_of_lambda(lam: complex) -> complex:
    lam = complex(lam)
    if lam == 0:
        return 0j
    arg = np.angle(lam)
    if arg <= -np.pi:
        arg = np.pi
    return complex(abs(lam) ** 0.25 * np.exp(0.25j * arg))


def char_det(p: PeriodicCoefficient, q: PeriodicCoefficient, lam: complex, tolerance: float = None,
             method: str = 'wedge', precision: str = 'double', config: IntegratorConfig = None) -> CharValue:
    z = z_of_lambda(lam)
    if method == 'wedge':
        mantissa, log_scale = integrate_wedge(p, q, lam, tolerance, precision, config)
        return CharValue(mantissa=complex(-mantissa[WEDGE_INDEX['13']]), log_scale=log_scale, z=z)
    elif method == 'minor':
        # loses about Re z / ln 10 digits to cancellation; kept as a cross-check of the wedge form
        A = integrate_fundamental(p, q, lam, tolerance, precision, config)
        m = A.mantissa
        return CharValue(mantissa=complex(-(m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0])), log_scale=2 * A.log_scale, z=z)
    else:
        raise ValueError('Characteristic method %s not recognized' % method)


def char_det_unperturbed_scaled(lam: complex) -> CharValue:
    '''
    -cos z cosh z in log-magnitude form. With s = sgn Re z and t = sgn Im z,
    cos z = e^{-itz}(1 + e^{2itz})/2 and cosh z = e^{sz}(1 + e^{-2sz})/2 with both brackets bounded.
    '''
    z = z_of_lambda(lam)
    s = 1.0 if z.real >= 0 else -1.0
    t = 1.0 if z.imag >= 0 else -1.0
    mantissa = -0.25 * (1 + np.exp(2j * t * z)) * (1 + np.exp(-2 * s * z)) \
               * np.exp(-1j * t * z.real) * np.exp(1j * s * z.imag)
    return CharValue(mantissa=complex(mantissa), log_scale=abs(z.real) + abs(z.imag), z=z)


def char_det_unperturbed(lam: complex) -> complex:
    z = z_of_lambda(lam)
    if abs(z.real) > 300 or abs(z.imag) > 300:
        return char_det_unperturbed_scaled(lam).value
    return complex(-np.cos(z) * np.cosh(z))


def char_ratio(a: CharValue, b: CharValue) -> complex:
    '''a / b with the scale exponents subtracted before exponentiating.'''
    return complex(a.mantissa / b.mantissa * np.exp(a.log_scale - b.log_scale))

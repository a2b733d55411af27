"""
Fundamental system A' = P A, A(0) = I of the operator y'''' + (p y')' + q y on [0, 1], with rows
(y, y', y'', y''' + p y'), and the wedge product of its first and third columns.
"""
from typing import Tuple

import numpy as np

from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.models.model_types import IntegratorConfig
from quartic_spectrum.models.transfer_models import (FUNDAMENTAL, WEDGE, WEDGE_INDEX, ScaledTransferMatrix,
                                                     SystemMatrixEvaluator, get_transfer_model)


def _resolve_config(tolerance: float, precision: str, config: IntegratorConfig) -> IntegratorConfig:
    if config is not None:
        return config
    return IntegratorConfig.for_precision(precision, tolerance)


def integrate_fundamental(p: PeriodicCoefficient, q: PeriodicCoefficient, lam: complex, tolerance: float = None,
                          precision: str = 'double', config: IntegratorConfig = None) -> ScaledTransferMatrix:
    '''
    A(1, lambda) as a scaled matrix. Column j holds phi_j and its quasi-derivatives at x = 1.
    '''
    if not np.isfinite(complex(lam)):
        raise ValueError('Spectral parameter must be finite, got %s' % str(lam))
    config = _resolve_config(tolerance, precision, config)
    model = get_transfer_model(config)
    evaluator = SystemMatrixEvaluator(p, q, lam, FUNDAMENTAL)
    mantissa, log_scale, log_det, segments = model.propagate(evaluator, np.eye(4, dtype=complex))
    return ScaledTransferMatrix(mantissa=mantissa, log_scale=log_scale, log_det=log_det,
                                segments=segments, precision=config.precision)


def wronskian_drift(result: ScaledTransferMatrix) -> float:
    '''
    |prod det(segment propagators) - 1|, the Liouville defect of the integrator steps. It does not see
    rounding in the stored product, whose own determinant cancels once the columns align at large |lambda|.
    '''
    return float(abs(np.exp(result.log_det) - 1))


def integrate_wedge(p: PeriodicCoefficient, q: PeriodicCoefficient, lam: complex, tolerance: float = None,
                    precision: str = 'double', config: IntegratorConfig = None) -> Tuple[np.ndarray, float]:
    '''
    phi_1 ^ phi_3 at x = 1 as (mantissa, log_scale), started from e_1 ^ e_3.
    The 13 component equals A11 A33 - A13 A31 without forming the two products.
    '''
    if not np.isfinite(complex(lam)):
        raise ValueError('Spectral parameter must be finite, got %s' % str(lam))
    config = _resolve_config(tolerance, precision, config)
    model = get_transfer_model(config)
    evaluator = SystemMatrixEvaluator(p, q, lam, WEDGE)
    y0 = np.zeros(6, dtype=complex)
    y0[WEDGE_INDEX['13']] = 1.0
    mantissa, log_scale, _, _ = model.propagate(evaluator, y0)
    return mantissa, log_scale

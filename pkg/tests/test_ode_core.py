import numpy as np
import pytest

from quartic_spectrum.characteristic import char_det, char_ratio
from quartic_spectrum.models.model_types import IntegratorConfig
from quartic_spectrum.models.transfer_models import WEDGE_INDEX, get_transfer_model, DoubleTransferModel, ExtendedTransferModel
from quartic_spectrum.ode_core import integrate_fundamental, integrate_wedge, wronskian_drift
from tests.conftest import random_trig_pair


def test_unperturbed_fundamental_matrix(zero):
    z = 2.0
    A = integrate_fundamental(zero, zero, z ** 4).value
    ch, c = np.cosh(z), np.cos(z)
    expected = {(0, 0): (ch + c) / 2, (2, 2): (ch + c) / 2,
                (0, 2): (ch - c) / (2 * z ** 2), (2, 0): z ** 2 * (ch - c) / 2,
                (1, 0): z * (np.sinh(z) - np.sin(z)) / 2}
    for (i, j), v in expected.items():
        assert abs(A[i, j] - v) < 1e-10 * abs(v), f"A[{i},{j}] = {A[i, j]}, expected {v}"


def test_wedge_matches_minor(smooth_pair):
    p, q = smooth_pair
    lam = 500 + 200j
    A = integrate_fundamental(p, q, lam).value
    minor = A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
    mantissa, log_scale = integrate_wedge(p, q, lam)
    wedge = mantissa[WEDGE_INDEX['13']] * np.exp(log_scale)
    assert abs(wedge - minor) < 1e-7 * abs(minor), f"wedge {wedge}, minor {minor}"


def test_wronskian_conservation():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        p, q = random_trig_pair(rng)
        lam = rng.uniform(-1e4, 1e4) + 1j * rng.uniform(-1e3, 1e3)
        drift = wronskian_drift(integrate_fundamental(p, q, lam))
        worst = max(worst, drift)
    assert worst <= 1e-8, f"Largest Wronskian drift {worst:.3e}"


def test_extended_matches_double(smooth_pair):
    p, q = smooth_pair
    lam = 300.0
    double = char_det(p, q, lam)
    extended = char_det(p, q, lam, precision='extended')
    ratio = char_ratio(extended, double)
    assert abs(ratio - 1) < 1e-9, f"Extended / double = {ratio}"


def test_extended_wronskian(smooth_pair):
    p, q = smooth_pair
    result = integrate_fundamental(p, q, 150 + 40j, precision='extended')
    assert result.precision == 'extended'
    assert wronskian_drift(result) < 1e-12, f"Extended drift {wronskian_drift(result):.3e}"


def test_large_lambda_stays_finite(smooth_pair):
    p, q = smooth_pair
    # |z| = 200: exp(200) overflows nothing in scaled form
    mantissa, log_scale = integrate_wedge(p, q, 200.0 ** 4)
    assert np.all(np.isfinite(mantissa)) and np.max(np.abs(mantissa)) > 0, "Mantissa lost to overflow or underflow"
    assert 150 < log_scale < 260, f"log scale {log_scale}"


def test_invalid_arguments(zero):
    with pytest.raises(ValueError):
        integrate_fundamental(zero, zero, np.inf)
    with pytest.raises(ValueError):
        IntegratorConfig.for_precision('double', tolerance=1e-16)
    with pytest.raises(ValueError):
        IntegratorConfig(model_name='quad')


def test_transfer_model_factory():
    assert isinstance(get_transfer_model(IntegratorConfig.for_precision('double')), DoubleTransferModel)
    assert isinstance(get_transfer_model(IntegratorConfig.for_precision('extended')), ExtendedTransferModel)


@pytest.mark.parametrize('lam', [40.0 + 25j, -300.0 + 80j, 2500.0 - 400j])
def test_conjugate_spectral_parameter(smooth_pair, lam):
    p, q = smooth_pair
    A = integrate_fundamental(p, q, lam)
    Ac = integrate_fundamental(p, q, np.conj(lam))
    assert Ac.log_scale == pytest.approx(A.log_scale, abs=1e-12)
    defect = np.max(np.abs(Ac.mantissa - np.conj(A.mantissa))) / np.max(np.abs(A.mantissa))
    assert defect < 1e-10, f"A(1, conj lambda) differs from conj A(1, lambda) by {defect:.3e}"


def test_tolerance_refinement_converges(smooth_pair):
    p, q = smooth_pair
    for lam in (60.0, -500.0 + 30j, 3000.0 + 200j):
        reference = integrate_fundamental(p, q, lam, tolerance=1e-13)
        defects = []
        for tol in (1e-6, 1e-8, 1e-10):
            A = integrate_fundamental(p, q, lam, tolerance=tol)
            value = A.mantissa * np.exp(A.log_scale - reference.log_scale)
            defects.append(np.max(np.abs(value - reference.mantissa)) / np.max(np.abs(reference.mantissa)))
            assert defects[-1] <= 1e3 * tol + 1e-11, f"Defect {defects[-1]:.3e} at tolerance {tol:.0e}, lambda={lam}"
        assert defects[-1] <= defects[0] + 1e-11, f"Tighter tolerance did not help at lambda={lam}: {defects}"

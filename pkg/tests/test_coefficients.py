import math

import mpmath
import numpy as np
import pytest

from quartic_spectrum.coefficients import (PeriodicCoefficient, endpoint_weighted_integral, fourier,
                                           fourier_quadrature, half_odd_frequency, l2_norm_sq)
from quartic_spectrum.utils.exceptions import QuadratureAccuracyError, UnsupportedDerivativeError


def test_eval_and_derivatives(smooth_pair):
    p, _ = smooth_pair
    x = 0.137
    expected = np.sin(2 * np.pi * x) + 0.3 * np.cos(4 * np.pi * x)
    assert abs(p.eval(x) - expected) < 1e-14, f"p({x}) = {p.eval(x)}, expected {expected}"

    expected_d3 = -(2 * np.pi) ** 3 * np.cos(2 * np.pi * x) + 0.3 * (4 * np.pi) ** 3 * np.sin(4 * np.pi * x)
    assert abs(p.eval(x, 3) - expected_d3) < 1e-10 * abs(expected_d3), f"p'''({x}) = {p.eval(x, 3)}, expected {expected_d3}"
    assert abs(p.derivative(3).eval(x) - expected_d3) < 1e-10 * abs(expected_d3), "derivative() disagrees with eval()"


def test_eval_is_periodic_and_vectorized(smooth_pair):
    p, q = smooth_pair
    x = np.linspace(0, 1, 9)
    assert np.allclose(q.eval(x), q.eval(x + 3.0), atol=1e-13), "q is not 1-periodic"
    assert q.eval(x).shape == x.shape, f"Expected shape {x.shape}, got {q.eval(x).shape}"


def test_reflected(smooth_pair):
    p, _ = smooth_pair
    x = np.linspace(0, 1, 11)
    assert np.allclose(p.reflected().eval(x), p.eval(1 - x), atol=1e-14), "reflected() is not f(1 - x)"


def test_sin_cn_matches_closed_form():
    p = PeriodicCoefficient(harmonics=((1, 0.0, 1.0),))
    expected = 4 / (np.pi * 15 * (-11))
    got = fourier(p, 6).f_hat_cn
    assert abs(got - expected) < 1e-15, f"p_cn = {got}, expected {expected}"


def test_constant_fourier():
    c = PeriodicCoefficient.constant(2.5)
    for n in (0, 3, 17):
        rec = fourier(c, n)
        assert rec.f_hat_cn == 0.0, f"cn of a constant at n={n} is {rec.f_hat_cn}"
        assert abs(rec.f_hat_sn - 5.0 / half_odd_frequency(n)) < 1e-15, f"sn of a constant at n={n} is {rec.f_hat_sn}"
        assert rec.f_hat_n == complex(rec.f_hat_cn, -rec.f_hat_sn)


@pytest.mark.parametrize('n', [0, 5, 20])
def test_closed_form_matches_quadrature(smooth_pair, n):
    for c in smooth_pair:
        closed = fourier(c, n)
        quad = fourier(c, n, method='quadrature')
        for key in ('f0', 'f_hat_cn', 'f_hat_sn'):
            a, b = getattr(closed, key), getattr(quad, key)
            assert abs(a - b) < 1e-12, f"{key} at n={n}: closed {a}, quadrature {b}"


def test_quadrature_accuracy_error():
    step = lambda x: np.sign(x - 1 / 3)
    with pytest.raises(QuadratureAccuracyError) as e:
        fourier_quadrature(step, 2, max_refinements=2)
    assert e.value.errors > 1e-13, f"Reported estimate {e.value.errors}"


def test_l2_norm_by_parseval(smooth_pair):
    p, _ = smooth_pair
    quad = fourier_quadrature(lambda x: p.eval(x) ** 2, 0).f0
    assert abs(l2_norm_sq(p) - quad) < 1e-12, f"Parseval {l2_norm_sq(p)}, quadrature {quad}"
    assert abs(l2_norm_sq(p) - 0.545) < 1e-15


def test_from_samples_recovers_trig_polynomial(smooth_pair):
    p, _ = smooth_pair
    samples = p.eval(np.arange(16) / 16)
    sampled = PeriodicCoefficient.from_samples(samples, smoothness_order=3)
    x = np.linspace(0, 1, 37)
    assert np.allclose(sampled.eval(x), p.eval(x), atol=1e-13), "Interpolant differs from the sampled polynomial"
    assert sampled.sampled and sampled.smoothness_order == 3


def test_sampled_derivative_beyond_class():
    sampled = PeriodicCoefficient.from_samples(np.cos(2 * np.pi * np.arange(8) / 8), smoothness_order=1)
    sampled.eval(0.2, 1)
    with pytest.raises(UnsupportedDerivativeError):
        sampled.eval(0.2, 2)
    with pytest.raises(UnsupportedDerivativeError):
        sampled.derivative(2)


def test_invalid_harmonics():
    with pytest.raises(ValueError):
        PeriodicCoefficient(harmonics=((65, 1.0, 0.0),))
    with pytest.raises(ValueError):
        PeriodicCoefficient(harmonics=((0, 1.0, 0.0),))


def test_harmonics_merge():
    c = PeriodicCoefficient(harmonics=((2, 1.0, 0.0), (1, 0.0, 1.0), (2, 0.5, 0.5)))
    assert c.harmonics == ((1, 0.0, 1.0), (2, 1.5, 0.5)), f"Got {c.harmonics}"
    assert c.degree == 2


def test_taylor_float_and_mpmath(smooth_pair):
    p, _ = smooth_pair
    x0 = 0.3
    coeffs = p.taylor(x0, 4)
    for j in range(5):
        expected = p.eval(x0, j) / math.factorial(j)
        assert abs(coeffs[j] - expected) < 1e-11 * max(1.0, abs(expected)), f"Taylor coefficient {j}: {coeffs[j]} vs {expected}"

    with mpmath.workdps(32):
        mp_coeffs = p.taylor(mpmath.mpf(x0), 4, mpmath.mp)
    for j in range(5):
        assert abs(float(mp_coeffs[j]) - coeffs[j]) < 1e-11 * max(1.0, abs(coeffs[j])), f"mpmath coefficient {j} differs"


def test_endpoint_weighted_integral():
    for n in (0, 4, 30):
        w = half_odd_frequency(n)
        got = endpoint_weighted_integral(lambda s: np.ones_like(s), n)
        expected = (1 - np.exp(-w)) / w
        assert abs(got - expected) < 1e-14, f"n={n}: {got} vs {expected}"

    # int_0^1 exp(-a s) sin(b s) ds = b (1 - exp(-a)) / (a^2 + b^2) when sin b = 0, cos b = 1
    a, b = 3 * np.pi, 2 * np.pi
    got = endpoint_weighted_integral(lambda s: np.sin(b * s), 1, degree=1)
    expected = b * (1 - np.exp(-a)) / (a ** 2 + b ** 2)
    assert abs(got - expected) < 1e-14, f"{got} vs {expected}"


def test_shift_and_add(smooth_pair):
    p, q = smooth_pair
    assert q.shifted(2.0).mean() == 2.0
    s = p + q
    assert abs(s.eval(0.4) - p.eval(0.4) - q.eval(0.4)) < 1e-14


def test_reflection_law(smooth_pair):
    for c in smooth_pair:
        for n in (0, 3, 11):
            a, b = fourier(c, n), fourier(c.reflected(), n)
            assert abs(b.f_hat_cn + a.f_hat_cn) < 1e-15, f"cn of f(1 - x) at n={n}: {b.f_hat_cn} vs {-a.f_hat_cn}"
            assert abs(b.f_hat_sn - a.f_hat_sn) < 1e-15, f"sn of f(1 - x) at n={n}: {b.f_hat_sn} vs {a.f_hat_sn}"
            assert b.f0 == a.f0


def test_fourier_is_linear(smooth_pair):
    p, q = smooth_pair
    q = q.shifted(0.7)
    for n in (0, 2, 9, 64):
        total, a, b = fourier(p + q, n), fourier(p, n), fourier(q, n)
        for key in ('f0', 'f_hat_cn', 'f_hat_sn'):
            expected = getattr(a, key) + getattr(b, key)
            assert abs(getattr(total, key) - expected) < 1e-14, f"{key} at n={n}: {getattr(total, key)} vs {expected}"


def test_closed_form_matches_quadrature_up_to_degree(sin_pair):
    p, q = sin_pair
    c = p + q.shifted(-0.4) + PeriodicCoefficient(harmonics=((5, 0.25, -0.1),))
    worst = 0.0
    for n in range(65):
        closed, quad = fourier(c, n), fourier(c, n, method='quadrature')
        worst = max(worst, *(abs(getattr(closed, k) - getattr(quad, k)) for k in ('f0', 'f_hat_cn', 'f_hat_sn')))
    assert worst < 1e-12, f"Largest closed form / quadrature difference {worst:.3e}"

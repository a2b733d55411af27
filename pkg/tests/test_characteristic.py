import numpy as np
import pytest

from quartic_spectrum.pytypes import CharValue
from quartic_spectrum.characteristic import (char_det, char_det_unperturbed, char_det_unperturbed_scaled, char_ratio,
                                             z_of_lambda)


@pytest.mark.parametrize('lam, expected', [
    (16.0, 2.0),
    (-16.0, 2.0 * np.exp(1j * np.pi / 4)),
    (16j, 2.0 * np.exp(1j * np.pi / 8)),
    (-16j, 2.0 * np.exp(-1j * np.pi / 8)),
    (0.0, 0.0),
])
def test_branch(lam, expected):
    z = z_of_lambda(lam)
    assert abs(z - expected) < 1e-14, f"z({lam}) = {z}, expected {expected}"


@pytest.mark.parametrize('lam', [5.0, 250.0, 3000.0 + 500j, -800.0, 40 - 900j])
def test_unperturbed_matches_closed_form(zero, lam):
    D = char_det(zero, zero, lam)
    expected = char_det_unperturbed(lam)
    assert abs(D.value - expected) < 1e-8 * abs(expected), f"D({lam}) = {D.value}, expected {expected}"


def test_minor_method_agrees(smooth_pair):
    p, q = smooth_pair
    lam = 120.0 + 30j
    ratio = char_ratio(char_det(p, q, lam, method='minor'), char_det(p, q, lam))
    assert abs(ratio - 1) < 1e-8, f"minor / wedge = {ratio}"


def test_unperturbed_zeros(zero):
    for n in range(4):
        z = np.pi / 2 + np.pi * n
        D = char_det(zero, zero, z ** 4)
        assert abs(D.mantissa) < 1e-8, f"|D| mantissa {abs(D.mantissa):.3e} at the zero z={z}"


def test_scaled_unperturbed():
    lam = 3.0 + 4.0j
    z = z_of_lambda(lam)
    scaled = char_det_unperturbed_scaled(lam)
    expected = -np.cos(z) * np.cosh(z)
    assert abs(scaled.value - expected) < 1e-13 * abs(expected), f"{scaled.value} vs {expected}"

    big = char_det_unperturbed_scaled(1e12 + 1e11j)
    assert np.isfinite(big.mantissa) and abs(big.mantissa) <= 1.0, f"mantissa {big.mantissa}"
    assert abs(big.log_scale - (abs(big.z.real) + abs(big.z.imag))) < 1e-12


def test_q_shift_covariance(smooth_pair):
    p, q = smooth_pair
    c = 3.75
    for lam in (90.0, 700.0 + 60j):
        ratio = char_ratio(char_det(p, q.shifted(c), lam), char_det(p, q, lam - c))
        assert abs(ratio - 1) < 1e-8, f"D(lambda; q + c) / D(lambda - c; q) = {ratio} at lambda={lam}"


def test_schwarz_symmetry(smooth_pair):
    p, q = smooth_pair
    lam = 200.0 + 50j
    D = char_det(p, q, lam)
    Dc = char_det(p, q, np.conj(lam))
    conj = CharValue(mantissa=np.conj(D.mantissa), log_scale=D.log_scale, z=np.conj(D.z))
    ratio = char_ratio(Dc, conj)
    assert abs(ratio - 1) < 1e-9, f"D(conj lambda) / conj D(lambda) = {ratio}"


def test_unknown_method(zero):
    with pytest.raises(ValueError):
        char_det(zero, zero, 1.0, method='cofactor')


@pytest.mark.parametrize('lam', [-2000.0, -35.0, 12.0, 800.0, 9000.0])
def test_real_on_the_real_axis(smooth_pair, lam):
    p, q = smooth_pair
    D = char_det(p, q, lam)
    assert abs(D.mantissa.imag) <= 1e-8 * abs(D.mantissa), f"Im D / |D| = {D.mantissa.imag / abs(D.mantissa):.3e} at {lam}"


def test_ratio_to_unperturbed_decays(smooth_pair):
    p, q = smooth_pair
    thetas = 2 * np.pi * np.arange(16) / 16
    worst = []
    for n in (5, 10, 15, 20):
        c = np.pi / 2 + np.pi * n
        ratios = [char_ratio(char_det(p, q, z ** 4), char_det_unperturbed_scaled(z ** 4))
                  for z in c + np.pi / 4 * np.exp(1j * thetas)]
        worst.append(max(abs(r - 1) for r in ratios))
    for n, prev, cur in zip((10, 15, 20), worst[:-1], worst[1:]):
        assert cur <= 1.2 * prev, f"max |D/D0 - 1| rose to {cur:.3e} at n={n} from {prev:.3e}"
    assert worst[-1] < 1e-3, f"max |D/D0 - 1| = {worst[-1]:.3e} at n=20"

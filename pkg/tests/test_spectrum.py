import numpy as np
import pytest

from quartic_spectrum.pytypes import SearchPlan
from quartic_spectrum.coefficients import PeriodicCoefficient
from quartic_spectrum.spectrum import (ball_radius, count_zeros_in_ball, count_zeros_in_disk, disk_center, localize,
                                       solve_range)
from quartic_spectrum.utils.exceptions import MissingRootError
from tests.conftest import unperturbed_mu


def test_unperturbed_low_spectrum(zero):
    records = solve_range(zero, zero, SearchPlan(n_min=0, n_max=6), quiet=True)
    assert [r.index for r in records] == list(range(7))
    for r in records:
        expected = unperturbed_mu(r.index)
        assert abs(r.mu / expected - 1) < 1e-9, f"mu_{r.index} = {r.mu}, expected {expected}"
        assert r.bracket[0] <= r.z_root <= r.bracket[1], f"z_root outside its bracket at n={r.index}"
        assert r.method == ('scan' if r.index < 4 else 'disk')


def test_bracket_width(smooth_pair):
    p, q = smooth_pair
    plan = SearchPlan(n_min=5, n_max=6, z_abs_tol=1e-10)
    for r in solve_range(p, q, plan, quiet=True):
        # widened only when D is too flat to change sign across the nominal bracket
        assert 0 < r.bracket_width <= 64 * plan.z_abs_tol, f"Bracket width {r.bracket_width:.3e} at n={r.index}"
        assert r.bracket[0] <= r.z_root <= r.bracket[1]


@pytest.mark.parametrize('n', [5, 6, 7, 8])
def test_one_zero_per_disk(smooth_pair, n):
    p, q = smooth_pair
    assert count_zeros_in_disk(p, q, n) == 1, f"Disk {n} does not hold exactly one zero"


def test_ball_count(smooth_pair):
    p, q = smooth_pair
    assert count_zeros_in_ball(p, q, 3) == 4


def test_disk_index_must_be_positive(zero):
    with pytest.raises(ValueError):
        count_zeros_in_disk(zero, zero, 0)


def test_localize_brackets_the_eigenvalue(zero):
    reports = localize(zero, zero, (0, 3))
    assert [r.index for r in reports] == [1, 2, 3], "Disk reports start at n=1"
    for r in reports:
        mu = unperturbed_mu(r.index)
        assert r.winding == 1, f"Winding {r.winding} in disk {r.index}"
        assert r.lambda_interval[0] < mu < r.lambda_interval[1], f"mu_{r.index} outside {r.lambda_interval}"
        assert r.z_center == disk_center(r.index) and r.samples >= 64


def test_q_shift(smooth_pair):
    p, q = smooth_pair
    c = 2.5
    plan = SearchPlan(n_min=4, n_max=6)
    base = solve_range(p, q, plan, quiet=True)
    shifted = solve_range(p, q.shifted(c), plan, quiet=True)
    for a, b in zip(base, shifted):
        assert abs((b.mu - a.mu) - c) <= 1e-8 * a.mu, f"mu_{a.index} moved by {b.mu - a.mu}, expected {c}"


@pytest.mark.parametrize('c', [-10.0, -20.0, -600.0])
def test_q_shift_below_zero(zero, c):
    plan = SearchPlan(n_min=0, n_max=5)
    base = solve_range(zero, zero, plan, quiet=True)
    shifted = solve_range(zero, PeriodicCoefficient.constant(c), plan, quiet=True)
    assert [r.index for r in shifted] == list(range(6))
    for a, b in zip(base, shifted):
        assert abs(b.mu - (a.mu + c)) <= 1e-8 * max(1.0, abs(a.mu)), f"mu_{a.index} = {b.mu}, expected {a.mu + c}"
        assert b.bracket[0] <= b.z_root <= b.bracket[1], f"z_root outside its bracket at n={b.index}"
        assert b.mu == b.z_root * abs(b.z_root) ** 3
    negative = [r for r in shifted if r.mu < 0]
    assert negative and all(r.z_root < 0 for r in negative)


def test_negative_eigenvalue_extended(zero):
    records = solve_range(zero, PeriodicCoefficient.constant(-20.0), SearchPlan(n_min=0, n_max=1),
                          precision='extended', quiet=True)
    expected = unperturbed_mu(0) - 20.0
    assert records[0].precision == 'extended'
    assert abs(records[0].mu - expected) < 1e-12 * abs(expected), f"mu_0 = {records[0].mu!r}, expected {expected!r}"


def test_missing_root_in_disk(zero):
    # q = -30000 moves mu_4 below the disk of n = 4 and leaves it empty
    with pytest.raises(MissingRootError) as e:
        solve_range(zero, PeriodicCoefficient.constant(-30000.0), SearchPlan(n_min=4, n_max=4), quiet=True)
    assert e.value.errors['index'] == 4, f"Got {e.value.errors}"


def test_parallel_is_deterministic(smooth_pair):
    p, q = smooth_pair
    plan = SearchPlan(n_min=4, n_max=7)
    serial = solve_range(p, q, plan, threads=1, quiet=True)
    parallel = solve_range(p, q, plan, threads=2, quiet=True)
    assert [r.mu for r in serial] == [r.mu for r in parallel], "Thread count changed the eigenvalues"


def test_extended_polish(zero):
    records = solve_range(zero, zero, SearchPlan(n_min=4, n_max=5), precision='extended', quiet=True)
    for r in records:
        assert r.precision == 'extended'
        assert abs(r.mu / unperturbed_mu(r.index) - 1) < 1e-13, f"mu_{r.index} = {r.mu!r}"


def test_invalid_plan():
    with pytest.raises(ValueError):
        SearchPlan(n_min=5, n_max=3)


def test_ball_radius():
    assert ball_radius(3) == pytest.approx((4 * np.pi) ** 4, rel=1e-14)

"""Scheduled-access rates, the closed-form region and the optimal slot split.

Reference point throughout: the weak table at lam_p=0.3, full admission,
keep=1, so idle = 1 - 0.3/0.91 and the relay flows are (0.069231, 0.230769).
"""

import math

import numpy as np
import pytest

from cogrelay import (
    ParameterError,
    TdmaPolicy,
    max_primary_service_rate,
    primary_grid,
    tdma_curve,
    tdma_max_primary,
    tdma_max_secondary,
    tdma_optimal_split,
    tdma_rates,
    tdma_region_boundary,
)
from conftest import random_links


def test_policy_validation():
    with pytest.raises(ParameterError):
        TdmaPolicy(1.2, 0.5, 1.0, 1.0)
    with pytest.raises(ParameterError):
        TdmaPolicy(0.5, 0.5, 1.0, 1.0, keep_priority=3)


def test_reference_rates(weak_links):
    r = tdma_rates(weak_links, 0.3, TdmaPolicy(0.5, 0.5, 1.0, 1.0, 1))
    idle = 1.0 - 0.3 / 0.91
    assert math.isclose(r.mu_s, idle * 0.25 * 0.9, rel_tol=1e-12)  # 0.150824
    assert math.isclose(r.mu_ps, idle * 0.25 * 0.8, rel_tol=1e-12)  # 0.134066
    assert math.isclose(r.mu_sd, idle * 0.5 * 0.8, rel_tol=1e-12)  # 0.268132
    assert math.isclose(r.mu_p, 0.91, rel_tol=1e-12)


def test_optimal_split_reference_point(weak_links):
    split = tdma_optimal_split(weak_links, 0.3, 0.2, 1.0, 1.0, 1)
    assert split.feasible
    # Relay shares are met with equality; own data takes what it needs.
    assert math.isclose(split.share_own, 0.331511839708561, rel_tol=1e-10)
    assert math.isclose(split.share_st_relay, 0.12909836065573765, rel_tol=1e-10)
    assert math.isclose(split.share_sr_relay, 0.43032786885245883, rel_tol=1e-10)
    assert split.share_own + split.share_st_relay + split.share_sr_relay < 1.0
    # All slack goes to the own-data queue: omega = 1 - sr share.
    assert math.isclose(split.omega, 0.5696721311475412, rel_tol=1e-10)
    assert math.isclose(split.alpha, 0.7733812949640289, rel_tol=1e-10)


def test_split_infeasible_above_boundary(weak_links):
    boundary = tdma_region_boundary(weak_links, 0.3, 1.0, 1.0, 1)
    assert math.isclose(boundary, 0.2657967032967033, rel_tol=1e-12)
    assert tdma_optimal_split(weak_links, 0.3, boundary + 0.01, 1.0, 1.0, 1).feasible is False
    assert tdma_optimal_split(weak_links, 0.3, boundary - 0.01, 1.0, 1.0, 1).feasible


def test_boundary_matches_split_feasibility_transition(weak_links):
    # Bisect the feasible/infeasible transition of the slot split; it must
    # land on the closed-form boundary.
    for lam_p, f_s, f_sd in ((0.3, 1.0, 1.0), (0.2, 0.8, 0.5), (0.1, 1.0, 0.3)):
        boundary = tdma_region_boundary(weak_links, lam_p, f_s, f_sd, 1)
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if tdma_optimal_split(weak_links, lam_p, mid, f_s, f_sd, 1).feasible:
                lo = mid
            else:
                hi = mid
        assert abs(lo - boundary) <= 1e-6


def test_max_secondary_dominates_fixed_admissions():
    # The optimizer scans a 0.01 admission grid, so compare against
    # grid-aligned admissions only.
    rng = np.random.default_rng(31)
    for _ in range(25):
        links = random_links(rng)
        lam_p = rng.uniform(0.0, 0.6)
        best = tdma_max_secondary(links, lam_p)
        for _ in range(4):
            f_s = round(int(rng.integers(0, 101)) * 0.01, 12)
            f_sd = round(int(rng.integers(0, 101)) * 0.01, 12)
            keep = int(rng.integers(2))
            fixed = tdma_region_boundary(links, lam_p, f_s, f_sd, keep)
            assert best.lambda_s_max >= fixed - 1e-9


def test_max_secondary_reference_argmax(weak_links):
    point = tdma_max_secondary(weak_links, 0.3)
    # On this table the dead direct link makes relaying mandatory, and full
    # admission on both paths wins: the extra idle share buys more own-data
    # room than the relay flows consume.
    assert point.feasible
    assert point.params["f_s"] == 1.0 and point.params["f_sd"] == 1.0
    assert point.lambda_s_max == pytest.approx(
        tdma_region_boundary(weak_links, 0.3, 1.0, 1.0, 1), rel=1e-12
    )


def test_max_primary_floor_and_ceiling():
    rng = np.random.default_rng(37)
    for _ in range(25):
        links = random_links(rng)
        lam_p = rng.uniform(0.0, 0.8)
        value, params = tdma_max_primary(links, lam_p)
        assert value >= links.p_pd - 1e-12  # zero admission always feasible
        assert value <= max_primary_service_rate(links) + 1e-12
        assert 0.0 <= params["omega"] <= 1.0 and 0.0 <= params["alpha"] <= 1.0


def test_curve_monotone_and_anchored(weak_links):
    grid = primary_grid(max_primary_service_rate(weak_links), 0.05)
    curve = tdma_curve(weak_links, grid=grid)
    curve.assert_monotone()
    assert curve.variant == "tdma" and curve.bound == "exact"
    assert curve.points[0].lambda_s_max == pytest.approx(0.9, abs=1e-12)
    # Past the feasible range the boundary reports 0/infeasible.
    assert curve.points[-1].lambda_s_max == 0.0


def test_rejects_negative_rates(weak_links):
    with pytest.raises(ParameterError):
        tdma_region_boundary(weak_links, -0.1, 1.0, 1.0, 1)  # via primary rate helpers
    with pytest.raises(ParameterError):
        tdma_optimal_split(weak_links, 0.3, -0.2, 1.0, 1.0, 1)
    with pytest.raises(ParameterError):
        tdma_max_secondary(weak_links, -0.5)

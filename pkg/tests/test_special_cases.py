"""Exact no-SR-relaying regions: relay-first service vs randomized selection.

Frozen reference point: weak table, lam_p=0.2, full admission. There
mu_p=0.7, the relay queue sees 0.2 arrivals and 5/7*0.8 service, and the
own-data boundary sits at (0.9/0.7)*(0.7 - 0.2 - 0.7*0.2/0.8) = 0.41785714...
"""

import math

import numpy as np
import pytest

from cogrelay import (
    AdmissionChoice,
    InfeasibleRateError,
    LinkProbabilities,
    ParameterError,
    SelectionOptimum,
    alpha_monotonicity_check,
    combined_primary_constraint,
    optimal_admission,
    primary_grid,
    priority_boundary_slope,
    priority_max_primary,
    priority_rates,
    priority_region_boundary,
    priority_region_curve,
    selection_alpha_slope,
    selection_alpha_star,
    selection_optimal,
    selection_rates,
    selection_region_curve,
)
from conftest import random_links

BOUNDARY_AT_02 = 0.41785714285714287
SLOPE = -2.4107142857142856


def test_priority_rates_reference(weak_links):
    r = priority_rates(weak_links, 0.2, 1.0)
    assert math.isclose(r.mu_p, 0.7, rel_tol=1e-15)
    assert math.isclose(r.admission_gain, 0.7, rel_tol=1e-15)
    assert math.isclose(r.lam_ps, 0.2, rel_tol=1e-12)
    assert math.isclose(r.mu_ps, 0.5714285714285714, rel_tol=1e-12)
    # Own data rides the idle slots the relay queue leaves empty.
    assert math.isclose(r.mu_s, BOUNDARY_AT_02, rel_tol=1e-12)


def test_selection_rates_at_optimal_coin(weak_links):
    # At the optimal coin weight the relay share is exactly tight and the
    # own-data rate matches the relay-first discipline.
    alpha = selection_alpha_star(weak_links, 0.2, 1.0)
    assert math.isclose(alpha, 0.65, rel_tol=1e-12)
    r = selection_rates(weak_links, 0.2, 1.0, alpha)
    assert math.isclose(r.mu_ps, r.lam_ps, rel_tol=1e-12)
    assert math.isclose(r.mu_s, BOUNDARY_AT_02, rel_tol=1e-12)


def test_optimal_admission_branches(weak_links):
    assert optimal_admission(weak_links, 0.2) == AdmissionChoice(1.0, (1.0, 1.0))
    # Silent primary: admission changes nothing, ties exposed as the full interval.
    assert optimal_admission(weak_links, 0.0).interval == (0.0, 1.0)
    no_gain = LinkProbabilities(0.5, 0.0, 0.5, 0.9, 0.8, 0.8, 0.1, 0.1)
    assert optimal_admission(no_gain, 0.3) == AdmissionChoice(0.0, (0.0, 1.0))
    tie = LinkProbabilities(0.8, 0.5, 0.5, 0.9, 0.8, 0.8, 0.1, 0.1)
    assert optimal_admission(tie, 0.3).interval == (0.0, 1.0)
    worse_relay = LinkProbabilities(0.9, 0.5, 0.5, 0.8, 0.4, 0.7, 0.1, 0.1)
    assert optimal_admission(worse_relay, 0.3) == AdmissionChoice(0.0, (0.0, 0.0))


def test_boundary_frozen_points(weak_links):
    at_zero = priority_region_boundary(weak_links, 0.0)
    assert at_zero.lambda_s_max == 0.9 and at_zero.feasible
    at_02 = priority_region_boundary(weak_links, 0.2)
    assert at_02.feasible and at_02.params == {"f_s": 1.0}
    assert math.isclose(at_02.lambda_s_max, BOUNDARY_AT_02, rel_tol=1e-12)
    beyond = priority_region_boundary(weak_links, 0.38)
    assert beyond.lambda_s_max == 0.0 and not beyond.feasible


def test_boundary_is_affine(weak_links):
    slope = priority_boundary_slope(weak_links)
    assert math.isclose(slope, SLOPE, rel_tol=1e-12)
    for lam_p in np.linspace(0.0, 0.37, 75):
        point = priority_region_boundary(weak_links, float(lam_p))
        assert point.feasible
        assert abs(point.lambda_s_max - (0.9 + slope * lam_p)) <= 1e-9


def test_slope_uses_the_chosen_branch():
    worse_relay = LinkProbabilities(0.9, 0.5, 0.5, 0.8, 0.4, 0.7, 0.1, 0.1)
    # f_s=0 branch: no relay term, plain -s_sd/mu_p.
    assert math.isclose(priority_boundary_slope(worse_relay), -0.8 / 0.9, rel_tol=1e-12)
    dead = LinkProbabilities(0.0, 0.0, 0.5, 0.9, 0.8, 0.8, 0.1, 0.1)
    with pytest.raises(ParameterError):
        priority_boundary_slope(dead)


def test_combined_primary_constraint(weak_links):
    cap = combined_primary_constraint(weak_links, 1.0, 1.0)
    assert math.isclose(cap, 0.37333333333333335, rel_tol=1e-12)
    assert math.isclose(priority_max_primary(weak_links), cap, rel_tol=1e-15)
    # No relay flow at all: the cap degenerates to mu_p itself.
    assert combined_primary_constraint(weak_links, 0.0, 0.0) == weak_links.p_pd
    # The boundary turns infeasible exactly past the cap.
    assert priority_region_boundary(weak_links, cap - 1e-9).feasible
    assert not priority_region_boundary(weak_links, cap + 1e-9).feasible


def test_alpha_star_slope_closed_form(weak_links):
    # Above p_pd the optimal coin weight grows with admission; the analytic
    # derivative at (lam_p=0.2, f_s=1) is 0.2*0.7*0.2/(0.5^2*0.8) = 0.14.
    slope = selection_alpha_slope(weak_links, 0.2, 1.0)
    assert math.isclose(slope, 0.14, rel_tol=1e-12)
    h = 1e-6
    fd = (
        selection_alpha_star(weak_links, 0.2, 0.6 + h)
        - selection_alpha_star(weak_links, 0.2, 0.6 - h)
    ) / (2 * h)
    assert math.isclose(fd, selection_alpha_slope(weak_links, 0.2, 0.6), rel_tol=1e-6)


def test_alpha_star_edge_cases(weak_links):
    assert selection_alpha_star(weak_links, 0.0, 0.4) == 1.0  # empty relay queue
    with pytest.raises(InfeasibleRateError):
        selection_alpha_star(weak_links, 0.2, 0.2)  # mu_p = 0.14 < lam_p
    dead_relay = LinkProbabilities(0.5, 0.5, 0.5, 0.9, 0.0, 0.8, 0.0, 0.1)
    with pytest.raises(InfeasibleRateError):
        selection_alpha_star(dead_relay, 0.2, 1.0)


def test_alpha_monotonicity_check():
    # Any table whose direct primary link beats the arrival rate keeps every
    # admission fraction feasible, and there the weight never increases.
    rng = np.random.default_rng(41)
    found = 0
    while found < 20:
        links = random_links(rng)
        if links.p_pd < 0.1:
            continue
        lam_p = float(rng.uniform(0.0, links.p_pd * 0.95))
        assert alpha_monotonicity_check(links, lam_p)
        found += 1


def test_alpha_monotonicity_check_failure_modes(weak_links):
    # Default grid contains f_s=0, so lam_p above p_pd has no access split there.
    with pytest.raises(InfeasibleRateError):
        alpha_monotonicity_check(weak_links, 0.2)
    # On a grid that stays feasible the weight is increasing, hence not monotone.
    assert alpha_monotonicity_check(weak_links, 0.2, np.linspace(0.5, 1.0, 50)) is False


def test_selection_optimal_reference(weak_links):
    best = selection_optimal(weak_links, 0.2)
    assert best.feasible
    assert best.f_s == 1.0
    assert math.isclose(best.alpha_s, 0.65, rel_tol=1e-12)
    assert math.isclose(best.alpha_sp, 0.35, rel_tol=1e-12)
    assert math.isclose(best.lambda_s_max, BOUNDARY_AT_02, rel_tol=1e-12)
    silent = selection_optimal(weak_links, 0.0)
    assert silent == SelectionOptimum(0.0, 1.0, 0.0, 0.9, True)


def test_service_order_never_matters():
    # Optimized selection and relay-first service trace the same boundary;
    # the optimum admission is an endpoint, so the grid scan lands on it
    # exactly and both disciplines evaluate the identical closed form.
    rng = np.random.default_rng(43)
    for _ in range(100):
        links = random_links(rng)
        lam_p = float(rng.uniform(0.0, 0.8))
        pri = priority_region_boundary(links, lam_p)
        sel = selection_optimal(links, lam_p)
        assert sel.feasible == pri.feasible
        if pri.feasible:
            assert abs(sel.lambda_s_max - pri.lambda_s_max) <= 1e-12


def test_region_curves(weak_links):
    grid = primary_grid(0.37, 0.01)
    pri = priority_region_curve(weak_links, grid)
    sel = selection_region_curve(weak_links, grid)
    assert pri.variant == "priority" and pri.bound == "exact"
    assert sel.variant == "selection" and sel.bound == "exact"
    pri.assert_monotone()
    sel.assert_monotone()
    for a, b in zip(pri.points, sel.points):
        assert abs(a.lambda_s_max - b.lambda_s_max) <= 1e-12


def test_parameter_validation(weak_links):
    with pytest.raises(ParameterError):
        priority_rates(weak_links, -0.1, 1.0)
    with pytest.raises(ParameterError):
        priority_rates(weak_links, 0.2, 1.5)
    with pytest.raises(ParameterError):
        selection_rates(weak_links, 0.2, 1.0, -0.2)
    dead = LinkProbabilities(0.0, 0.0, 0.5, 0.9, 0.8, 0.8, 0.1, 0.1)
    with pytest.raises(InfeasibleRateError):
        priority_rates(dead, 0.1, 1.0)

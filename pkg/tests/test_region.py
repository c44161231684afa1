"""Region containers, the sampling grid and the non-cooperative baseline."""

import math

import numpy as np
import pytest

from cogrelay import (
    ConsistencyError,
    LinkProbabilities,
    ParameterError,
    RegionCurve,
    RegionPoint,
    baseline_curve,
    primary_grid,
)


def test_primary_grid_inclusive_endpoints():
    grid = primary_grid(0.91, 0.01)
    assert grid[0] == 0.0 and grid[-1] == pytest.approx(0.91, abs=1e-12)
    assert len(grid) == 92
    assert np.all(np.diff(grid) > 0)
    # A max rate off the step lattice still ends up on the grid.
    grid = primary_grid(0.905, 0.01)
    assert grid[-1] == 0.905 and grid[-2] == 0.9


def test_primary_grid_validation():
    with pytest.raises(ParameterError):
        primary_grid(0.5, 0.0)
    with pytest.raises(ParameterError):
        primary_grid(-0.1, 0.01)


def test_assert_monotone():
    flat = RegionCurve("x", "exact", (RegionPoint(0.0, 0.5, True), RegionPoint(0.1, 0.5, True)))
    flat.assert_monotone()  # ties are fine
    rising = RegionCurve(
        "x", "exact", (RegionPoint(0.0, 0.5, True), RegionPoint(0.1, 0.5001, True))
    )
    with pytest.raises(ConsistencyError, match="lambda_p=0.1"):
        rising.assert_monotone()
    rising.assert_monotone(tol=1e-3)


def test_curve_accessors():
    curve = RegionCurve(
        "x", "exact", (RegionPoint(0.0, 0.9, True), RegionPoint(0.2, 0.4, True))
    )
    assert curve.lambda_p().tolist() == [0.0, 0.2]
    assert curve.values().tolist() == [0.9, 0.4]


def test_baseline_curve(weak_links):
    # Dead direct primary link: without cooperation the primary is never
    # served and the region collapses to the origin.
    curve = baseline_curve(weak_links, np.array([0.0, 0.1, 0.3]))
    assert curve.variant == "nc" and curve.bound == "exact"
    assert [p.lambda_s_max for p in curve.points] == [0.0, 0.0, 0.0]
    assert [p.feasible for p in curve.points] == [True, False, False]


def test_baseline_curve_live_link():
    links = LinkProbabilities(0.8, 0.5, 0.5, 0.9, 0.7, 0.7, 0.2, 0.2)
    grid = primary_grid(0.8, 0.1)
    curve = baseline_curve(links, grid)
    curve.assert_monotone()
    for point in curve.points:
        assert point.feasible
        expect = (1.0 - point.lambda_p / 0.8) * 0.9
        assert math.isclose(point.lambda_s_max, expect, abs_tol=1e-12)
    past = baseline_curve(links, np.array([0.81]))
    assert past.points[0].lambda_s_max == 0.0 and not past.points[0].feasible

"""Stable-throughput region curves: shared point/curve containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, ParameterError
from .phy import LinkProbabilities

# Curves are sampled on a lambda_p grid with this default spacing.
DEFAULT_GRID_STEP = 0.01


@dataclass(frozen=True)
class RegionPoint:
    """Largest stable secondary arrival rate at one primary arrival rate."""

    lambda_p: float
    lambda_s_max: float
    feasible: bool  # False when no policy keeps every queue stable
    params: dict = field(default_factory=dict)  # maximizing policy parameters


@dataclass(frozen=True)
class RegionCurve:
    """A boundary curve of one variant/bound over a lambda_p grid."""

    variant: str
    bound: str
    points: tuple

    def lambda_p(self) -> np.ndarray:
        return np.array([p.lambda_p for p in self.points])

    def values(self) -> np.ndarray:
        return np.array([p.lambda_s_max for p in self.points])

    def assert_monotone(self, tol: float = 1e-12) -> None:
        """Fail loudly if the curve ever increases with lambda_p."""
        values = self.values()
        jump = np.diff(values)
        worst = jump.max(initial=-np.inf)
        if worst > tol:
            i = int(np.argmax(jump))
            raise ConsistencyError(
                f"{self.variant}/{self.bound} curve increases by {worst:.3e} "
                f"at lambda_p={self.points[i + 1].lambda_p}"
            )


def primary_grid(mu_p_max: float, step: float = DEFAULT_GRID_STEP) -> np.ndarray:
    """Uniform lambda_p grid over [0, mu_p_max], endpoint included."""
    if step <= 0.0:
        raise ParameterError(f"grid step must be positive, got {step}")
    if mu_p_max < 0.0:
        raise ParameterError(f"mu_p_max must be nonnegative, got {mu_p_max}")
    n = int(np.floor(mu_p_max / step + 1e-9))
    grid = np.round(np.arange(n + 1) * step, 12)
    if grid[-1] < mu_p_max - 1e-9:
        grid = np.append(grid, mu_p_max)
    return grid


def baseline_curve(links: LinkProbabilities, grid: np.ndarray) -> RegionCurve:
    """Non-cooperative region: the secondary only uses the primary's idle slots.

    A primary whose direct link never succeeds is never served, so the region
    degenerates to the origin in that case.
    """
    points = []
    for lam_p in grid:
        lam_p = float(lam_p)
        if links.p_pd <= 0.0:
            points.append(RegionPoint(lam_p, 0.0, lam_p == 0.0, {}))
        elif lam_p > links.p_pd:
            points.append(RegionPoint(lam_p, 0.0, False, {}))
        else:
            value = (1.0 - lam_p / links.p_pd) * links.s_sd
            points.append(RegionPoint(lam_p, value, True, {}))
    return RegionCurve("nc", "exact", tuple(points))

"""Exact regions for relaying handled by the secondary transmitter alone.

With the secondary receiver admitting nothing, only two secondary queues
remain (own data and relayed packets) and they never collide: the transmitter
either always serves the relay queue first, or flips a weighted coin between
the two. Both disciplines are exactly analysable, share the same piecewise
affine region boundary, and bound the full random-access region from below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleRateError, ParameterError
from .optimize import grid_refine
from .phy import LinkProbabilities
from .queueing import empty_probability, occupancy
from .region import RegionCurve, RegionPoint

# 1-D admission searches use this grid spacing, then one local refinement.
ADMISSION_STEP = 0.005


def admission_gain(links: LinkProbabilities) -> float:
    """Slope of the primary service rate in the ST admission fraction.

    A primary packet gains a second chance when its own receiver fails but the
    secondary transmitter decodes: mu_p = p_pd + f_s * admission_gain.
    """
    return (1.0 - links.p_pd) * links.p_s


@dataclass(frozen=True)
class SpecialCaseRates:
    """Queue rates of one no-SR-relaying discipline at fixed admission."""

    mu_p: float  # primary service rate
    lam_ps: float  # arrivals into ST's relay queue
    mu_ps: float  # service rate of ST's relay queue
    mu_s: float  # service rate of ST's own-data queue
    admission_gain: float  # the table's mu_p slope in f_s


@dataclass(frozen=True)
class AdmissionChoice:
    """Optimal admission fraction, exposing ties as an interval."""

    f_s: float  # canonical representative
    interval: tuple  # (lo, hi) of equally optimal admissions


@dataclass(frozen=True)
class SelectionOptimum:
    """Argmax of the randomized-selection variant at one primary load."""

    f_s: float
    alpha_s: float  # coin weight on the own-data queue
    alpha_sp: float  # coin weight on the relay queue
    lambda_s_max: float
    feasible: bool


def _check_lam_p(lam_p: float) -> None:
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be in [0, 1], got {value}")


def priority_rates(links: LinkProbabilities, lam_p: float, f_s: float) -> SpecialCaseRates:
    """Rates when the relay queue always preempts the own-data queue.

    The relay queue sees every idle slot, so the own-data queue is served only
    in idle slots the relay queue leaves empty; its conditional emptiness is
    exactly 1 - lam_ps/mu_ps by rate conservation.
    """
    _check_lam_p(lam_p)
    _check_fraction("f_s", f_s)
    gain = admission_gain(links)
    mu_p = links.p_pd + f_s * gain
    if mu_p == 0.0 and lam_p > 0.0:
        raise InfeasibleRateError(f"primary arrivals {lam_p} but the primary is never served")
    rho_p = occupancy(lam_p, mu_p)
    lam_ps = rho_p * f_s * gain
    mu_ps = (1.0 - rho_p) * links.s_pd
    rho_ps = occupancy(lam_ps, mu_ps)
    mu_s = (1.0 - rho_p) * (1.0 - rho_ps) * links.s_sd
    return SpecialCaseRates(mu_p, lam_ps, mu_ps, mu_s, gain)


def selection_rates(
    links: LinkProbabilities, lam_p: float, f_s: float, alpha_s: float
) -> SpecialCaseRates:
    """Rates when the ST picks a queue by a coin flip each idle slot.

    The flip ignores occupancy, so each queue owns a fixed share of the idle
    slots; a toss landing on an empty queue wastes the slot.
    """
    _check_lam_p(lam_p)
    _check_fraction("f_s", f_s)
    _check_fraction("alpha_s", alpha_s)
    gain = admission_gain(links)
    mu_p = links.p_pd + f_s * gain
    if mu_p == 0.0 and lam_p > 0.0:
        raise InfeasibleRateError(f"primary arrivals {lam_p} but the primary is never served")
    rho_p = occupancy(lam_p, mu_p)
    idle = 1.0 - rho_p
    lam_ps = rho_p * f_s * gain
    mu_ps = idle * (1.0 - alpha_s) * links.s_pd
    mu_s = idle * alpha_s * links.s_sd
    return SpecialCaseRates(mu_p, lam_ps, mu_ps, mu_s, gain)


def optimal_admission(links: LinkProbabilities, lam_p: float) -> AdmissionChoice:
    """Admission fraction maximizing the stable own-data rate.

    The boundary value moves monotonically in f_s with the sign of
    s_pd - p_pd, so the optimum sits at an endpoint; when the two link
    qualities tie (or the primary is silent, or admission buys nothing) every
    fraction is optimal and 0 is the canonical representative.
    """
    _check_lam_p(lam_p)
    if lam_p == 0.0 or admission_gain(links) == 0.0 or links.p_pd == links.s_pd:
        return AdmissionChoice(0.0, (0.0, 1.0))
    if links.p_pd < links.s_pd:
        return AdmissionChoice(1.0, (1.0, 1.0))
    return AdmissionChoice(0.0, (0.0, 0.0))


def _boundary_value(links: LinkProbabilities, lam_p: float, f_s: float) -> tuple:
    """(lambda_s_max, feasible) of the exact region at a fixed admission."""
    gain = admission_gain(links)
    mu_p = links.p_pd + f_s * gain
    if lam_p == 0.0:
        return links.s_sd, True
    if mu_p <= 0.0:
        return 0.0, False
    relay_load = f_s * gain * lam_p
    if relay_load > 0.0 and links.s_pd <= 0.0:
        return 0.0, False
    relay_term = relay_load / links.s_pd if relay_load > 0.0 else 0.0
    slack = mu_p - lam_p - relay_term
    value = (links.s_sd / mu_p) * slack
    return max(0.0, value), slack >= 0.0


def priority_region_boundary(links: LinkProbabilities, lam_p: float) -> RegionPoint:
    """Largest stable own-data rate under relay-first service, at optimal f_s.

    Affine in lam_p on the feasible branch; 0 with feasible=False once the
    combined primary constraint is exceeded.
    """
    _check_lam_p(lam_p)
    choice = optimal_admission(links, lam_p)
    value, feasible = _boundary_value(links, lam_p, choice.f_s)
    return RegionPoint(lam_p, value, feasible, {"f_s": choice.f_s})


def priority_boundary_slope(links: LinkProbabilities) -> float:
    """Boundary slope d(lambda_s_max)/d(lam_p) on the feasible branch.

    Computed from the region equation itself at the optimal admission, not
    from any tabulated constant.
    """
    choice = optimal_admission(links, 1.0)  # branch choice only needs the sign
    gain = admission_gain(links)
    mu_p = links.p_pd + choice.f_s * gain
    if mu_p <= 0.0:
        raise ParameterError("boundary slope undefined: the primary is never served")
    relay = choice.f_s * gain / links.s_pd if choice.f_s * gain > 0.0 else 0.0
    return -(links.s_sd / mu_p) * (1.0 + relay)


def priority_max_primary(links: LinkProbabilities) -> float:
    """Feasible primary-rate range of the region, from the combined constraint."""
    choice = optimal_admission(links, 1.0)
    return combined_primary_constraint(links, choice.f_s, 1.0)


def combined_primary_constraint(links: LinkProbabilities, f_s: float, alpha_sp: float) -> float:
    """Largest primary arrival rate keeping both ST queues stable at once.

    The relay-queue constraint subsumes the primary one, so the cap is the
    primary service rate shrunk by the relay load share (never above mu_p).
    """
    _check_fraction("f_s", f_s)
    _check_fraction("alpha_sp", alpha_sp)
    gain = admission_gain(links)
    mu_p = links.p_pd + f_s * gain
    denom = f_s * gain + alpha_sp * links.s_pd
    if denom <= 0.0:
        return mu_p
    return mu_p * min(links.s_pd / denom, 1.0)


def selection_alpha_star(links: LinkProbabilities, lam_p: float, f_s: float) -> float:
    """Optimal own-data coin weight at a fixed admission fraction.

    The relay queue needs share f_s*gain*lam_p/((mu_p - lam_p)*s_pd); all the
    rest goes to own data. Requires lam_p < mu_p.
    """
    _check_lam_p(lam_p)
    _check_fraction("f_s", f_s)
    gain = admission_gain(links)
    denom = links.p_pd + f_s * gain - lam_p
    if denom <= 0.0:
        raise InfeasibleRateError(
            f"primary queue unstable at lam_p={lam_p}, f_s={f_s}: no access split exists"
        )
    relay_load = f_s * gain * lam_p
    if relay_load == 0.0:
        return 1.0
    if links.s_pd <= 0.0:
        raise InfeasibleRateError("relayed packets can never reach the primary receiver")
    return 1.0 - relay_load / (denom * links.s_pd)


def selection_alpha_slope(links: LinkProbabilities, lam_p: float, f_s: float) -> float:
    """Analytic d(alpha_s*)/d(f_s), negative exactly when lam_p < p_pd.

    Differentiating the closed form gives
    -(p_pd - lam_p) * gain * lam_p / ((p_pd + f_s*gain - lam_p)**2 * s_pd).
    """
    _check_lam_p(lam_p)
    _check_fraction("f_s", f_s)
    gain = admission_gain(links)
    denom = links.p_pd + f_s * gain - lam_p
    if denom <= 0.0:
        raise InfeasibleRateError(
            f"primary queue unstable at lam_p={lam_p}, f_s={f_s}: no access split exists"
        )
    if gain * lam_p == 0.0:
        return 0.0
    if links.s_pd <= 0.0:
        raise InfeasibleRateError("relayed packets can never reach the primary receiver")
    return -(links.p_pd - lam_p) * gain * lam_p / (denom * denom * links.s_pd)


def alpha_monotonicity_check(
    links: LinkProbabilities, lam_p: float, f_grid: np.ndarray | None = None, tol: float = 1e-12
) -> bool:
    """True iff alpha_s*(f_s) never increases and its slope is <= 0 on the grid.

    Every grid point must keep the primary queue stable (lam_p < p_pd + f*gain);
    with 0 in the grid that forces lam_p < p_pd, and on that domain the slope
    is provably nonpositive.
    """
    _check_lam_p(lam_p)
    if f_grid is None:
        f_grid = np.linspace(0.0, 1.0, 200)
    alphas = np.array([selection_alpha_star(links, lam_p, float(f)) for f in f_grid])
    slopes = np.array([selection_alpha_slope(links, lam_p, float(f)) for f in f_grid])
    return bool(np.all(np.diff(alphas) <= tol) and np.all(slopes <= tol))


def selection_optimal(
    links: LinkProbabilities, lam_p: float, f_step: float = ADMISSION_STEP
) -> SelectionOptimum:
    """Jointly optimal (f_s, coin weights) for the randomized-selection variant.

    Grid scan over the admission fraction with one local refinement; the coin
    weights at each admission come from the closed form. The value matches the
    relay-first boundary to within the refined grid resolution.
    """
    _check_lam_p(lam_p)
    if lam_p == 0.0:
        return SelectionOptimum(0.0, 1.0, 0.0, links.s_sd, True)

    def evaluator(points: np.ndarray) -> np.ndarray:
        values = np.full(len(points), -np.inf)
        for k, (f,) in enumerate(points):
            value, ok = _boundary_value(links, lam_p, float(f))
            if ok:
                values[k] = value
        return values

    (f_best,), value = grid_refine(evaluator, ((0.0, 1.0),), f_step, refine_rounds=1)
    if not np.isfinite(value):
        return SelectionOptimum(0.0, 0.0, 0.0, 0.0, False)
    gain = admission_gain(links)
    relay_load = f_best * gain * lam_p
    if relay_load == 0.0:
        alpha_s = 1.0  # relay queue idle; every toss can favor own data
    else:
        alpha_s = 1.0 - relay_load / ((links.p_pd + f_best * gain - lam_p) * links.s_pd)
    return SelectionOptimum(f_best, alpha_s, 1.0 - alpha_s, max(0.0, value), True)


def priority_region_curve(links: LinkProbabilities, grid: np.ndarray) -> RegionCurve:
    """Relay-first region boundary sampled on a primary-rate grid."""
    points = tuple(priority_region_boundary(links, float(g)) for g in grid)
    return RegionCurve("priority", "exact", points)


def selection_region_curve(
    links: LinkProbabilities, grid: np.ndarray, f_step: float = ADMISSION_STEP
) -> RegionCurve:
    """Randomized-selection region boundary sampled on a primary-rate grid."""
    points = []
    for g in grid:
        best = selection_optimal(links, float(g), f_step)
        params = (
            {"f_s": best.f_s, "alpha_s": best.alpha_s, "alpha_sp": best.alpha_sp}
            if best.feasible
            else {}
        )
        points.append(RegionPoint(float(g), best.lambda_s_max, best.feasible, params))
    return RegionCurve("selection", "exact", points=tuple(points))

"""Scheduled (collision-free) variant of the cooperative MAC.

Idle slots are granted to exactly one secondary queue: the secondary
transmitter with probability omega (which then serves its own data with
probability alpha, else its relay queue), the secondary receiver's relay
queue otherwise. No two secondary nodes ever transmit together, so only the
direct link probabilities appear and the best slot split is a small linear
program with a closed-form answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .phy import LinkProbabilities
from .queueing import empty_probability
from .ra import RaRates, primary_service_rate, relaying_arrival_rates
from .region import DEFAULT_GRID_STEP, RegionCurve, RegionPoint, primary_grid

# Admission pairs are searched on this grid; the objective is exact and cheap.
ADMISSION_STEP = 0.01


@dataclass(frozen=True)
class TdmaPolicy:
    """Slot-split probabilities and admission fractions."""

    omega: float  # idle slot granted to ST (else SR)
    alpha: float  # ST then serves its own data (else its relay queue)
    f_s: float
    f_sd: float
    keep_priority: int = 1

    def __post_init__(self) -> None:
        for name in ("omega", "alpha", "f_s", "f_sd"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value}")
        if self.keep_priority not in (0, 1):
            raise ParameterError(f"keep_priority must be 0 or 1, got {self.keep_priority}")


@dataclass(frozen=True)
class TdmaSplit:
    """Slot split realizing given flows, with the idle-slot shares they need."""

    omega: float
    alpha: float
    share_own: float  # idle-slot share the own-data flow needs
    share_st_relay: float  # share the ST relay flow needs
    share_sr_relay: float  # share the SR relay flow needs
    feasible: bool  # the three shares fit into one slot


def _share(flow: float, capacity: float) -> float:
    """Idle-slot share a flow needs from a service capacity; inf if starved."""
    if flow <= 0.0:
        return 0.0
    if capacity <= 0.0:
        return float("inf")
    return flow / capacity


def tdma_rates(links: LinkProbabilities, lam_p: float, policy: TdmaPolicy) -> RaRates:
    """Queue rates under a fixed slot split; collision-free by construction."""
    mu_p, gain = primary_service_rate(links, policy.f_s, policy.f_sd)
    lam_ps, lam_sd = relaying_arrival_rates(
        links, lam_p, policy.f_s, policy.f_sd, policy.keep_priority
    )
    idle = empty_probability(lam_p, mu_p)
    return RaRates(
        mu_p,
        gain,
        lam_ps,
        lam_sd,
        idle * policy.omega * policy.alpha * links.s_sd,
        idle * policy.omega * (1.0 - policy.alpha) * links.s_pd,
        idle * (1.0 - policy.omega) * links.sd_pd,
    )


def tdma_optimal_split(
    links: LinkProbabilities,
    lam_p: float,
    lam_s: float,
    f_s: float,
    f_sd: float,
    keep_priority: int = 1,
) -> TdmaSplit:
    """Slot split carrying the given flows, if any split can.

    Each flow pins the idle-slot share its queue needs; the split is feasible
    exactly when the three shares sum to at most one. The relay shares are met
    with equality and all slack goes to the own-data queue.
    """
    if lam_s < 0.0:
        raise ParameterError(f"lam_s must be nonnegative, got {lam_s}")
    mu_p, _ = primary_service_rate(links, f_s, f_sd)
    lam_ps, lam_sd = relaying_arrival_rates(links, lam_p, f_s, f_sd, keep_priority)
    idle = empty_probability(lam_p, mu_p)
    t_s = _share(lam_s, idle * links.s_sd)
    t_ps = _share(lam_ps, idle * links.s_pd)
    t_sd = _share(lam_sd, idle * links.sd_pd)
    feasible = t_s + t_ps + t_sd <= 1.0
    omega = min(1.0, max(0.0, 1.0 - t_sd))
    alpha = min(1.0, max(0.0, (1.0 - t_ps - t_sd) / omega)) if omega > 0.0 else 1.0
    return TdmaSplit(omega, alpha, t_s, t_ps, t_sd, feasible)


def tdma_region_boundary(
    links: LinkProbabilities, lam_p: float, f_s: float, f_sd: float, keep_priority: int = 1
) -> float:
    """Largest stable own-data rate at fixed admissions, clamped at 0.

    Whatever idle-slot share the two relay flows do not need can carry own
    data at the own-link success rate.
    """
    mu_p, _ = primary_service_rate(links, f_s, f_sd)
    lam_ps, lam_sd = relaying_arrival_rates(links, lam_p, f_s, f_sd, keep_priority)
    idle = empty_probability(lam_p, mu_p)
    if idle == 0.0:
        return 0.0
    t_rel = _share(lam_ps, idle * links.s_pd) + _share(lam_sd, idle * links.sd_pd)
    return max(0.0, idle * links.s_sd * (1.0 - t_rel))


def _share_grids(links: LinkProbabilities, lam_p: float, keep: int, f_step: float) -> tuple:
    """Vectorized (f_values, mu_p, idle, relay share sum) over the admission grid."""
    steps = int(round(1.0 / f_step))
    f_values = np.round(np.arange(steps + 1) * f_step, 12)
    f_s, f_sd = np.meshgrid(f_values, f_values, indexing="ij")
    out_ppd = 1.0 - links.p_pd
    mu_p = links.p_pd + out_ppd * (
        f_sd * links.p_sd + f_s * links.p_s - f_s * links.p_s * f_sd * links.p_sd
    )
    rho_p = np.minimum(lam_p / np.maximum(mu_p, 1e-300), 1.0) if lam_p > 0.0 else np.zeros_like(mu_p)
    idle = 1.0 - rho_p
    lam_ps = rho_p * out_ppd * (1.0 - keep * f_sd * links.p_sd) * f_s * links.p_s
    lam_sd = rho_p * out_ppd * (1.0 - (1 - keep) * f_s * links.p_s) * f_sd * links.p_sd
    with np.errstate(divide="ignore", invalid="ignore"):
        t_ps = np.where(lam_ps > 0.0, lam_ps / (idle * links.s_pd), 0.0)
        t_sd = np.where(lam_sd > 0.0, lam_sd / (idle * links.sd_pd), 0.0)
    t_rel = np.nan_to_num(t_ps + t_sd, nan=np.inf, posinf=np.inf)
    return f_values, mu_p, idle, t_ps, t_sd, t_rel


def _split_params(f_s: float, f_sd: float, keep: int, t_ps: float, t_sd: float) -> dict:
    omega = min(1.0, max(0.0, 1.0 - t_sd))
    alpha = min(1.0, max(0.0, (1.0 - t_ps - t_sd) / omega)) if omega > 0.0 else 1.0
    return {
        "f_s": f_s,
        "f_sd": f_sd,
        "keep_priority": float(keep),
        "omega": omega,
        "alpha": alpha,
    }


def tdma_max_secondary(
    links: LinkProbabilities, lam_p: float, f_step: float = ADMISSION_STEP
) -> RegionPoint:
    """Region boundary value optimized over admissions and the storage rule.

    Exhaustive grid over (f_s, f_sd) for both storage rules; ties prefer the
    SR-keeps rule and then the smallest admission pair, so repeated runs emit
    identical argmaxes.
    """
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    best_value, best_params = -1.0, None
    for keep in (1, 0):
        f_values, mu_p, idle, t_ps, t_sd, t_rel = _share_grids(links, lam_p, keep, f_step)
        feasible = (lam_p <= mu_p) & (t_rel <= 1.0)
        if not feasible.any():
            continue
        # Cap the infeasible lanes so 0 * inf cannot produce NaN noise.
        values = np.where(feasible, idle * links.s_sd * (1.0 - np.minimum(t_rel, 2.0)), -1.0)
        flat = int(np.argmax(values))
        value = float(values.flat[flat])
        if value > best_value:
            i, j = np.unravel_index(flat, values.shape)
            best_value = value
            best_params = _split_params(
                float(f_values[i]), float(f_values[j]), keep,
                float(t_ps[i, j]), float(t_sd[i, j]),
            )
    if best_params is None:
        return RegionPoint(lam_p, 0.0, False, {})
    return RegionPoint(lam_p, max(0.0, best_value), True, best_params)


def tdma_max_primary(links: LinkProbabilities, lam_p: float, f_step: float = ADMISSION_STEP) -> tuple:
    """Largest primary service rate whose relay flows still fit the idle slots.

    Zero admission is always feasible, so the value is at least the direct
    link success probability. Returns (value, params).
    """
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    best_value, best_params = -1.0, None
    for keep in (1, 0):
        f_values, mu_p, _, t_ps, t_sd, t_rel = _share_grids(links, lam_p, keep, f_step)
        values = np.where(t_rel <= 1.0, mu_p, -1.0)
        flat = int(np.argmax(values))
        value = float(values.flat[flat])
        if value > best_value:
            i, j = np.unravel_index(flat, values.shape)
            best_value = value
            best_params = _split_params(
                float(f_values[i]), float(f_values[j]), keep,
                float(t_ps[i, j]), float(t_sd[i, j]),
            )
    return best_value, best_params


def tdma_curve(
    links: LinkProbabilities,
    grid: np.ndarray | None = None,
    grid_step: float = DEFAULT_GRID_STEP,
    f_step: float = ADMISSION_STEP,
) -> RegionCurve:
    """Optimized region boundary over a primary-rate grid.

    Every admission cell's value is non-increasing in lam_p, so the pointwise
    maximum needs no cross-point bookkeeping to come out monotone.
    """
    if grid is None:
        grid = primary_grid(primary_service_rate(links, 1.0, 1.0)[0], grid_step)
    points = tuple(tdma_max_secondary(links, float(g), f_step) for g in grid)
    return RegionCurve("tdma", "exact", points)

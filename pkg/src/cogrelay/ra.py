"""Random-access cooperative relaying: rates, bounds and region curves.

The secondary transmitter keeps three flows (its own data, decoded primary
packets, and the secondary receiver's relay queue is fed too); idle slots are
shared by slotted-ALOHA access probabilities. Exact closed forms exist for the
two dominant systems used for the inner bound and for the relaxed system used
for the outer bound; the curves below optimize those forms over the policy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import special_cases
from ._fast import (
    OBJ_PRIMARY,
    OBJ_SECONDARY,
    SYS_DOMINANT1,
    SYS_DOMINANT2,
    SYS_OUTER1,
    max_primary_grid,
    multistart_ra,
    ra_rates_core,
)
from .errors import InfeasibleRateError, ParameterError
from .phy import LinkProbabilities
from .queueing import empty_probability
from .region import DEFAULT_GRID_STEP, RegionCurve, RegionPoint, primary_grid

INNER_BOUNDS = ("inner_s1", "inner_s2", "inner_union")
OUTER_BOUNDS = ("outer_o1", "outer_o2", "outer_intersection")
DEFAULT_RESTARTS = 500


@dataclass(frozen=True)
class RaPolicy:
    """Admission fractions and idle-slot access probabilities."""

    alpha_s: float  # ST transmits own data
    alpha_sp: float  # ST transmits a relayed packet
    alpha_sd: float  # SR transmits a relayed packet
    f_s: float  # fraction of decoded primary packets ST admits
    f_sd: float  # fraction of decoded primary packets SR admits
    keep_priority: int = 1  # 1: SR stores when both decode, 0: ST keeps

    def __post_init__(self) -> None:
        for name in ("alpha_s", "alpha_sp", "alpha_sd", "f_s", "f_sd"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value}")
        if self.alpha_s + self.alpha_sp > 1.0 + 1e-12:
            raise ParameterError(
                f"alpha_s + alpha_sp must not exceed 1, got {self.alpha_s + self.alpha_sp}"
            )
        if self.keep_priority not in (0, 1):
            raise ParameterError(f"keep_priority must be 0 or 1, got {self.keep_priority}")

    @property
    def alpha_idle(self) -> float:
        """Probability that ST stays silent in an idle slot."""
        return max(0.0, 1.0 - self.alpha_s - self.alpha_sp)


@dataclass(frozen=True)
class RaRates:
    """Arrival and service rates of the four queues under one policy."""

    mu_p: float  # primary service rate
    cooperation_gain: float  # mu_p minus the direct-link success probability
    lam_ps: float  # arrivals into ST's relay queue
    lam_sd: float  # arrivals into SR's relay queue
    mu_s: float  # service rate of ST's own-data queue
    mu_ps: float  # service rate of ST's relay queue
    mu_sd: float  # service rate of SR's relay queue


def primary_service_rate(links: LinkProbabilities, f_s: float, f_sd: float) -> tuple:
    """Primary service rate and the cooperation gain on top of the direct link.

    Independent of the storage-priority rule and of the access probabilities:
    a primary packet leaves when its receiver decodes it or any admitting
    relay does.
    """
    _check_fraction("f_s", f_s)
    _check_fraction("f_sd", f_sd)
    gain = (1.0 - links.p_pd) * (
        f_sd * links.p_sd + f_s * links.p_s - f_s * links.p_s * f_sd * links.p_sd
    )
    return links.p_pd + gain, gain


def max_primary_service_rate(links: LinkProbabilities) -> float:
    """Primary service rate under full admission, the largest possible."""
    return primary_service_rate(links, 1.0, 1.0)[0]


def relaying_arrival_rates(
    links: LinkProbabilities, lam_p: float, f_s: float, f_sd: float, keep_priority: int
) -> tuple:
    """Mean arrival rates into the two relaying queues.

    The primary's busy fraction is lam_p/mu_p (clamped at 1 when saturated);
    when both relays admit the same packet the storage-priority rule decides
    who keeps it.
    """
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    if keep_priority not in (0, 1):
        raise ParameterError(f"keep_priority must be 0 or 1, got {keep_priority}")
    mu_p, _ = primary_service_rate(links, f_s, f_sd)
    if mu_p == 0.0 and lam_p > 0.0:
        raise InfeasibleRateError(f"primary arrivals {lam_p} but the primary is never served")
    rho_p = 1.0 - empty_probability(lam_p, mu_p)
    out_ppd = 1.0 - links.p_pd
    keep = float(keep_priority)
    lam_ps = rho_p * out_ppd * (1.0 - keep * f_sd * links.p_sd) * f_s * links.p_s
    lam_sd = rho_p * out_ppd * (1.0 - (1.0 - keep) * f_s * links.p_s) * f_sd * links.p_sd
    return lam_ps, lam_sd


def _system_rates(sys_code: int, links: LinkProbabilities, lam_p: float, policy: RaPolicy) -> RaRates:
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    mu_p, lam_ps, lam_sd, mu_s, mu_ps, mu_sd, _, _ = ra_rates_core(
        sys_code,
        links.as_array(),
        lam_p,
        float(policy.keep_priority),
        policy.alpha_s,
        policy.alpha_sp,
        policy.alpha_sd,
        policy.f_s,
        policy.f_sd,
    )
    if mu_p == 0.0 and lam_p > 0.0:
        raise InfeasibleRateError(f"primary arrivals {lam_p} but the primary is never served")
    if sys_code in (SYS_DOMINANT1, SYS_OUTER1) and mu_ps == 0.0 and lam_ps > 0.0:
        raise InfeasibleRateError(f"relay arrivals {lam_ps} but ST's relay queue is never served")
    if sys_code == SYS_DOMINANT2 and mu_sd == 0.0 and lam_sd > 0.0:
        raise InfeasibleRateError(f"relay arrivals {lam_sd} but SR's relay queue is never served")
    return RaRates(mu_p, mu_p - links.p_pd, lam_ps, lam_sd, mu_s, mu_ps, mu_sd)


def dominant1_rates(links: LinkProbabilities, lam_p: float, policy: RaPolicy) -> RaRates:
    """Rates of the dominant system where Q_s and Q_sd transmit dummies.

    ST's relay queue is the only interacting queue left, so its stationary
    occupancy lam_ps/mu_ps (clamped at 1 if overloaded) enters SR's service
    rate exactly.
    """
    return _system_rates(SYS_DOMINANT1, links, lam_p, policy)


def dominant2_rates(links: LinkProbabilities, lam_p: float, policy: RaPolicy) -> RaRates:
    """Rates of the dominant system where both ST queues transmit dummies."""
    return _system_rates(SYS_DOMINANT2, links, lam_p, policy)


def outer1_rates(links: LinkProbabilities, lam_p: float, policy: RaPolicy) -> RaRates:
    """Relaxed rates that dominate both dominant systems componentwise.

    Every service probability is replaced by its no-collision (or
    best-occupancy) upper bound; the SR term is clamped at 1 where the
    relaxation exceeds a probability.
    """
    return _system_rates(SYS_OUTER1, links, lam_p, policy)


def outer2_max_secondary(links: LinkProbabilities, lam_p: float) -> float:
    """Largest secondary rate any policy could support, by idle-slot counting.

    The secondary's own queue can never be served faster than the fraction of
    slots the primary leaves idle under the most cooperative admission, times
    the own-data link success.
    """
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    mu_p_max = max_primary_service_rate(links)
    try:
        idle = empty_probability(lam_p, mu_p_max)
    except InfeasibleRateError:
        return 0.0
    return idle * links.s_sd


def strong_mpr_rates(
    links: LinkProbabilities, lam_p: float, f_s: float, f_sd: float, keep_priority: int
) -> tuple:
    """Rates and relay-queue feasibility when receivers tolerate collisions.

    With multipacket reception strong enough, concurrent secondary
    transmissions all decode as if alone, so access probabilities are pointless
    and every nonempty queue transmits. Returns (RaRates, feasible).
    """
    if not links.is_strong_mpr():
        warnings.warn("link table is not strong-MPR; interfered entries are below direct ones")
    mu_p, gain = primary_service_rate(links, f_s, f_sd)
    lam_ps, lam_sd = relaying_arrival_rates(links, lam_p, f_s, f_sd, keep_priority)
    idle = empty_probability(lam_p, mu_p)
    rates = RaRates(
        mu_p,
        gain,
        lam_ps,
        lam_sd,
        idle * links.s_sd,
        idle * links.s_pd,
        idle * links.sd_pd,
    )
    feasible = lam_p <= mu_p and lam_ps <= rates.mu_ps and lam_sd <= rates.mu_sd
    return rates, feasible


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be in [0, 1], got {value}")


# ---------------------------------------------------------------------------
# Region curves (optimized over policies)
# ---------------------------------------------------------------------------


def _point_seed(seed: int, sys_code: int, keep: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((seed, sys_code, keep, index))


def _random_starts(seed_seq: np.random.SeedSequence, restarts: int) -> np.ndarray:
    starts = np.empty((restarts, 5))
    for k, child in enumerate(seed_seq.spawn(restarts)):
        starts[k] = np.random.default_rng(child).random(5)
    return starts


def _deterministic_starts(links: LinkProbabilities, lam_p: float) -> list:
    starts = [
        np.array([1.0, 0.0, 0.0, 0.0, 0.0]),  # no cooperation, own data only
        np.array([0.0, 0.0, 0.0, 0.0, 0.0]),
        np.array([0.4, 0.3, 0.3, 1.0, 1.0]),
    ]
    best = special_cases.selection_optimal(links, lam_p)
    if best.feasible:
        # The exact closed-form optimum of the no-SR-relaying special case,
        # mapped into the dominant-system coordinates (alpha_sd = f_sd = 0).
        # The relay-queue constraint is tight at this point, so shave the
        # own-data share to keep the start strictly feasible under rounding.
        a_s = best.alpha_s * (1.0 - 1e-9)
        starts.append(np.array([a_s, 1.0 - a_s, 0.0, best.f_s, 0.0]))
    return starts


def _solve_point(
    sys_code: int,
    obj_sel: int,
    link_array: np.ndarray,
    lam_p: float,
    keep: int,
    restarts: int,
    seed_seq: np.random.SeedSequence,
    extra_starts: list,
) -> tuple:
    """(value, x, found) for one bound system at one lambda_p and keep rule."""
    rows = [np.clip(np.asarray(s, dtype=np.float64), 0.0, 1.0) for s in extra_starts]
    rows.append(_random_starts(seed_seq, restarts))
    starts = np.vstack(rows) if rows else np.zeros((0, 5))
    return multistart_ra(sys_code, obj_sel, link_array, lam_p, float(keep), starts)


def _params_dict(x: np.ndarray, keep: int) -> dict:
    return {
        "alpha_s": float(x[0]),
        "alpha_sp": float(x[1]),
        "alpha_sd": float(x[2]),
        "f_s": float(x[3]),
        "f_sd": float(x[4]),
        "keep_priority": float(keep),
    }


def ra_region_curves(
    links: LinkProbabilities,
    kinds: tuple = ("inner_union", "outer_intersection"),
    grid: np.ndarray | None = None,
    grid_step: float = DEFAULT_GRID_STEP,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> dict:
    """Optimized boundary curves for the requested bound kinds.

    The sweep runs from high lambda_p down, warm-starting each point with the
    argmax of the previous one, which keeps every emitted curve monotone; the
    outer-bound search is additionally warm-started from the inner argmaxes so
    the computed outer curve can never fall below the computed inner one.
    """
    unknown = set(kinds) - set(INNER_BOUNDS) - set(OUTER_BOUNDS)
    if unknown:
        raise ParameterError(f"unknown bound kinds {sorted(unknown)}")
    if grid is None:
        grid = primary_grid(max_primary_service_rate(links), grid_step)
    link_array = links.as_array()

    need_inner = bool(set(kinds) & {"inner_s1", "inner_s2", "inner_union", "outer_o1", "outer_intersection"})
    need_outer = bool(set(kinds) & {"outer_o1", "outer_intersection"})

    n = len(grid)
    results = {name: [None] * n for name in ("inner_s1", "inner_s2", "outer_o1")}
    cascade = {}  # (sys_code, keep) -> argmax x at the previous (higher) lambda_p
    order = np.argsort(grid)[::-1]
    for idx in order:
        lam_p = float(grid[idx])
        det = _deterministic_starts(links, lam_p)
        inner_argmaxes = []
        if need_inner:
            for name, sys_code in (("inner_s1", SYS_DOMINANT1), ("inner_s2", SYS_DOMINANT2)):
                best = (0.0, np.zeros(5), 1, False)
                for keep in (1, 0):
                    extra = list(det)
                    if (sys_code, keep) in cascade:
                        extra.append(cascade[(sys_code, keep)])
                    x, value, found = _solve_point(
                        sys_code, OBJ_SECONDARY, link_array, lam_p, keep,
                        restarts, _point_seed(seed, sys_code, keep, int(idx)), extra,
                    )
                    if found:
                        cascade[(sys_code, keep)] = x
                        inner_argmaxes.append((x, keep))
                        if not best[3] or value > best[0]:
                            best = (value, x, keep, True)
                results[name][idx] = RegionPoint(
                    lam_p, best[0], best[3], _params_dict(best[1], best[2])
                )
        if need_outer:
            best = (0.0, np.zeros(5), 1, False)
            for keep in (1, 0):
                extra = list(det)
                extra.extend(x for x, k in inner_argmaxes if k == keep)
                if (SYS_OUTER1, keep) in cascade:
                    extra.append(cascade[(SYS_OUTER1, keep)])
                x, value, found = _solve_point(
                    SYS_OUTER1, OBJ_SECONDARY, link_array, lam_p, keep,
                    restarts, _point_seed(seed, SYS_OUTER1, keep, int(idx)), extra,
                )
                if found:
                    cascade[(SYS_OUTER1, keep)] = x
                    if not best[3] or value > best[0]:
                        best = (value, x, keep, True)
            results["outer_o1"][idx] = RegionPoint(
                lam_p, best[0], best[3], _params_dict(best[1], best[2])
            )

    curves = {}
    if "inner_s1" in kinds:
        curves["inner_s1"] = RegionCurve("ra", "inner_s1", tuple(results["inner_s1"]))
    if "inner_s2" in kinds:
        curves["inner_s2"] = RegionCurve("ra", "inner_s2", tuple(results["inner_s2"]))
    if set(kinds) & {"inner_union"}:
        union = []
        for p1, p2 in zip(results["inner_s1"], results["inner_s2"]):
            better = p1 if p1.lambda_s_max >= p2.lambda_s_max else p2
            union.append(
                RegionPoint(p1.lambda_p, better.lambda_s_max, p1.feasible or p2.feasible, better.params)
            )
        curves["inner_union"] = RegionCurve("ra", "inner_union", tuple(union))
    if "outer_o1" in kinds:
        curves["outer_o1"] = RegionCurve("ra", "outer_o1", tuple(results["outer_o1"]))
    if set(kinds) & {"outer_o2", "outer_intersection"}:
        o2 = tuple(
            RegionPoint(float(g), max(0.0, outer2_max_secondary(links, float(g))), True, {})
            for g in grid
        )
        if "outer_o2" in kinds:
            curves["outer_o2"] = RegionCurve("ra", "outer_o2", o2)
        if "outer_intersection" in kinds:
            inter = []
            for p1, p2 in zip(results["outer_o1"], o2):
                if p1.lambda_s_max <= p2.lambda_s_max:
                    inter.append(p1)
                else:
                    inter.append(RegionPoint(p1.lambda_p, p2.lambda_s_max, p1.feasible, p2.params))
            curves["outer_intersection"] = RegionCurve("ra", "outer_intersection", tuple(inter))
    return curves


def inner_bound_curve(
    links: LinkProbabilities,
    grid: np.ndarray | None = None,
    grid_step: float = DEFAULT_GRID_STEP,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> RegionCurve:
    """Achievable-region boundary: union of the two dominant-system optima."""
    return ra_region_curves(links, ("inner_union",), grid, grid_step, restarts, seed)["inner_union"]


def outer_bound_curve(
    links: LinkProbabilities,
    grid: np.ndarray | None = None,
    grid_step: float = DEFAULT_GRID_STEP,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> RegionCurve:
    """Converse-region boundary: intersection of the two outer bounds."""
    return ra_region_curves(links, ("outer_intersection",), grid, grid_step, restarts, seed)[
        "outer_intersection"
    ]


def strong_mpr_curve(
    links: LinkProbabilities,
    grid: np.ndarray | None = None,
    grid_step: float = DEFAULT_GRID_STEP,
    f_step: float = 0.01,
) -> RegionCurve:
    """Region boundary under strong multipacket reception.

    Deterministic search over the same admission grid the TDMA boundary uses;
    access probabilities play no role because collisions are harmless.
    """
    if not links.is_strong_mpr():
        warnings.warn("link table is not strong-MPR; interfered entries are below direct ones")
    if grid is None:
        grid = primary_grid(max_primary_service_rate(links), grid_step)
    steps = int(round(1.0 / f_step))
    f_values = np.round(np.arange(steps + 1) * f_step, 12)
    f_s_grid, f_sd_grid = np.meshgrid(f_values, f_values, indexing="ij")
    out_ppd = 1.0 - links.p_pd
    mu_p = links.p_pd + out_ppd * (
        f_sd_grid * links.p_sd + f_s_grid * links.p_s - f_s_grid * links.p_s * f_sd_grid * links.p_sd
    )
    points = []
    for lam_p in grid:
        lam_p = float(lam_p)
        best_value = 0.0
        best_params = None
        for keep in (1, 0):
            rho_p = np.minimum(lam_p / np.maximum(mu_p, 1e-300), 1.0)
            idle = 1.0 - rho_p
            lam_ps = rho_p * out_ppd * (1.0 - keep * f_sd_grid * links.p_sd) * f_s_grid * links.p_s
            lam_sd = rho_p * out_ppd * (1.0 - (1.0 - keep) * f_s_grid * links.p_s) * f_sd_grid * links.p_sd
            feasible = (lam_p <= mu_p) & (lam_ps <= idle * links.s_pd) & (lam_sd <= idle * links.sd_pd)
            if not feasible.any():
                continue
            mu_s = np.where(feasible, idle * links.s_sd, -1.0)
            flat = int(np.argmax(mu_s))
            value = float(mu_s.flat[flat])
            if best_params is None or value > best_value:
                i, j = np.unravel_index(flat, mu_s.shape)
                best_value = value
                best_params = {
                    "f_s": float(f_values[i]),
                    "f_sd": float(f_values[j]),
                    "keep_priority": float(keep),
                }
        if best_params is None:
            points.append(RegionPoint(lam_p, 0.0, False, {}))
        else:
            points.append(RegionPoint(lam_p, best_value, True, best_params))
    return RegionCurve("strong_mpr", "exact", tuple(points))


def max_primary_rate(
    links: LinkProbabilities,
    lam_p: float,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> tuple:
    """Largest primary service rate with stable relay queues at this lambda_p.

    Maximizes over admissions, access probabilities, the storage rule and both
    dominant systems; f_s = f_sd = 0 is always feasible, so the value is at
    least the direct-link success probability. Returns (value, params).
    """
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    link_array = links.as_array()
    best = (links.p_pd, {"alpha_s": 0.0, "alpha_sp": 0.0, "alpha_sd": 0.0, "f_s": 0.0, "f_sd": 0.0, "keep_priority": 1.0})
    for sys_code in (SYS_DOMINANT1, SYS_DOMINANT2):
        for keep in (1, 0):
            extra = [
                np.array([0.0, 0.5, 0.5, 1.0, 1.0]),
                np.array([0.0, 0.3, 0.7, 1.0, 1.0]),
                np.array([0.0, 0.0, 0.0, 0.0, 0.0]),
            ]
            grid_x, grid_value, grid_found = max_primary_grid(
                sys_code, link_array, lam_p, float(keep), 0.01, 0.02
            )
            if grid_found:
                extra.append(grid_x)
                if grid_value > best[0]:
                    best = (grid_value, _params_dict(grid_x, keep))
            x, value, found = _solve_point(
                sys_code, OBJ_PRIMARY, link_array, lam_p, keep,
                restarts, _point_seed(seed, 10 + sys_code, keep, 0), extra,
            )
            if found and value > best[0]:
                best = (value, _params_dict(x, keep))
    return best

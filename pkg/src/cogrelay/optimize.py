"""Derivative-free maximizers used by the region and rate sweeps.

Two engines cover every search in the package: a multistart shrinking-step
coordinate ascent for the nonconvex box problems (access probabilities and
admission fractions, with kinked constraint surfaces from the saturation
clamps), and a deterministic refining grid scan for the cheap low-dimensional
closed-form objectives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._fast import SYS_DOMINANT1, SYS_DOMINANT2, SYS_OUTER1, STEP0, STEP_MIN, ra_rates_core
from .errors import ParameterError
from .phy import LinkProbabilities

RA_SYSTEMS = {
    "dominant1": SYS_DOMINANT1,
    "dominant2": SYS_DOMINANT2,
    "outer1": SYS_OUTER1,
}


@dataclass(frozen=True)
class OptProblem:
    """Box-bounded maximization with a black-box feasibility measure.

    `objective` maps a point to the value being maximized; `violation` maps it
    to a total constraint excess that is exactly 0 on the feasible set.
    `simplex_pairs` lists index pairs (i, j) coupled by x[i] + x[j] <= 1.
    """

    objective: Callable
    violation: Callable
    lower: tuple
    upper: tuple
    simplex_pairs: tuple = ()

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ParameterError("lower and upper bounds must be equal-length and nonempty")
        for lo, hi in zip(self.lower, self.upper):
            if not lo <= hi:
                raise ParameterError(f"bounds are not well ordered: [{lo}, {hi}]")
        for i, j in self.simplex_pairs:
            if not (0 <= i < len(self.lower) and 0 <= j < len(self.lower) and i != j):
                raise ParameterError(f"bad simplex pair ({i}, {j})")


@dataclass(frozen=True)
class OptResult:
    """Best point found by a search, with the provenance needed to rerun it."""

    value: float
    x: tuple
    feasible: bool
    restarts: int
    seed: int
    params: dict = field(default_factory=dict)


def _project(problem: OptProblem, x: np.ndarray) -> np.ndarray:
    x = np.minimum(np.maximum(x, problem.lower), problem.upper)
    for i, j in problem.simplex_pairs:
        s = x[i] + x[j]
        if s > 1.0:
            x[i] /= s
            x[j] /= s
    return x


def _descend(problem: OptProblem, x0: np.ndarray) -> tuple:
    """Coordinate search from one start; returns (x, objective, feasible).

    Phase 1 walks infeasible starts toward the feasible set by minimizing the
    violation; phase 2 climbs the objective accepting only feasible moves.
    """
    x = _project(problem, np.array(x0, dtype=np.float64))
    n = len(x)
    pair_of = {}
    for i, j in problem.simplex_pairs:
        pair_of[i] = j
        pair_of[j] = i
    viol = problem.violation(x)

    def moves(h):
        for i in range(n):
            for sgn in (1.0, -1.0):
                xi = x[i] + sgn * h
                if xi < problem.lower[i] or xi > problem.upper[i]:
                    continue
                if i in pair_of and xi + x[pair_of[i]] > 1.0:
                    continue
                yield i, xi

    if viol > 0.0:
        h = STEP0
        while h >= STEP_MIN and viol > 0.0:
            improved = False
            for i, xi in moves(h):
                old = x[i]
                x[i] = xi
                v2 = problem.violation(x)
                if v2 < viol:
                    viol = v2
                    improved = True
                else:
                    x[i] = old
            if not improved:
                h *= 0.5
        if viol > 0.0:
            return x, 0.0, False

    obj = problem.objective(x)
    h = STEP0
    while h >= STEP_MIN:
        improved = False
        for i, xi in moves(h):
            old = x[i]
            x[i] = xi
            if problem.violation(x) <= 0.0:
                o2 = problem.objective(x)
                if o2 > obj:
                    obj = o2
                    improved = True
                    continue
            x[i] = old
        if not improved:
            h *= 0.5
    return x, obj, True


def multistart_solve(
    problem: OptProblem,
    restarts: int = 500,
    seed: int = 0,
    extra_starts: tuple = (),
) -> OptResult:
    """Best-of-restarts coordinate ascent from seeded random starts.

    Start k draws from its own stream keyed by (seed, k), so a longer run
    reuses the shorter run's starts as a prefix and can never do worse.
    Deterministic extra starts are tried first and do not consume the stream.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    n = len(problem.lower)
    lo = np.asarray(problem.lower, dtype=np.float64)
    span = np.asarray(problem.upper, dtype=np.float64) - lo
    best = OptResult(0.0, tuple(np.zeros(n)), False, restarts, seed)
    for start in extra_starts:
        x, obj, ok = _descend(problem, np.asarray(start, dtype=np.float64))
        if ok and (not best.feasible or obj > best.value):
            best = OptResult(obj, tuple(x), True, restarts, seed)
    for k in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence((seed, k)))
        x, obj, ok = _descend(problem, lo + span * rng.random(n))
        if ok and (not best.feasible or obj > best.value):
            best = OptResult(obj, tuple(x), True, restarts, seed)
    return best


def ra_secondary_problem(
    links: LinkProbabilities, lam_p: float, keep_priority: int, system: str = "dominant1"
) -> OptProblem:
    """Own-data throughput maximization for one analysable random-access system.

    Decision vector is (alpha_s, alpha_sp, alpha_sd, f_s, f_sd) in the unit
    box with alpha_s + alpha_sp <= 1; the violation totals the excess of every
    arrival rate over its queue's service rate.
    """
    if system not in RA_SYSTEMS:
        raise ParameterError(f"unknown system {system!r}, expected one of {sorted(RA_SYSTEMS)}")
    if lam_p < 0.0:
        raise ParameterError(f"lam_p must be nonnegative, got {lam_p}")
    sys_code = RA_SYSTEMS[system]
    L = links.as_array()
    keep = float(keep_priority)

    def objective(x):
        return ra_rates_core(sys_code, L, lam_p, keep, x[0], x[1], x[2], x[3], x[4])[3]

    def violation(x):
        out = ra_rates_core(sys_code, L, lam_p, keep, x[0], x[1], x[2], x[3], x[4])
        return out[6] + out[7]

    return OptProblem(objective, violation, (0.0,) * 5, (1.0,) * 5, ((0, 1),))


def grid_refine(
    evaluator: Callable,
    box: tuple,
    coarse_step: float,
    refine_rounds: int = 1,
) -> tuple:
    """Deterministic grid maximization with local refinement; (point, value).

    `evaluator` takes an (n, d) array of points and returns n values (use
    -inf for infeasible points). Each refinement round re-scans an 11-point
    axis per dimension inside one coarse cell around the incumbent, shrinking
    the step fivefold, so r rounds land within coarse_step/5**r per axis.
    Ties go to the lexicographically smallest grid point.
    """
    if coarse_step <= 0.0:
        raise ParameterError(f"coarse_step must be positive, got {coarse_step}")
    if refine_rounds < 0:
        raise ParameterError(f"refine_rounds must be nonnegative, got {refine_rounds}")
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    for lo, hi in box:
        if not lo <= hi:
            raise ParameterError(f"bounds are not well ordered: [{lo}, {hi}]")

    def scan(center, step, points_per_axis):
        axes = []
        for (lo, hi), c in zip(box, center):
            half = step * (points_per_axis - 1) / 2.0
            axis = np.linspace(c - half, c + half, points_per_axis)
            axes.append(np.clip(axis, lo, hi))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        values = np.asarray(evaluator(pts), dtype=np.float64)
        k = int(np.argmax(values))
        return pts[k], float(values[k])

    # Coarse pass covers the whole box with the requested spacing.
    axes = []
    for lo, hi in box:
        n = max(1, int(round((hi - lo) / coarse_step)))
        axes.append(np.linspace(lo, hi, n + 1) if hi > lo else np.array([lo]))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    values = np.asarray(evaluator(pts), dtype=np.float64)
    k = int(np.argmax(values))
    best_x, best_v = pts[k], float(values[k])

    step = coarse_step
    for _ in range(refine_rounds):
        step /= 5.0
        x, v = scan(best_x, step, 11)
        if v > best_v:
            best_x, best_v = x, v
    return tuple(float(c) for c in best_x), best_v

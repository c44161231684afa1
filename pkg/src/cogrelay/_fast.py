"""Compiled numeric cores for the random-access rate formulas and searches.

Everything here works on plain floats and fixed-order arrays so numba can
compile it; the dataclass-facing wrappers live in ra.py and optimize.py. The
link array layout is LinkProbabilities.as_array():
[p_pd, p_s, p_sd, s_sd, s_pd, sd_pd, s_pd_vs_sd, sd_pd_vs_s] (success probs).
"""

from __future__ import annotations

import numpy as np

from ._jit import njit

# System codes for ra_rates_core.
SYS_DOMINANT1 = 0  # own-data and SR queues padded with dummies
SYS_DOMINANT2 = 1  # both ST queues padded with dummies
SYS_OUTER1 = 2  # every service term at its dominance maximum

# Objective selectors for the descent.
OBJ_SECONDARY = 0  # maximize mu_s subject to all-queue stability
OBJ_PRIMARY = 1  # maximize mu_p subject to relay-queue stability only

# Search hyperparameters (fixed so results are reproducible everywhere).
STEP0 = 0.1
STEP_MIN = 1e-5
ACCEPT_TOL = 0.0  # computed violations are exactly 0 inside the feasible set


@njit(cache=True)
def occ_clamped(lam: float, mu: float) -> float:
    """Stationary nonempty probability with the saturation clamp."""
    if mu <= 0.0:
        return 0.0 if lam <= 0.0 else 1.0
    r = lam / mu
    return r if r < 1.0 else 1.0


@njit(cache=True)
def ra_rates_core(sys_code, L, lam_p, keep, a_s, a_sp, a_sd, f_s, f_sd):
    """All six rates of one analysable random-access system plus violations.

    Returns (mu_p, lam_ps, lam_sd, mu_s, mu_ps, mu_sd, primary_gap, relay_gap)
    where the gaps are the constraint violations max(0, lam - mu) of the
    primary queue and of the two relaying queues combined.
    """
    ok_ppd = L[0]
    ok_ps = L[1]
    ok_psd = L[2]
    ok_ssd = L[3]
    ok_spd = L[4]
    ok_sdpd = L[5]
    ok_spd_i = L[6]
    ok_sdpd_i = L[7]

    out_ppd = 1.0 - ok_ppd
    gain = out_ppd * (f_sd * ok_psd + f_s * ok_ps - f_s * ok_ps * f_sd * ok_psd)
    mu_p = ok_ppd + gain
    primary_gap = lam_p - mu_p if lam_p > mu_p else 0.0
    rho_p = occ_clamped(lam_p, mu_p)
    idle = 1.0 - rho_p

    # Relayed flow split by the storage-priority rule.
    lam_ps = rho_p * out_ppd * (1.0 - keep * f_sd * ok_psd) * f_s * ok_ps
    lam_sd = rho_p * out_ppd * (1.0 - (1.0 - keep) * f_s * ok_ps) * f_sd * ok_psd

    a_i = 1.0 - a_s - a_sp
    if sys_code == SYS_DOMINANT1:
        mu_s = idle * ok_ssd * a_s * (1.0 - a_sd)
        mu_ps = idle * a_sp * ((1.0 - a_sd) * ok_spd + a_sd * ok_spd_i)
        rho1 = occ_clamped(lam_ps, mu_ps)
        mu_sd = idle * a_sd * (
            ((1.0 - a_s) * (1.0 - rho1) + a_i * rho1) * ok_sdpd
            + (a_sp * rho1 + a_s) * ok_sdpd_i
        )
    elif sys_code == SYS_DOMINANT2:
        mu_sd = idle * a_sd * (a_i * ok_sdpd + (a_s + a_sp) * ok_sdpd_i)
        rho2 = occ_clamped(lam_sd, mu_sd)
        mu_s = idle * ok_ssd * a_s * (1.0 - a_sd * rho2)
        mu_ps = idle * a_sp * ((1.0 - a_sd * rho2) * ok_spd + a_sd * rho2 * ok_spd_i)
    else:
        mu_s = idle * ok_ssd * a_s
        mu_ps = idle * a_sp * ok_spd
        rho1 = occ_clamped(lam_ps, mu_ps)
        mu_sd = idle * a_sd * (
            ((1.0 - rho1) + (1.0 - a_sp) * rho1 + (1.0 - a_s) * (1.0 - rho1) + a_i * rho1)
            * ok_sdpd
            + (a_sp * rho1 + a_s) * ok_sdpd_i
        )
        if mu_sd > 1.0:
            mu_sd = 1.0  # probability bound; arrivals are at most 1/slot anyway

    relay_gap = 0.0
    if lam_ps > mu_ps:
        relay_gap += lam_ps - mu_ps
    if lam_sd > mu_sd:
        relay_gap += lam_sd - mu_sd
    return mu_p, lam_ps, lam_sd, mu_s, mu_ps, mu_sd, primary_gap, relay_gap


@njit(cache=True)
def _objective(sys_code, obj_sel, L, lam_p, keep, x):
    """(objective, violation) of one candidate point x = [a_s,a_sp,a_sd,f_s,f_sd]."""
    mu_p, _, _, mu_s, _, _, primary_gap, relay_gap = ra_rates_core(
        sys_code, L, lam_p, keep, x[0], x[1], x[2], x[3], x[4]
    )
    if obj_sel == OBJ_PRIMARY:
        return mu_p, relay_gap
    return mu_s, primary_gap + relay_gap


@njit(cache=True)
def descent_ra(sys_code, obj_sel, L, lam_p, keep, x0):
    """Shrinking-step coordinate search from one start.

    Phase 1 walks an infeasible start toward the feasible set by minimizing the
    total constraint violation; phase 2 climbs the objective accepting only
    feasible moves. Returns (x, objective, feasible).
    """
    x = x0.copy()
    for i in range(5):
        if x[i] < 0.0:
            x[i] = 0.0
        elif x[i] > 1.0:
            x[i] = 1.0
    s = x[0] + x[1]
    if s > 1.0:
        x[0] /= s
        x[1] /= s
    obj, viol = _objective(sys_code, obj_sel, L, lam_p, keep, x)

    if viol > ACCEPT_TOL:
        h = STEP0
        while h >= STEP_MIN and viol > ACCEPT_TOL:
            improved = False
            for i in range(5):
                for sgn in (1.0, -1.0):
                    xi = x[i] + sgn * h
                    if xi < 0.0 or xi > 1.0:
                        continue
                    if i < 2 and (x[0] + x[1] + sgn * h) > 1.0:
                        continue
                    old = x[i]
                    x[i] = xi
                    obj2, viol2 = _objective(sys_code, obj_sel, L, lam_p, keep, x)
                    if viol2 < viol:
                        obj, viol = obj2, viol2
                        improved = True
                    else:
                        x[i] = old
            if not improved:
                h *= 0.5
        if viol > ACCEPT_TOL:
            return x, 0.0, False

    h = STEP0
    while h >= STEP_MIN:
        improved = False
        for i in range(5):
            for sgn in (1.0, -1.0):
                xi = x[i] + sgn * h
                if xi < 0.0 or xi > 1.0:
                    continue
                if i < 2 and (x[0] + x[1] + sgn * h) > 1.0:
                    continue
                old = x[i]
                x[i] = xi
                obj2, viol2 = _objective(sys_code, obj_sel, L, lam_p, keep, x)
                if viol2 <= ACCEPT_TOL and obj2 > obj:
                    obj = obj2
                    improved = True
                else:
                    x[i] = old
        if not improved:
            h *= 0.5
    return x, obj, True


@njit(cache=True)
def multistart_ra(sys_code, obj_sel, L, lam_p, keep, starts):
    """Best feasible descent result over a matrix of starts (rows)."""
    best_x = np.zeros(5)
    best_obj = 0.0
    found = False
    for k in range(starts.shape[0]):
        x, obj, ok = descent_ra(sys_code, obj_sel, L, lam_p, keep, starts[k].copy())
        if ok and (not found or obj > best_obj):
            best_x, best_obj, found = x, obj, True
    return best_x, best_obj, found


@njit(cache=True)
def max_primary_grid(sys_code, L, lam_p, keep, f_step, a_step):
    """Largest mu_p with stable relay queues, by pruned grid search.

    mu_p grows with both admission fractions, so the scan runs from full
    admission downward and prunes cells that cannot beat the incumbent. Own
    data access only hurts relay capacity, so a_s is pinned at 0 here.
    """
    n_f = int(round(1.0 / f_step))
    n_a = int(round(1.0 / a_step))
    best = -1.0
    best_x = np.zeros(5)
    found = False
    for i_fsd in range(n_f, -1, -1):
        f_sd = i_fsd * f_step
        top, _, _, _, _, _, _, _ = ra_rates_core(sys_code, L, lam_p, keep, 0.0, 0.0, 0.0, 1.0, f_sd)
        if found and top <= best:
            break
        for i_fs in range(n_f, -1, -1):
            f_s = i_fs * f_step
            mu_p, lam_ps, lam_sd, _, _, _, _, gap0 = ra_rates_core(
                sys_code, L, lam_p, keep, 0.0, 0.0, 0.0, f_s, f_sd
            )
            if found and mu_p <= best:
                break
            feasible = False
            a_sp_hit = 0.0
            a_sd_hit = 0.0
            if lam_ps <= 0.0 and lam_sd <= 0.0:
                feasible = True
            else:
                for i_sp in range(n_a + 1):
                    a_sp = i_sp * a_step
                    for i_sd in range(n_a + 1):
                        a_sd = i_sd * a_step
                        _, _, _, _, _, _, _, gap = ra_rates_core(
                            sys_code, L, lam_p, keep, 0.0, a_sp, a_sd, f_s, f_sd
                        )
                        if gap <= 0.0:
                            feasible = True
                            a_sp_hit = a_sp
                            a_sd_hit = a_sd
                            break
                    if feasible:
                        break
            if feasible and mu_p > best:
                best = mu_p
                best_x[0] = 0.0
                best_x[1] = a_sp_hit
                best_x[2] = a_sd_hit
                best_x[3] = f_s
                best_x[4] = f_sd
                found = True
    return best_x, best, found

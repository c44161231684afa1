"""Command line: analytic rates, region curves, rate sweeps, simulation, checks.

Every command reads one scenario file and emits plain CSV (the plotting
contract) or aligned text. Floats are printed with 9 significant digits and
all randomness is seed-pinned, so identical invocations produce byte-identical
output. Exit codes: 0 success, 1 failed checks or inconsistent data, 2 invalid
scenario or arguments.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import ra, special_cases, tdma
from .errors import CogrelayError, ConfigError, ConsistencyError, ParameterError
from .ra import RaPolicy
from .region import baseline_curve, primary_grid
from .scenario import build_policy, links_at_rate, load_scenario, rate_grid
from .sim import QUEUES, SimConfig, analytic_rates, run

REGION_COLUMNS = (
    "variant", "bound", "lambda_p", "lambda_s_max", "feasible",
    "f_s", "f_sd", "keep_priority", "alpha_s", "alpha_sp", "alpha_sd", "omega", "alpha",
)
_PARAM_COLUMNS = REGION_COLUMNS[5:]
RATE_COLUMNS = (
    "variant", "lambda_p", "lambda_s", "queue", "arrival", "service",
    "sim_arrival", "sim_arrival_se", "sim_service", "sim_service_se", "delta_se",
)
SWEEP_COLUMNS = (
    "rate", "tdma_mu_p", "ra_mu_p", "nc_mu_p", "tdma_lambda_s", "ra_lambda_s", "nc_lambda_s",
)
SIM_COLUMNS = (
    "variant", "lambda_p", "lambda_s", "queue", "arrival", "arrival_se",
    "service", "service_se", "conditional", "opportunities",
    "drift_per_10k", "max_length", "verdict",
)

# Region emission order under --variant all; strong_mpr joins only when the
# link table actually is strong-MPR.
REGION_VARIANTS = ("tdma", "ra", "priority", "selection", "strong_mpr", "nc")

ORDERING_TOL = 1e-6
EQUIVALENCE_TOL = 1e-3


def _fmt(value) -> str:
    return "%.9g" % float(value)


def _emit_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _param_cells(params: dict) -> list:
    return [_fmt(params[key]) if key in params else "" for key in _PARAM_COLUMNS]


def _region_rows(curve) -> list:
    rows = []
    for point in curve.points:
        rows.append(
            [curve.variant, curve.bound, _fmt(point.lambda_p), _fmt(point.lambda_s_max),
             "1" if point.feasible else "0", *_param_cells(point.params)]
        )
    return rows


def _se_delta(reference: float, value: float, se: float) -> float:
    diff = value - reference
    if se > 0.0:
        return diff / se
    return 0.0 if diff == 0.0 else float("inf")


def _resolve(args, name, scenario_value, required=False):
    value = getattr(args, name, None)
    if value is None:
        value = scenario_value
    if value is None and required:
        raise ConfigError(f"set --{name.replace('_', '-')} or the scenario's system section")
    return value


def cmd_rates(args) -> int:
    scenario = load_scenario(args.scenario)
    variant = _resolve(args, "variant", scenario.variant, required=True)
    if variant == "ra":
        raise ConfigError(
            "variant 'ra' has no closed-form rates; use 'dominant1'/'dominant2' or the simulate command"
        )
    lam_p = _resolve(args, "lambda_p", scenario.lam_p, required=True)
    seed = _resolve(args, "seed", scenario.sim_options["seed"])
    policy = build_policy(scenario, variant)
    config = SimConfig(
        variant=variant,
        links=scenario.links,
        lam_p=float(lam_p),
        lam_s=scenario.lam_s,
        policy=policy,
        **{**scenario.sim_options, "seed": int(seed)},
    )
    analytic = analytic_rates(config)
    report = run(config) if args.simulate else None

    print(f"variant={variant} lambda_p={_fmt(config.lam_p)} lambda_s={_fmt(config.lam_s)}")
    rows = []
    if report is None:
        print(f"{'queue':<6}{'arrival':>16}{'service':>16}")
        for q in QUEUES:
            arr, srv = analytic[q]
            print(f"{q:<6}{_fmt(arr):>16}{_fmt(srv):>16}")
            rows.append(
                [variant, _fmt(config.lam_p), _fmt(config.lam_s), q, _fmt(arr), _fmt(srv),
                 "", "", "", "", ""]
            )
    else:
        print(
            f"{'queue':<6}{'arrival':>16}{'service':>16}{'sim_arrival':>16}"
            f"{'sim_service':>16}{'se':>16}{'delta_se':>16}"
        )
        for q in QUEUES:
            arr, srv = analytic[q]
            sim_arr = report.rates.arrival[q]
            sim_srv = report.rates.service[q]
            se = report.rates.service_se[q]
            delta = _se_delta(srv, sim_srv, se)
            print(
                f"{q:<6}{_fmt(arr):>16}{_fmt(srv):>16}{_fmt(sim_arr):>16}"
                f"{_fmt(sim_srv):>16}{_fmt(se):>16}{_fmt(delta):>16}"
            )
            rows.append(
                [variant, _fmt(config.lam_p), _fmt(config.lam_s), q, _fmt(arr), _fmt(srv),
                 _fmt(sim_arr), _fmt(report.rates.arrival_se[q]), _fmt(sim_srv), _fmt(se),
                 _fmt(delta)]
            )
    if args.out is not None:
        _emit_csv(args.out, RATE_COLUMNS, rows)
    return 0


def _region_curves(scenario, variant, bound, grid, restarts, seed):
    links = scenario.links
    if variant == "all":
        wanted = [v for v in REGION_VARIANTS if v != "strong_mpr" or links.is_strong_mpr()]
    else:
        wanted = [variant]
    curves = []
    for name in wanted:
        if name == "tdma":
            curves.append(tdma.tdma_curve(links, grid=grid))
        elif name == "ra":
            kinds = {
                "inner": ("inner_union",),
                "outer": ("outer_intersection",),
                "both": ("inner_union", "outer_intersection"),
            }[bound]
            solved = ra.ra_region_curves(links, kinds, grid=grid, restarts=restarts, seed=seed)
            curves.extend(solved[kind] for kind in kinds)
        elif name == "priority":
            curves.append(special_cases.priority_region_curve(links, grid))
        elif name == "selection":
            curves.append(special_cases.selection_region_curve(links, grid))
        elif name == "strong_mpr":
            curves.append(ra.strong_mpr_curve(links, grid=grid))
        elif name == "nc":
            curves.append(baseline_curve(links, grid))
        else:
            raise ConfigError(f"unknown region variant {name!r}")
    return curves


def _cross_check_curves(curves) -> None:
    """Flag inner/outer inversions and a priority/selection mismatch on stderr."""
    by_kind = {(c.variant, c.bound): c for c in curves}
    inner = by_kind.get(("ra", "inner_union"))
    outer = by_kind.get(("ra", "outer_intersection"))
    if inner is not None and outer is not None:
        gap = inner.values() - outer.values()
        worst = float(gap.max(initial=-np.inf))
        if worst > ORDERING_TOL:
            print(f"warning: inner bound exceeds outer bound by {worst:.3e}", file=sys.stderr)
    priority = by_kind.get(("priority", "exact"))
    selection = by_kind.get(("selection", "exact"))
    if priority is not None and selection is not None:
        worst = float(np.abs(priority.values() - selection.values()).max(initial=0.0))
        if worst > EQUIVALENCE_TOL:
            print(f"warning: service-order boundaries disagree by {worst:.3e}", file=sys.stderr)


def cmd_region(args) -> int:
    scenario = load_scenario(args.scenario)
    # The scenario's system.variant picks the simulated MAC, not the curve
    # set; without an explicit --variant the command emits every curve.
    variant = args.variant or "all"
    step = float(_resolve(args, "grid_step", scenario.grid_step))
    restarts = int(_resolve(args, "restarts", scenario.optimizer_options["restarts"]))
    seed = int(_resolve(args, "seed", scenario.optimizer_options["seed"]))
    grid = primary_grid(ra.max_primary_service_rate(scenario.links), step)
    curves = _region_curves(scenario, variant, args.bound, grid, restarts, seed)
    for curve in curves:
        curve.assert_monotone()
    _cross_check_curves(curves)
    rows = [row for curve in curves for row in _region_rows(curve)]
    _emit_csv(args.out, REGION_COLUMNS, rows)
    return 0


def cmd_sweep_rate(args) -> int:
    scenario = load_scenario(args.scenario)
    lam_p = float(_resolve(args, "lambda_p", scenario.lam_p, required=True))
    restarts = int(_resolve(args, "restarts", scenario.optimizer_options["restarts"]))
    seed = int(_resolve(args, "seed", scenario.optimizer_options["seed"]))
    grid = rate_grid(scenario, args.grid_step)
    point = np.array([lam_p])
    values = {}
    for rate in reversed(grid):  # hardest thresholds first, mirroring the region sweeps
        links_r = links_at_rate(scenario, float(rate))
        values[float(rate)] = (
            tdma.tdma_max_primary(links_r, lam_p)[0],
            ra.max_primary_rate(links_r, lam_p, restarts=restarts, seed=seed)[0],
            links_r.p_pd,
            tdma.tdma_max_secondary(links_r, lam_p).lambda_s_max,
            ra.inner_bound_curve(links_r, grid=point, restarts=restarts, seed=seed).points[0].lambda_s_max,
            baseline_curve(links_r, point).points[0].lambda_s_max,
        )
    table = np.array([values[float(rate)] for rate in grid])
    rises = np.diff(table, axis=0)
    worst = float(rises.max(initial=-np.inf))
    if worst > 1e-9:
        col = SWEEP_COLUMNS[1 + int(np.unravel_index(np.argmax(rises), rises.shape)[1])]
        raise ConsistencyError(f"column {col} increases with the spectral rate by {worst:.3e}")
    rows = [
        [_fmt(rate), *(_fmt(v) for v in values[float(rate)])]
        for rate in grid
    ]
    _emit_csv(args.out, SWEEP_COLUMNS, rows)
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    variant = _resolve(args, "variant", scenario.variant, required=True)
    lam_p = _resolve(args, "lambda_p", scenario.lam_p, required=True)
    seed = _resolve(args, "seed", scenario.sim_options["seed"])
    config = SimConfig(
        variant=variant,
        links=scenario.links,
        lam_p=float(lam_p),
        lam_s=scenario.lam_s,
        policy=build_policy(scenario, variant),
        **{**scenario.sim_options, "seed": int(seed)},
    )
    report = run(config)
    print(
        f"variant={variant} lambda_p={_fmt(config.lam_p)} lambda_s={_fmt(config.lam_s)} "
        f"horizon={config.horizon} warmup={config.warmup} replicas={config.replicas} seed={config.seed}"
    )
    print(
        f"{'queue':<6}{'arrival':>16}{'service':>16}{'se':>16}{'conditional':>16}"
        f"{'drift/10k':>16}{'max':>8}  verdict"
    )
    rows = []
    for q in QUEUES:
        r = report.rates
        print(
            f"{q:<6}{_fmt(r.arrival[q]):>16}{_fmt(r.service[q]):>16}{_fmt(r.service_se[q]):>16}"
            f"{_fmt(r.conditional[q]):>16}{_fmt(report.drift_per_10k[q]):>16}"
            f"{report.max_lengths[q]:>8}  {report.queue_verdicts[q]}"
        )
        rows.append(
            [variant, _fmt(config.lam_p), _fmt(config.lam_s), q,
             _fmt(r.arrival[q]), _fmt(r.arrival_se[q]), _fmt(r.service[q]), _fmt(r.service_se[q]),
             _fmt(r.conditional[q]), str(r.opportunities[q]),
             _fmt(report.drift_per_10k[q]), str(report.max_lengths[q]), report.queue_verdicts[q]]
        )
    print(f"verdict: {report.verdict}")
    if args.out is not None:
        _emit_csv(args.out, SIM_COLUMNS, rows)
    return 0


def _validate_checks(scenario, grid_step, restarts, seed) -> list:
    """The cross-validation battery: (name, ok, detail) per check."""
    links = scenario.links
    results = []

    mu_max, gain_max = ra.primary_service_rate(links, 1.0, 1.0)
    ok = links.p_pd - 1e-12 <= mu_max <= 1.0 + 1e-12
    fs = np.linspace(0.0, 1.0, 5)
    mono = all(
        ra.primary_service_rate(links, float(a), 1.0)[0]
        <= ra.primary_service_rate(links, float(b), 1.0)[0] + 1e-12
        for a, b in zip(fs, fs[1:])
    ) and all(
        ra.primary_service_rate(links, 1.0, float(a))[0]
        <= ra.primary_service_rate(links, 1.0, float(b))[0] + 1e-12
        for a, b in zip(fs, fs[1:])
    )
    results.append(
        ("primary-rate", ok and mono,
         f"mu_p_max={_fmt(mu_max)} cooperation_gain={_fmt(gain_max)} admission-monotone={mono}")
    )

    probe = scenario.lam_p if scenario.lam_p is not None else 0.3
    probe = min(probe, 0.95 * mu_max) if mu_max > 0 else 0.0
    flip = []
    for keep in (1, 0):
        lam_ps, lam_sd = ra.relaying_arrival_rates(links, probe, 1.0, 1.0, keep)
        flip.append(lam_ps + lam_sd)
    diff = abs(flip[0] - flip[1])
    results.append(
        ("storage-rule-invariance", diff <= 1e-12,
         f"lambda_p={_fmt(probe)} total-relayed-flow-gap={_fmt(diff)}")
    )

    grid = primary_grid(mu_max, grid_step)
    curves = ra.ra_region_curves(
        links, ("inner_union", "outer_o1", "outer_o2", "outer_intersection"),
        grid=grid, restarts=restarts, seed=seed,
    )
    inner = curves["inner_union"].values()
    outer = curves["outer_intersection"].values()
    gap_io = float((inner - outer).max(initial=-np.inf))
    gap_o12 = float((curves["outer_o1"].values() - curves["outer_o2"].values()).max(initial=-np.inf))
    results.append(
        ("bound-ordering", gap_io <= ORDERING_TOL and gap_o12 <= ORDERING_TOL,
         f"max(inner-outer)={_fmt(gap_io)} max(outer1-outer2)={_fmt(gap_o12)}")
    )

    pri = special_cases.priority_region_curve(links, grid)
    sel = special_cases.selection_region_curve(links, grid)
    gap_eq = float(np.abs(pri.values() - sel.values()).max(initial=0.0))
    results.append(
        ("service-order-equivalence", gap_eq <= EQUIVALENCE_TOL, f"max-gap={_fmt(gap_eq)}")
    )

    try:
        slope = special_cases.priority_boundary_slope(links)
        predicted = np.maximum(0.0, links.s_sd + slope * pri.lambda_p())
        actual = pri.values()
        on_branch = actual > 0.0
        residual = float(np.abs(actual[on_branch] - predicted[on_branch]).max(initial=0.0))
        affine_ok = residual <= 1e-9
        detail = f"slope={_fmt(slope)} max-residual={_fmt(residual)}"
    except CogrelayError as exc:
        affine_ok, detail = True, f"skipped: {exc}"
    results.append(("priority-boundary-affine", affine_ok, detail))

    tdma_vals = tdma.tdma_curve(links, grid=grid).values()
    if links.is_strong_mpr():
        strong_vals = ra.strong_mpr_curve(links, grid=grid).values()
        margin = float((strong_vals - tdma_vals).min(initial=np.inf))
        results.append(
            ("access-ordering", margin >= -ORDERING_TOL,
             f"min(strong-tdma)={_fmt(margin)}")
        )
    else:
        m1 = float((tdma_vals - inner).min(initial=np.inf))
        m2 = float((inner - pri.values()).min(initial=np.inf))
        results.append(
            ("access-ordering", m1 >= -ORDERING_TOL and m2 >= -ORDERING_TOL,
             f"min(tdma-inner)={_fmt(m1)} min(inner-priority)={_fmt(m2)}")
        )

    if links.p_pd > 0.0:
        lam_a = 0.5 * links.p_pd
        mono_ok = special_cases.alpha_monotonicity_check(links, lam_a)
        results.append(
            ("relay-share-monotone", mono_ok, f"lambda_p={_fmt(lam_a)} grid=200")
        )
    else:
        results.append(
            ("relay-share-monotone", True, "skipped: direct primary link never succeeds")
        )

    sim_probe = min(0.3, 0.5 * mu_max) if mu_max > 0 else 0.0
    config = SimConfig(
        variant="dominant1",
        links=links,
        lam_p=sim_probe,
        lam_s=0.2,
        policy=RaPolicy(0.4, 0.3, 0.3, 1.0, 1.0, 1),
        horizon=120_000,
        warmup=20_000,
        replicas=4,
        seed=seed,
    )
    report = run(config)
    analytic = analytic_rates(config)
    worst_ratio = 0.0
    for q in QUEUES:
        for kind, value, se in (
            ("arrival", report.rates.arrival[q], report.rates.arrival_se[q]),
            ("service", report.rates.service[q], report.rates.service_se[q]),
        ):
            reference = analytic[q][0 if kind == "arrival" else 1]
            ratio = abs(_se_delta(reference, value, se))
            worst_ratio = max(worst_ratio, ratio)
    results.append(
        ("simulation-cross-check", worst_ratio <= 4.0,
         f"variant=dominant1 lambda_p={_fmt(sim_probe)} worst|delta|/se={_fmt(worst_ratio)}")
    )

    one = ra.inner_bound_curve(links, grid=np.array([probe]), restarts=restarts, seed=seed)
    two = ra.inner_bound_curve(links, grid=np.array([probe]), restarts=restarts, seed=seed)
    det_ok = one.points[0].lambda_s_max == two.points[0].lambda_s_max
    results.append(
        ("optimizer-determinism", det_ok, f"value={_fmt(one.points[0].lambda_s_max)}")
    )
    return results


def cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except CogrelayError as exc:
        line = f"FAIL scenario-load: {exc}"
        print(line)
        if args.out is not None:
            with open(args.out, "w", encoding="utf-8", newline="") as handle:
                handle.write(line + "\n")
        return 1
    grid_step = float(args.grid_step) if args.grid_step is not None else 0.05
    restarts = int(_resolve(args, "restarts", min(scenario.optimizer_options["restarts"], 120)))
    seed = int(_resolve(args, "seed", scenario.optimizer_options["seed"]))
    lines = [
        "PASS links: table loaded, interfered successes within direct ones"
        f" (strong_mpr={1 if scenario.links.is_strong_mpr() else 0})"
    ]
    failures = 0
    for name, ok, detail in _validate_checks(scenario, grid_step, restarts, seed):
        if not ok:
            failures += 1
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogrelay",
        description="Stable-throughput analysis of a cooperative cognitive relaying MAC.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *, variant=False, bound=False, lambda_p=False, grid_step=False,
               seed=False, restarts=False, simulate=False):
        sp.add_argument("--scenario", required=True, help="scenario YAML file")
        if variant:
            sp.add_argument("--variant", help="system variant (overrides the scenario)")
        if bound:
            sp.add_argument("--bound", choices=("inner", "outer", "both"), default="both",
                            help="which random-access bounds to emit")
        if lambda_p:
            sp.add_argument("--lambda-p", type=float, dest="lambda_p",
                            help="primary arrival rate (overrides the scenario)")
        if grid_step:
            sp.add_argument("--grid-step", type=float, dest="grid_step",
                            help="grid spacing for the sweep axis")
        if seed:
            sp.add_argument("--seed", type=int, help="RNG seed override")
        if restarts:
            sp.add_argument("--restarts", type=int, help="optimizer restarts override")
        if simulate:
            sp.add_argument("--simulate", action="store_true",
                            help="also simulate and print deltas in SE units")
        sp.add_argument("--out", help="CSV output path ('-' for stdout)")

    sp = sub.add_parser("rates", help="analytic per-queue rates at one operating point")
    common(sp, variant=True, lambda_p=True, seed=True, simulate=True)
    sp.set_defaults(func=cmd_rates)

    sp = sub.add_parser("region", help="stable-throughput region boundaries as CSV")
    common(sp, variant=True, bound=True, grid_step=True, seed=True, restarts=True)
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("sweep-rate", help="max rates versus the spectral rate (phy mode)")
    common(sp, lambda_p=True, grid_step=True, seed=True, restarts=True)
    sp.set_defaults(func=cmd_sweep_rate)

    sp = sub.add_parser("simulate", help="slot-level Monte Carlo at one operating point")
    common(sp, variant=True, lambda_p=True, seed=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("validate", help="run the cross-validation battery")
    common(sp, grid_step=True, seed=True, restarts=True)
    sp.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CogrelayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

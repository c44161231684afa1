"""Stable-throughput analysis of a cognitive cooperative relaying MAC.

A licensed transmitter/receiver pair shares a slotted channel with a
secondary pair that relays the primary's undelivered packets from the idle
slots it senses. The package computes per-queue service rates, optimizes
stable-throughput region boundaries for random-access and TDMA variants,
and cross-validates everything against a slot-level Monte Carlo simulator.
"""

from .errors import (
    CogrelayError,
    ConfigError,
    ConsistencyError,
    InfeasibleRateError,
    ParameterError,
)
from .optimize import OptProblem, OptResult, grid_refine, multistart_solve, ra_secondary_problem
from .phy import (
    LinkProbabilities,
    PhyParams,
    build_link_probabilities,
    decoding_threshold,
    interfered_success_prob,
    outage_prob,
    tx_time,
)
from .queueing import empty_probability, evolve, loynes_stable, occupancy
from .ra import (
    RaPolicy,
    RaRates,
    dominant1_rates,
    dominant2_rates,
    inner_bound_curve,
    max_primary_rate,
    max_primary_service_rate,
    outer1_rates,
    outer2_max_secondary,
    outer_bound_curve,
    primary_service_rate,
    ra_region_curves,
    relaying_arrival_rates,
    strong_mpr_curve,
    strong_mpr_rates,
)
from .region import RegionCurve, RegionPoint, baseline_curve, primary_grid
from .scenario import (
    Scenario,
    build_policy,
    links_at_rate,
    load_scenario,
    parse_scenario,
    rate_grid,
)
from .sim import (
    QUEUES,
    VARIANTS,
    SimConfig,
    SimReport,
    SlotOutcome,
    analytic_rates,
    estimate_rates,
    run,
    slot_step,
    stability_probe,
)
from .special_cases import (
    AdmissionChoice,
    SelectionOptimum,
    SpecialCaseRates,
    admission_gain,
    alpha_monotonicity_check,
    combined_primary_constraint,
    optimal_admission,
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
from .tdma import (
    TdmaPolicy,
    TdmaSplit,
    tdma_curve,
    tdma_max_primary,
    tdma_max_secondary,
    tdma_optimal_split,
    tdma_rates,
    tdma_region_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "CogrelayError",
    "ConfigError",
    "ConsistencyError",
    "InfeasibleRateError",
    "ParameterError",
    "LinkProbabilities",
    "PhyParams",
    "build_link_probabilities",
    "decoding_threshold",
    "interfered_success_prob",
    "outage_prob",
    "tx_time",
    "empty_probability",
    "evolve",
    "loynes_stable",
    "occupancy",
    "RegionCurve",
    "RegionPoint",
    "baseline_curve",
    "primary_grid",
    "RaPolicy",
    "RaRates",
    "primary_service_rate",
    "max_primary_service_rate",
    "relaying_arrival_rates",
    "dominant1_rates",
    "dominant2_rates",
    "outer1_rates",
    "outer2_max_secondary",
    "strong_mpr_rates",
    "ra_region_curves",
    "inner_bound_curve",
    "outer_bound_curve",
    "strong_mpr_curve",
    "max_primary_rate",
    "TdmaPolicy",
    "TdmaSplit",
    "tdma_rates",
    "tdma_optimal_split",
    "tdma_region_boundary",
    "tdma_max_secondary",
    "tdma_max_primary",
    "tdma_curve",
    "SpecialCaseRates",
    "AdmissionChoice",
    "SelectionOptimum",
    "admission_gain",
    "priority_rates",
    "selection_rates",
    "optimal_admission",
    "priority_region_boundary",
    "priority_boundary_slope",
    "priority_max_primary",
    "combined_primary_constraint",
    "selection_alpha_star",
    "selection_alpha_slope",
    "alpha_monotonicity_check",
    "selection_optimal",
    "priority_region_curve",
    "selection_region_curve",
    "OptProblem",
    "OptResult",
    "multistart_solve",
    "ra_secondary_problem",
    "grid_refine",
    "SimConfig",
    "SimReport",
    "SlotOutcome",
    "QUEUES",
    "VARIANTS",
    "run",
    "estimate_rates",
    "stability_probe",
    "slot_step",
    "analytic_rates",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "build_policy",
    "links_at_rate",
    "rate_grid",
]

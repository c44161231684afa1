"""Scenario files: one YAML document bundling links, traffic and run options.

Sections: `links` (exactly one of an explicit `outage` table or `phy`
parameters), `system` (variant, arrival rates, storage rule), `policy`
(admission fractions plus per-family MAC weights), `sweep` (grids), `sim`
and `optimizer`. Unknown keys anywhere are hard errors naming the dotted
path, so a typo in a probability name cannot silently become a default.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import yaml

from .errors import ConfigError
from .phy import INTERFERED_KEYS, LINK_KEYS, LinkProbabilities, PhyParams
from .ra import RaPolicy
from .sim import VARIANTS
from .tdma import TdmaPolicy

_TOP_KEYS = ("links", "system", "policy", "sweep", "sim", "optimizer")
_SYSTEM_KEYS = ("variant", "lambda_p", "lambda_s", "keep_priority")
_PHY_KEYS = ("snr_sigma2", "spectral_rate", "sensing_fraction")
_SWEEP_KEYS = ("grid_step", "rate_min", "rate_max", "rate_step")
_SIM_KEYS = ("horizon", "warmup", "replicas", "seed", "sample_every", "queue_cap")
_OPTIMIZER_KEYS = ("restarts", "seed")

# MAC weights are grouped by access family so one scenario can drive several
# variants; admission fractions are shared because every variant uses them.
_POLICY_SHARED = ("f_s", "f_sd")
_POLICY_GROUPS = {
    "ra": ("alpha_s", "alpha_sp", "alpha_sd"),
    "tdma": ("omega", "alpha"),
    "selection": ("alpha_s",),
}
_GROUP_OF_VARIANT = {
    "ra": "ra",
    "dominant1": "ra",
    "dominant2": "ra",
    "strong_mpr": "ra",
    "tdma": "tdma",
    "selection": "selection",
    "priority": None,  # fixed service order, no weights
}

_REQUIRED = object()


@dataclass(frozen=True)
class Scenario:
    """Validated contents of one scenario document."""

    links: LinkProbabilities
    phy: PhyParams | None  # kept only in phy mode, for rate sweeps
    variant: str | None
    lam_p: float | None
    lam_s: float
    keep_priority: int
    f_s: float
    f_sd: float
    policy_groups: dict  # family -> {weight name: value}
    grid_step: float
    rate_min: float
    rate_max: float
    rate_step: float
    sim_options: dict
    optimizer_options: dict
    source: str = "<dict>"


def _mapping(value, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section '{path}' must be a mapping")
    return value


def _reject_unknown(section: dict, allowed, path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}.{key}' in scenario")


def _number(section: dict, key: str, path: str, default=_REQUIRED, lo=None, hi=None) -> float:
    if key not in section or section[key] is None:
        if default is _REQUIRED:
            raise ConfigError(f"scenario is missing required key '{path}.{key}'")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key '{path}.{key}' must be a number, got {value!r}")
    value = float(value)
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(f"key '{path}.{key}' must lie in [{lo}, {hi}], got {value}")
    return value


def _integer(section: dict, key: str, path: str, default: int, lo: int) -> int:
    if key not in section or section[key] is None:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"key '{path}.{key}' must be an integer, got {value!r}")
    if value < lo:
        raise ConfigError(f"key '{path}.{key}' must be >= {lo}, got {value}")
    return value


def _parse_links(section: dict) -> tuple:
    _reject_unknown(section, ("outage", "phy"), "links")
    has_outage = "outage" in section and section["outage"] is not None
    has_phy = "phy" in section and section["phy"] is not None
    if has_outage == has_phy:
        raise ConfigError("section 'links' needs exactly one of 'outage' or 'phy'")
    if has_outage:
        outage = _mapping(section["outage"], "links.outage")
        wanted = LINK_KEYS + INTERFERED_KEYS
        _reject_unknown(outage, wanted, "links.outage")
        table = {k: _number(outage, k, "links.outage", lo=0.0, hi=1.0) for k in wanted}
        return LinkProbabilities.from_outage(table), None
    phy_section = _mapping(section["phy"], "links.phy")
    _reject_unknown(phy_section, _PHY_KEYS, "links.phy")
    products = _mapping(phy_section.get("snr_sigma2"), "links.phy.snr_sigma2")
    _reject_unknown(products, LINK_KEYS, "links.phy.snr_sigma2")
    table = {k: _number(products, k, "links.phy.snr_sigma2", lo=0.0) for k in LINK_KEYS}
    spectral_rate = _number(phy_section, "spectral_rate", "links.phy", lo=1e-12)
    sensing = _number(phy_section, "sensing_fraction", "links.phy", default=0.0, lo=0.0, hi=1.0 - 1e-12)
    phy = PhyParams.from_snr_products(table, spectral_rate, sensing)
    return LinkProbabilities.from_phy(phy), phy


def parse_scenario(doc: dict, source: str = "<dict>") -> Scenario:
    """Validate a parsed document and build the Scenario bundle."""
    doc = _mapping(doc, "scenario")
    _reject_unknown(doc, _TOP_KEYS, "scenario")
    if "links" not in doc:
        raise ConfigError("scenario is missing required section 'links'")
    links, phy = _parse_links(_mapping(doc["links"], "links"))

    system = _mapping(doc.get("system"), "system")
    _reject_unknown(system, _SYSTEM_KEYS, "system")
    variant = system.get("variant")
    if variant is not None and variant not in VARIANTS:
        raise ConfigError(f"key 'system.variant' must be one of {VARIANTS}, got {variant!r}")
    lam_p = _number(system, "lambda_p", "system", default=None, lo=0.0, hi=1.0)
    lam_s = _number(system, "lambda_s", "system", default=0.0, lo=0.0, hi=1.0)
    keep = _integer(system, "keep_priority", "system", default=1, lo=0)
    if keep not in (0, 1):
        raise ConfigError(f"key 'system.keep_priority' must be 0 or 1, got {keep}")

    policy = _mapping(doc.get("policy"), "policy")
    _reject_unknown(policy, _POLICY_SHARED + tuple(_POLICY_GROUPS), "policy")
    f_s = _number(policy, "f_s", "policy", default=1.0, lo=0.0, hi=1.0)
    f_sd = _number(policy, "f_sd", "policy", default=1.0, lo=0.0, hi=1.0)
    groups = {}
    for family, keys in _POLICY_GROUPS.items():
        sub = _mapping(policy.get(family), f"policy.{family}")
        _reject_unknown(sub, keys, f"policy.{family}")
        groups[family] = {
            k: _number(sub, k, f"policy.{family}", lo=0.0, hi=1.0) for k in keys if k in sub
        }

    sweep = _mapping(doc.get("sweep"), "sweep")
    _reject_unknown(sweep, _SWEEP_KEYS, "sweep")
    grid_step = _number(sweep, "grid_step", "sweep", default=0.01, lo=1e-6, hi=1.0)
    rate_min = _number(sweep, "rate_min", "sweep", default=0.5, lo=1e-12)
    rate_max = _number(sweep, "rate_max", "sweep", default=4.0, lo=rate_min)
    rate_step = _number(sweep, "rate_step", "sweep", default=0.25, lo=1e-12)

    sim = _mapping(doc.get("sim"), "sim")
    _reject_unknown(sim, _SIM_KEYS, "sim")
    sim_options = {
        "horizon": _integer(sim, "horizon", "sim", default=1_000_000, lo=1),
        "warmup": _integer(sim, "warmup", "sim", default=100_000, lo=0),
        "replicas": _integer(sim, "replicas", "sim", default=8, lo=1),
        "seed": _integer(sim, "seed", "sim", default=0, lo=0),
        "sample_every": _integer(sim, "sample_every", "sim", default=1_000, lo=1),
        "queue_cap": _integer(sim, "queue_cap", "sim", default=10_000, lo=1),
    }

    optimizer = _mapping(doc.get("optimizer"), "optimizer")
    _reject_unknown(optimizer, _OPTIMIZER_KEYS, "optimizer")
    optimizer_options = {
        "restarts": _integer(optimizer, "restarts", "optimizer", default=500, lo=1),
        "seed": _integer(optimizer, "seed", "optimizer", default=0, lo=0),
    }

    return Scenario(
        links=links,
        phy=phy,
        variant=variant,
        lam_p=lam_p,
        lam_s=lam_s,
        keep_priority=keep,
        f_s=f_s,
        f_sd=f_sd,
        policy_groups=groups,
        grid_step=grid_step,
        rate_min=rate_min,
        rate_max=rate_max,
        rate_step=rate_step,
        sim_options=sim_options,
        optimizer_options=optimizer_options,
        source=source,
    )


def load_scenario(path: str) -> Scenario:
    """Read and validate a scenario file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"scenario {path} is not valid YAML: {exc}") from exc
    return parse_scenario(doc, source=str(path))


def build_policy(scenario: Scenario, variant: str):
    """Assemble the policy object a variant needs from the policy section.

    Variants without SR relaying get f_sd = 0 regardless of the shared
    setting, since their MAC never grants the SR a transmission.
    """
    if variant not in _GROUP_OF_VARIANT:
        raise ConfigError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    family = _GROUP_OF_VARIANT[variant]
    values = dict(scenario.policy_groups.get(family, {})) if family else {}
    if family is not None:
        missing = [k for k in _POLICY_GROUPS[family] if k not in values]
        if missing:
            raise ConfigError(
                f"variant {variant!r} needs policy.{family} settings {missing} in {scenario.source}"
            )
    if variant == "tdma":
        return TdmaPolicy(
            omega=values["omega"],
            alpha=values["alpha"],
            f_s=scenario.f_s,
            f_sd=scenario.f_sd,
            keep_priority=scenario.keep_priority,
        )
    if variant == "priority":
        return RaPolicy(0.0, 0.0, 0.0, scenario.f_s, 0.0, scenario.keep_priority)
    if variant == "selection":
        alpha_s = values["alpha_s"]
        return RaPolicy(alpha_s, 1.0 - alpha_s, 0.0, scenario.f_s, 0.0, scenario.keep_priority)
    return RaPolicy(
        values["alpha_s"],
        values["alpha_sp"],
        values["alpha_sd"],
        scenario.f_s,
        scenario.f_sd,
        scenario.keep_priority,
    )


def links_at_rate(scenario: Scenario, spectral_rate: float) -> LinkProbabilities:
    """Rebuild the link table at another spectral rate (phy mode only)."""
    if scenario.phy is None:
        raise ConfigError(
            "rate sweep needs physical-layer parameters; this scenario pins the link table explicitly"
        )
    return LinkProbabilities.from_phy(replace(scenario.phy, packet_bits=float(spectral_rate)))


def rate_grid(scenario: Scenario, rate_step: float | None = None) -> np.ndarray:
    """Ascending inclusive spectral-rate grid from the sweep section."""
    step = scenario.rate_step if rate_step is None else float(rate_step)
    if step <= 0.0:
        raise ConfigError(f"rate step must be positive, got {step}")
    count = int(round((scenario.rate_max - scenario.rate_min) / step))
    grid = scenario.rate_min + np.arange(count + 1) * step
    grid = np.round(grid[grid <= scenario.rate_max + 1e-9], 12)
    return grid

"""Rayleigh block-fading link layer.

Maps node powers, noise levels, channel variances and the transmission rate to
per-slot success probabilities for every link the MAC layer cares about, both
with and without a concurrent interfering secondary transmission.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ParameterError

# Probability comparisons (range checks, interfered-vs-direct ordering) use this.
PROB_TOL = 1e-12

# Transmitters, receivers and the directed links with a decoding constraint.
TRANSMITTERS = ("p", "s", "sd")
RECEIVERS = ("pd", "s", "sd")
LINKS = (("p", "pd"), ("p", "s"), ("p", "sd"), ("s", "sd"), ("s", "pd"), ("sd", "pd"))

# Canonical field/key order shared with the numeric kernels.
LINK_KEYS = ("p_pd", "p_s", "p_sd", "s_sd", "s_pd", "sd_pd")
INTERFERED_KEYS = ("s_pd_vs_sd", "sd_pd_vs_s")


def decoding_threshold(bits: float, tx_time: float, bandwidth: float) -> float:
    """SNR a receiver needs to decode `bits` within `tx_time` over `bandwidth`."""
    if bits <= 0.0 or tx_time <= 0.0 or bandwidth <= 0.0:
        raise ParameterError(f"bits, tx_time and bandwidth must be positive, got {(bits, tx_time, bandwidth)}")
    return 2.0 ** (bits / (tx_time * bandwidth)) - 1.0


def tx_time(node: str, slot_duration: float, sensing_time: float) -> float:
    """Transmission time available to `node` in one slot.

    The primary owns the full slot; secondary nodes ("s", "sd") lose the
    sensing window at the head of the slot.
    """
    if slot_duration <= 0.0:
        raise ParameterError(f"slot_duration must be positive, got {slot_duration}")
    if not 0.0 <= sensing_time < slot_duration:
        raise ParameterError(f"sensing_time must lie in [0, slot_duration), got {sensing_time}")
    if node == "p":
        return slot_duration
    if node in ("s", "sd"):
        return slot_duration - sensing_time
    raise ParameterError(f"unknown node {node!r}")


def outage_prob(tx_power: float, noise_power: float, channel_variance: float, threshold: float) -> float:
    """Probability that a single Rayleigh-faded link fails to meet `threshold`."""
    if tx_power <= 0.0 or noise_power <= 0.0 or channel_variance <= 0.0:
        raise ParameterError("tx_power, noise_power and channel_variance must be positive")
    if threshold < 0.0:
        raise ParameterError(f"threshold must be nonnegative, got {threshold}")
    return 1.0 - math.exp(-threshold * noise_power / (channel_variance * tx_power))


def interfered_success_prob(
    tx_power: float,
    interferer_power: float,
    channel_variance: float,
    interferer_variance: float,
    noise_power: float,
    threshold: float,
) -> float:
    """Success probability of a link under one concurrent Rayleigh interferer.

    Equals the interference-free success shrunk by the mean power ratio of the
    interfering and intended links at the receiver, so it can never exceed the
    direct success probability.
    """
    direct = 1.0 - outage_prob(tx_power, noise_power, channel_variance, threshold)
    if interferer_power <= 0.0 or interferer_variance <= 0.0:
        raise ParameterError("interferer power and variance must be positive")
    ratio = (interferer_power * interferer_variance) / (tx_power * channel_variance)
    return direct / (1.0 + threshold * ratio)


@dataclass(frozen=True)
class PhyParams:
    """Physical-layer inputs from which all link probabilities follow."""

    tx_power: dict  # node -> transmit power, nodes "p", "s", "sd"
    noise_power: dict  # receiver -> noise power, receivers "pd", "s", "sd"
    channel_variance: dict  # (tx, rx) -> Rayleigh variance for the six links
    packet_bits: float  # payload per packet
    slot_duration: float  # slot length T
    sensing_time: float  # head-of-slot sensing window tau, tau < T
    bandwidth: float  # channel bandwidth W

    def __post_init__(self) -> None:
        for node in TRANSMITTERS:
            if node not in self.tx_power:
                raise ParameterError(f"tx_power missing node {node!r}")
        for node in RECEIVERS:
            if node not in self.noise_power:
                raise ParameterError(f"noise_power missing receiver {node!r}")
        for link in LINKS:
            if link not in self.channel_variance:
                raise ParameterError(f"channel_variance missing link {link!r}")
        # Range checks happen lazily in the formulas; the slot split is checked here.
        tx_time("s", self.slot_duration, self.sensing_time)

    @classmethod
    def from_snr_products(
        cls, snr_variance: dict, spectral_rate: float, sensing_fraction: float
    ) -> "PhyParams":
        """Build from per-link products (mean SNR x variance) and a spectral rate.

        Uses unit powers, unit noise and a unit slot, so the product is carried
        entirely by the channel variance and `spectral_rate` equals the packet
        bits. `sensing_fraction` is tau/T.
        """
        if spectral_rate <= 0.0:
            raise ParameterError(f"spectral_rate must be positive, got {spectral_rate}")
        variances = {}
        for link in LINKS:
            key = f"{link[0]}_{link[1]}"
            if key not in snr_variance:
                raise ParameterError(f"snr_variance missing link {key!r}")
            variances[link] = float(snr_variance[key])
        extra = set(snr_variance) - {f"{a}_{b}" for a, b in LINKS}
        if extra:
            raise ParameterError(f"snr_variance has unknown links {sorted(extra)}")
        return cls(
            tx_power={n: 1.0 for n in TRANSMITTERS},
            noise_power={n: 1.0 for n in RECEIVERS},
            channel_variance=variances,
            packet_bits=float(spectral_rate),
            slot_duration=1.0,
            sensing_time=float(sensing_fraction),
            bandwidth=1.0,
        )


@dataclass(frozen=True)
class LinkProbabilities:
    """Per-slot success probabilities for every link the MAC uses.

    All fields are success (not outage) probabilities. The `*_vs_*` entries are
    the successes under a concurrent transmission from the other secondary node.
    """

    p_pd: float  # primary -> its own receiver
    p_s: float  # primary overheard by the secondary transmitter
    p_sd: float  # primary overheard by the secondary receiver
    s_sd: float  # secondary own data link
    s_pd: float  # secondary transmitter relaying to the primary receiver
    sd_pd: float  # secondary receiver relaying to the primary receiver
    s_pd_vs_sd: float  # s -> pd while sd also transmits
    sd_pd_vs_s: float  # sd -> pd while s also transmits

    def __post_init__(self) -> None:
        for key in LINK_KEYS + INTERFERED_KEYS:
            value = getattr(self, key)
            if not -PROB_TOL <= value <= 1.0 + PROB_TOL:
                raise ParameterError(f"{key} must be a probability, got {value}")
        if self.s_pd_vs_sd > self.s_pd + PROB_TOL:
            raise ConsistencyError(
                f"interfered success s_pd_vs_sd={self.s_pd_vs_sd} exceeds direct s_pd={self.s_pd}"
            )
        if self.sd_pd_vs_s > self.sd_pd + PROB_TOL:
            raise ConsistencyError(
                f"interfered success sd_pd_vs_s={self.sd_pd_vs_s} exceeds direct sd_pd={self.sd_pd}"
            )

    @classmethod
    def from_outage(cls, outage: dict) -> "LinkProbabilities":
        """Build from a table of outage probabilities (keys as in LINK_KEYS)."""
        wanted = LINK_KEYS + INTERFERED_KEYS
        missing = [k for k in wanted if k not in outage]
        if missing:
            raise ParameterError(f"outage table missing entries {missing}")
        extra = set(outage) - set(wanted)
        if extra:
            raise ParameterError(f"outage table has unknown entries {sorted(extra)}")
        return cls(**{k: 1.0 - float(outage[k]) for k in wanted})

    @classmethod
    def from_phy(cls, params: PhyParams) -> "LinkProbabilities":
        """Evaluate thresholds and fading integrals for a PhyParams bundle."""
        values = {}
        for tx, rx in LINKS:
            time = tx_time(tx, params.slot_duration, params.sensing_time)
            gamma = decoding_threshold(params.packet_bits, time, params.bandwidth)
            values[f"{tx}_{rx}"] = 1.0 - outage_prob(
                params.tx_power[tx], params.noise_power[rx], params.channel_variance[(tx, rx)], gamma
            )
        time_s = tx_time("s", params.slot_duration, params.sensing_time)
        gamma_s = decoding_threshold(params.packet_bits, time_s, params.bandwidth)
        values["s_pd_vs_sd"] = interfered_success_prob(
            params.tx_power["s"],
            params.tx_power["sd"],
            params.channel_variance[("s", "pd")],
            params.channel_variance[("sd", "pd")],
            params.noise_power["pd"],
            gamma_s,
        )
        values["sd_pd_vs_s"] = interfered_success_prob(
            params.tx_power["sd"],
            params.tx_power["s"],
            params.channel_variance[("sd", "pd")],
            params.channel_variance[("s", "pd")],
            params.noise_power["pd"],
            gamma_s,
        )
        return cls(**values)

    def as_array(self) -> np.ndarray:
        """Fixed-order vector handed to the numeric kernels."""
        return np.array(
            [getattr(self, k) for k in LINK_KEYS + INTERFERED_KEYS], dtype=np.float64
        )

    def is_strong_mpr(self, tol: float = PROB_TOL) -> bool:
        """True when interference never degrades the relaying links."""
        return (
            abs(self.s_pd_vs_sd - self.s_pd) <= tol
            and abs(self.sd_pd_vs_s - self.sd_pd) <= tol
        )


def build_link_probabilities(
    outage: dict | None = None, phy: PhyParams | None = None
) -> LinkProbabilities:
    """Build the link table from exactly one of the two supported inputs."""
    if (outage is None) == (phy is None):
        raise ParameterError("provide exactly one of outage= or phy=")
    if outage is not None:
        return LinkProbabilities.from_outage(outage)
    return LinkProbabilities.from_phy(phy)

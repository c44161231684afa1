"""Shared tables and generators for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from cogrelay import LinkProbabilities, build_link_probabilities

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = REPO_ROOT / "scenarios"

# Reference weak-MPR table (outage form): the direct primary link never
# succeeds, relays are good, and concurrent transmissions cost a factor 2.5.
WEAK_OUTAGE = {
    "p_pd": 1.0,
    "p_s": 0.3,
    "p_sd": 0.3,
    "s_sd": 0.1,
    "s_pd": 0.2,
    "sd_pd": 0.2,
    "s_pd_vs_sd": 0.68,
    "sd_pd_vs_s": 0.68,
}

# Same table with interference-proof relaying links.
STRONG_OUTAGE = dict(WEAK_OUTAGE, s_pd_vs_sd=0.2, sd_pd_vs_s=0.2)


@pytest.fixture(scope="session")
def weak_links() -> LinkProbabilities:
    return build_link_probabilities(outage=WEAK_OUTAGE)


@pytest.fixture(scope="session")
def strong_links() -> LinkProbabilities:
    return build_link_probabilities(outage=STRONG_OUTAGE)


def random_links(rng: np.random.Generator, strong: bool = False) -> LinkProbabilities:
    """A valid random success table; interfered entries never beat direct ones."""
    direct = rng.uniform(0.05, 0.95, size=6)
    shrink = np.ones(2) if strong else rng.uniform(0.2, 1.0, size=2)
    return LinkProbabilities(
        p_pd=direct[0],
        p_s=direct[1],
        p_sd=direct[2],
        s_sd=direct[3],
        s_pd=direct[4],
        sd_pd=direct[5],
        s_pd_vs_sd=direct[4] * shrink[0],
        sd_pd_vs_s=direct[5] * shrink[1],
    )

"""Late-arrival discrete-time queue primitives.

Departures are taken from the start-of-slot backlog before the slot's arrivals
are appended, and a queue is stable when its arrival rate is strictly below
its service rate.
"""

from __future__ import annotations

from .errors import InfeasibleRateError, ParameterError


def evolve(length: int, departures: int, arrivals: int) -> int:
    """One-slot queue update: serve from the current backlog, then admit."""
    if length < 0 or departures < 0 or arrivals < 0:
        raise ParameterError(f"queue counts must be nonnegative, got {(length, departures, arrivals)}")
    return max(length - departures, 0) + arrivals

def loynes_stable(arrival_rate: float, service_rate: float, margin: float = 0.0) -> bool:
    """Strict stability test; a rate exactly on the boundary counts as unstable."""
    if arrival_rate < 0.0 or service_rate < 0.0 or margin < 0.0:
        raise ParameterError("rates and margin must be nonnegative")
    return arrival_rate < service_rate - margin


def empty_probability(arrival_rate: float, service_rate: float) -> float:
    """Stationary probability that the queue is empty, 1 - lambda/mu.

    Saturated or unstable queues report 0. A queue that is never served is
    empty forever when it also receives nothing, and impossible to drive
    otherwise.
    """
    if arrival_rate < 0.0 or service_rate < 0.0:
        raise ParameterError("rates must be nonnegative")
    if service_rate == 0.0:
        if arrival_rate == 0.0:
            return 1.0
        raise InfeasibleRateError(f"arrival rate {arrival_rate} offered to a queue with zero service rate")
    if arrival_rate >= service_rate:
        return 0.0
    return 1.0 - arrival_rate / service_rate


def occupancy(arrival_rate: float, service_rate: float) -> float:
    """Stationary probability that the queue is nonempty, clamped to [0, 1]."""
    return 1.0 - empty_probability(arrival_rate, service_rate)

"""Repetition rate, measurement time and locality timing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import DegenerateInputError, DomainError
from .quantum_state import check_probability

SPEED_OF_LIGHT = 299_792_458.0  # m/s
SECONDS_PER_DAY = 86_400.0


@dataclass(frozen=True)
class CycleModel:
    """One preparation/excitation attempt, SI units.

    ``cooling_amortized`` is the cooling time spread over the attempts that
    share it (200 us every 20 cycles -> 10 us).
    """

    prep_time: float = 5e-6
    cooling_amortized: float = 10e-6
    fiber_length: float = 200.0
    fiber_speed_fraction: float = 2.0 / 3.0
    occupancy_1: float = 0.5
    occupancy_2: float = 0.5

    def __post_init__(self):
        for name in ("prep_time", "cooling_amortized", "fiber_length"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name}={getattr(self, name)!r} must be >= 0")
        if not self.fiber_speed_fraction > 0:
            raise DomainError(f"fiber_speed_fraction={self.fiber_speed_fraction!r} must be > 0")
        check_probability(self.occupancy_1, "occupancy_1")
        check_probability(self.occupancy_2, "occupancy_2")


@dataclass(frozen=True)
class DetectionTimeline:
    """Durations (seconds) of the steps in one atomic state measurement."""

    basis_choice: float = 100e-9
    stirap: float = 120e-9
    decoherence_or_ionization: float = 200e-9
    fragment_flight: float = 500e-9

    def __post_init__(self):
        for name in ("basis_choice", "stirap", "decoherence_or_ionization", "fragment_flight"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name}={getattr(self, name)!r} must be >= 0")

    @property
    def total(self) -> float:
        return self.basis_choice + self.stirap + self.decoherence_or_ionization + self.fragment_flight


@dataclass(frozen=True)
class RunPlan:
    herald_probability: float
    events_needed: int
    second_bell_state: bool = False

    def __post_init__(self):
        if not 0 < self.herald_probability <= 1:
            raise DomainError(f"herald_probability={self.herald_probability!r} must lie in (0, 1]")
        if self.events_needed < 1:
            raise DomainError(f"events_needed={self.events_needed!r} must be >= 1")


class MeasurementTime(NamedTuple):
    seconds: float
    days: float


def amortized_cooling(cooling_time: float, cycles_per_cooling: int) -> float:
    return cooling_time / cycles_per_cooling


def cycle_time(model: CycleModel) -> float:
    """Preparation + cooling share + fibre round trip for the herald signal."""
    round_trip = 2.0 * model.fiber_length / (model.fiber_speed_fraction * SPEED_OF_LIGHT)
    return model.prep_time + model.cooling_amortized + round_trip


def repetition_rate(model: CycleModel) -> float:
    t = cycle_time(model)
    if t <= 0:
        raise DegenerateInputError("cycle time is zero")
    return 1.0 / t


def effective_rate(model: CycleModel) -> float:
    """Attempts per second with both traps loaded."""
    return repetition_rate(model) * model.occupancy_1 * model.occupancy_2


def measurement_time(plan: RunPlan, rate: float) -> MeasurementTime:
    if not rate > 0:
        raise DegenerateInputError(f"rate={rate!r} must be positive")
    seconds = plan.events_needed / (rate * plan.herald_probability)
    if plan.second_bell_state:
        seconds /= 2.0
    return MeasurementTime(seconds, seconds / SECONDS_PER_DAY)


def locality_margin(timeline: DetectionTimeline, distance: float) -> float:
    """Light travel time between stations minus measurement duration.

    Positive means each measurement ends before a vacuum light signal from
    the other station could arrive.
    """
    if not distance > 0:
        raise DomainError(f"distance={distance!r} must be > 0")
    return distance / SPEED_OF_LIGHT - timeline.total

"""
Event-level simulation of the heralded Bell test.

Every heralded event is sampled individually: first whether the herald was
caused by a dark count (then the atoms are in the fully mixed state), then
the four-outcome readout from the detection model's joint distribution.

Random streams come from :class:`numpy.random.SeedSequence`. Each replica
spawns one child per CHSH setting, so a setting block can be run on any
worker and the result does not depend on how many workers are used.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .chsh import DEFAULT_SETTINGS, ChshSettings, SettingCounts, chsh_combination, correlator
from .detection import DetectionModel, joint_distribution
from .errors import AllocationError
from .quantum_state import AnalysisSetting, WernerState


@dataclass(frozen=True)
class SimulationPlan:
    """Inputs of one simulated run.

    When ``dark_fraction`` is non-zero, ``state`` must be the state after a
    *true* herald; dark heralds are mixed in by the simulation itself.
    """

    seed: int
    n_events: int
    state: WernerState
    detection: DetectionModel
    settings: ChshSettings = DEFAULT_SETTINGS
    dark_fraction: float = 0.0
    allocation: tuple[int, int, int, int] | None = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed={self.seed!r} must be an unsigned 64-bit integer")
        if not 0.0 <= self.dark_fraction <= 1.0:
            raise ValueError(f"dark_fraction={self.dark_fraction!r} out of range")
        if self.allocation is None:
            if self.n_events <= 0 or self.n_events % 4:
                raise AllocationError(f"n_events={self.n_events} must be a positive multiple of 4")
        else:
            if len(self.allocation) != 4 or any(n < 0 for n in self.allocation):
                raise AllocationError(f"bad allocation {self.allocation!r}")
            if sum(self.allocation) != self.n_events:
                raise AllocationError(f"allocation {self.allocation!r} does not sum to n_events={self.n_events}")

    @property
    def per_setting(self) -> tuple[int, int, int, int]:
        if self.allocation is not None:
            return tuple(self.allocation)
        n = self.n_events // 4
        return (n, n, n, n)


@dataclass(frozen=True)
class SimulationReport:
    counts: tuple[SettingCounts, ...]
    s_empirical: float
    # plug-in standard error of S; multinomial per setting, settings independent
    delta_s_empirical: float
    dark_fraction_empirical: float | None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class ReplicaSummary:
    n_replicas: int
    n_events: int
    s_mean: float
    s_std: float
    s_values: list[float] = field(repr=False)
    dark_fraction_mean: float | None = None

    @property
    def s_std_error(self) -> float:
        """Standard error of ``s_mean``."""
        return self.s_std / math.sqrt(self.n_replicas)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _sample_setting(
    ss: np.random.SeedSequence,
    n: int,
    true_probs: np.ndarray,
    dark_probs: np.ndarray,
    dark_fraction: float,
) -> tuple[np.ndarray, int]:
    rng = np.random.Generator(np.random.PCG64(ss))
    dark = rng.random(n) < dark_fraction
    u = rng.random(n)
    true_cdf = np.cumsum(true_probs)
    dark_cdf = np.cumsum(dark_probs)
    outcome = np.where(
        dark,
        np.searchsorted(dark_cdf[:-1], u, side="right"),
        np.searchsorted(true_cdf[:-1], u, side="right"),
    )
    return np.bincount(outcome, minlength=4), int(dark.sum())


def _setting_probabilities(plan: SimulationPlan, pair: AnalysisSetting) -> tuple[np.ndarray, np.ndarray]:
    true_probs = joint_distribution(plan.state, plan.detection, pair).as_array()
    mixed = WernerState(0.0, plan.state.bell_state)
    dark_probs = joint_distribution(mixed, plan.detection, pair).as_array()
    return true_probs, dark_probs


def _empirical_delta_s(counts: Sequence[SettingCounts]) -> float:
    variance = 0.0
    for c in counts:
        if c.n_s == 0:
            return math.nan
        same = (c.n_uu + c.n_dd) / c.n_s
        variance += 4.0 * same * (1.0 - same) / c.n_s
    return math.sqrt(variance)


def _run(plan: SimulationPlan, root: np.random.SeedSequence, pool: ThreadPoolExecutor | None) -> SimulationReport:
    children = root.spawn(4)
    jobs = []
    for child, pair, n in zip(children, plan.settings.pairs(), plan.per_setting):
        true_probs, dark_probs = _setting_probabilities(plan, pair)
        jobs.append((child, n, true_probs, dark_probs, plan.dark_fraction))
    if pool is None:
        results = [_sample_setting(*job) for job in jobs]
    else:
        results = list(pool.map(lambda job: _sample_setting(*job), jobs))

    counts = tuple(SettingCounts(*(int(x) for x in bins)) for bins, _ in results)
    n_dark = sum(d for _, d in results)
    s = chsh_combination([correlator(c) if c.n_s else 0.0 for c in counts])
    dark_fraction = n_dark / plan.n_events if plan.dark_fraction > 0 else None
    return SimulationReport(counts, s, _empirical_delta_s(counts), dark_fraction)


def simulate(plan: SimulationPlan, workers: int = 1) -> SimulationReport:
    """Simulate ``plan.n_events`` heralded events; deterministic in ``plan.seed``."""
    root = np.random.SeedSequence(plan.seed)
    if workers <= 1:
        return _run(plan, root, None)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return _run(plan, root, pool)


def replicate(plan: SimulationPlan, n_replicas: int, workers: int = 1) -> ReplicaSummary:
    """Repeat ``plan`` with independent streams spawned from ``plan.seed``."""
    if n_replicas < 2:
        raise ValueError("need at least two replicas for a scatter estimate")
    roots = np.random.SeedSequence(plan.seed).spawn(n_replicas)
    if workers <= 1:
        reports = [_run(plan, root, None) for root in roots]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda root: _run(plan, root, None), roots))

    s_values = np.array([r.s_empirical for r in reports])
    dark = None
    if plan.dark_fraction > 0:
        dark = float(np.mean([r.dark_fraction_empirical for r in reports]))
    return ReplicaSummary(
        n_replicas=n_replicas,
        n_events=plan.n_events,
        s_mean=float(s_values.mean()),
        s_std=float(s_values.std(ddof=1)),
        s_values=s_values.tolist(),
        dark_fraction_mean=dark,
    )

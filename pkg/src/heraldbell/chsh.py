"""
CHSH parameter, its statistical uncertainty, and the number of events needed
for a k-sigma violation.

Settings are always ordered ``(a, b), (a', b), (a, b'), (a', b')`` and

    S = |E1 + E2| + |E3 - E4|

evaluated as written, so it is valid in every parameter regime.

Two count deviations are available. ``"squared"`` uses
``dN = sqrt(N_s) * sqrt(p**2 (1 - p))``, which is what the quoted event
numbers are based on. ``"binomial"`` uses the textbook ``sqrt(N_s p (1 - p))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .detection import DetectionModel, IonizationModel, contrast_reduction, effective_p_d, joint_distribution
from .errors import AllocationError, DegenerateInputError, NoViolationError, ValidityDomainError
from .quantum_state import AnalysisSetting, JointDistribution, WernerState, check_probability

SQRT2 = math.sqrt(2.0)
TSIRELSON_BOUND = 2.0 * SQRT2
LOCAL_BOUND = 2.0

SQUARED_DEVIATION = "squared"
BINOMIAL_DEVIATION = "binomial"

#: Commonly stated lower bound on ``p_d`` for the ionization closed form. The closed
#: form's actual region is checked separately in :func:`s_ionization_closed`.
IONIZATION_STATED_THRESHOLD = 1.0 / (1.0 + 2.0**0.25)


@dataclass(frozen=True)
class ChshSettings:
    alpha: float = 0.0
    alpha_prime: float = 45.0
    beta: float = 22.5
    beta_prime: float = -22.5

    def __post_init__(self):
        directions = {self.alpha % 180.0, self.alpha_prime % 180.0, self.beta % 180.0, self.beta_prime % 180.0}
        if len(directions) != 4:
            raise ValueError(f"CHSH needs four distinct analysis directions, got {self}")

    def pairs(self) -> tuple[AnalysisSetting, ...]:
        return (
            AnalysisSetting(self.alpha, self.beta),
            AnalysisSetting(self.alpha_prime, self.beta),
            AnalysisSetting(self.alpha, self.beta_prime),
            AnalysisSetting(self.alpha_prime, self.beta_prime),
        )


DEFAULT_SETTINGS = ChshSettings()


@dataclass(frozen=True)
class SettingCounts:
    n_uu: int
    n_ud: int
    n_du: int
    n_dd: int

    def __post_init__(self):
        for name in ("n_uu", "n_ud", "n_du", "n_dd"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name}={value!r} must be a non-negative integer")
            object.__setattr__(self, name, int(value))

    @property
    def n_s(self) -> int:
        return self.n_uu + self.n_ud + self.n_du + self.n_dd


@dataclass(frozen=True)
class SignificanceQuery:
    k: float
    detection: DetectionModel
    state: WernerState
    settings: ChshSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k={self.k!r} must be positive")


def correlator(counts: SettingCounts) -> float:
    """Measured expectation value ``2 (N_uu + N_dd) / N_s - 1``."""
    if counts.n_s == 0:
        raise DegenerateInputError("no events recorded for this setting")
    return 2.0 * (counts.n_uu + counts.n_dd) / counts.n_s - 1.0


def chsh_combination(correlations: Sequence[float]) -> float:
    e1, e2, e3, e4 = correlations
    return abs(e1 + e2) + abs(e3 - e4)


def chsh_distributions(
    state: WernerState, detection: DetectionModel, settings: ChshSettings = DEFAULT_SETTINGS
) -> list[JointDistribution]:
    return [joint_distribution(state, detection, pair) for pair in settings.pairs()]


def s_from_distributions(dists: Sequence[JointDistribution]) -> float:
    if len(dists) != 4:
        raise ValueError(f"need one distribution per CHSH setting, got {len(dists)}")
    return chsh_combination([d.correlation for d in dists])


def s_fluorescence_closed(v: float, a_det: float) -> float:
    """S for fluorescence readout at the standard settings."""
    v = check_probability(v, "visibility")
    a_det = check_probability(a_det, "a_det")
    return TSIRELSON_BOUND * v * contrast_reduction(a_det)


def ionization_closed_form_valid(v: float, a_st: float, p_d: float) -> bool:
    """True where the first CHSH term keeps a fixed sign and the closed form holds.

    That is ``sqrt(2) p_d**2 V (2 a_ST - 1)**2 >= 2 (1 - p_d)**2``. For
    ``V (2 a_ST - 1)**2 = 1`` it reduces to ``p_d >= 2**0.25 / (1 + 2**0.25)``.
    """
    observable = v * contrast_reduction(a_st)
    return SQRT2 * p_d * p_d * observable >= 2.0 * (1.0 - p_d) ** 2 and p_d >= IONIZATION_STATED_THRESHOLD


def s_ionization_closed(v: float, a_st: float, p_d: float) -> float:
    """S for ionization readout at the standard settings.

    Raises :class:`ValidityDomainError` where the closed form does not apply;
    use :func:`s_from_distributions` there.
    """
    v = check_probability(v, "visibility")
    a_st = check_probability(a_st, "a_st")
    p_d = check_probability(p_d, "p_d")
    if not ionization_closed_form_valid(v, a_st, p_d):
        raise ValidityDomainError(
            f"closed form invalid at V={v}, a_ST={a_st}, p_d={p_d}; evaluate via s_from_distributions"
        )
    return TSIRELSON_BOUND * v * p_d * p_d * contrast_reduction(a_st) - 2.0 * (1.0 - p_d) ** 2


def _count_variance_per_event(p: float, deviation: str) -> float:
    # dN**2 / N_s for one outcome
    if deviation == SQUARED_DEVIATION:
        return p * p * (1.0 - p)
    if deviation == BINOMIAL_DEVIATION:
        return p * (1.0 - p)
    raise ValueError(f"unknown deviation form {deviation!r}")


def delta_s_coefficient(dists: Sequence[JointDistribution], deviation: str = SQUARED_DEVIATION) -> float:
    """``dS * sqrt(N)`` under equal allocation, ``N`` the total over all settings.

    With ``N_s = N/4``: ``dE**2 = 4 (v_uu + v_dd) / N_s = 16 (v_uu + v_dd) / N``.
    """
    total = sum(
        _count_variance_per_event(d.p_uu, deviation) + _count_variance_per_event(d.p_dd, deviation) for d in dists
    )
    return 4.0 * math.sqrt(total)


def _check_allocation(n_total: int) -> None:
    if n_total <= 0 or n_total % 4:
        raise AllocationError(f"n_total={n_total} must be a positive multiple of 4")


def delta_s(dists: Sequence[JointDistribution], n_total: int, deviation: str = SQUARED_DEVIATION) -> float:
    """Gaussian-propagated standard deviation of S for ``n_total`` events."""
    _check_allocation(n_total)
    n_s = n_total // 4
    variance = 0.0
    for d in dists:
        dn_uu2 = n_s * _count_variance_per_event(d.p_uu, deviation)
        dn_dd2 = n_s * _count_variance_per_event(d.p_dd, deviation)
        variance += (2.0 / n_s) ** 2 * (dn_uu2 + dn_dd2)
    return math.sqrt(variance)


def delta_s_fluorescence_closed(v_observable: float, n_total: int) -> float:
    """dS for fluorescence readout at the standard settings (squared deviation)."""
    _check_allocation(n_total)
    x = v_observable / SQRT2
    bracket = 3.0 * (1.0 - x) ** 2 * (3.0 + x) + (1.0 + x) ** 2 * (3.0 - x)
    return math.sqrt(bracket) / (SQRT2 * math.sqrt(n_total))


def exact_required_events(s_value: float, coefficient: float, k: float) -> float:
    """Real-valued solution of ``(S - 2) sqrt(N) / coefficient = k``."""
    if s_value <= LOCAL_BOUND:
        raise NoViolationError(f"S={s_value:.6g} does not exceed 2")
    return (k * coefficient / (s_value - LOCAL_BOUND)) ** 2


def required_events_for(s_value: float, coefficient: float, k: float) -> int:
    """Smallest multiple of 4 with ``(S - 2) sqrt(N) / coefficient >= k``."""
    exact = exact_required_events(s_value, coefficient, k)
    n = max(4, 4 * math.ceil(exact / 4.0))
    # guard against rounding right at a multiple of 4
    while (s_value - LOCAL_BOUND) * math.sqrt(n) < k * coefficient:
        n += 4
    while n > 4 and (s_value - LOCAL_BOUND) * math.sqrt(n - 4) >= k * coefficient:
        n -= 4
    return n


def required_events(query: SignificanceQuery, deviation: str = SQUARED_DEVIATION) -> int:
    """Total events (all four settings) for a ``query.k``-sigma violation."""
    dists = chsh_distributions(query.state, query.detection, query.settings)
    return required_events_for(s_from_distributions(dists), delta_s_coefficient(dists, deviation), query.k)


@dataclass(frozen=True)
class ChshSummary:
    s: float
    s_closed: float | None
    delta_s_coefficient: float
    required_events: int | None
    required_events_exact: float | None


def summarize(
    state: WernerState,
    detection: DetectionModel,
    k: float,
    settings: ChshSettings = DEFAULT_SETTINGS,
    deviation: str = SQUARED_DEVIATION,
) -> ChshSummary:
    """S by both routes, dS coefficient and required N; ``None`` where undefined."""
    dists = chsh_distributions(state, detection, settings)
    s = s_from_distributions(dists)
    closed = None
    if settings == DEFAULT_SETTINGS:
        if isinstance(detection, IonizationModel):
            p_d = effective_p_d(detection)
            if ionization_closed_form_valid(state.visibility, detection.a_stirap, p_d):
                closed = s_ionization_closed(state.visibility, detection.a_stirap, p_d)
        else:
            closed = s_fluorescence_closed(state.visibility, detection.a_det)
    coefficient = delta_s_coefficient(dists, deviation)
    try:
        n = required_events_for(s, coefficient, k)
        exact = exact_required_events(s, coefficient, k)
    except NoViolationError:
        n = exact = None
    return ChshSummary(s, closed, coefficient, n, exact)

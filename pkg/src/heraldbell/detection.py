"""
Atomic readout models.

Both models start from the symmetric-accuracy picture: each atom's analysed
spin is identified correctly with probability ``a`` and flipped otherwise,
which shrinks the correlator by ``(2a - 1)**2``.

Fluorescence (state-selective removal) stops there, with ``a = a_det``.

Ionization adds an asymmetric channel on top of STIRAP accuracy ``a_ST``: an
atom read as "up" is only registered as up if a fragment is detected
(probability ``p_d``), otherwise it reads "down"; "down" is never mistaken
for "up" since detector dark counts are neglected. Applying that channel to
the symmetric distribution ``q`` gives all four entries::

    p_uu = p_d**2 q_uu
    p_ud = p_d q_ud + p_d (1 - p_d) q_uu
    p_du = p_d q_du + p_d (1 - p_d) q_uu
    p_dd = q_dd + (1 - p_d)(q_ud + q_du) + (1 - p_d)**2 q_uu
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import UnsupportedStateError
from .quantum_state import (
    AnalysisSetting,
    BellState,
    JointDistribution,
    WernerState,
    check_probability,
    symmetric_joint,
)


@dataclass(frozen=True)
class FluorescenceModel:
    """Readout by state-selective atom removal.

    ``a_det`` is the composite accuracy and is what the formulas use;
    ``a_stirap`` and ``a_hf`` are kept for bookkeeping only.
    """

    a_det: float = 0.95
    a_stirap: float = 0.9725
    a_hf: float = 0.978

    def __post_init__(self):
        for name in ("a_det", "a_stirap", "a_hf"):
            object.__setattr__(self, name, check_probability(getattr(self, name), name, lo=0.5))


@dataclass(frozen=True)
class IonizationModel:
    """Readout by state-selective ionization and fragment detection.

    ``p_d`` overrides the composed ``p_ionize * p_det`` when given.
    """

    a_stirap: float = 0.9725
    p_ionize: float = 0.99
    p_e: float = 0.85
    p_ion: float = 0.65
    p_d: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "a_stirap", check_probability(self.a_stirap, "a_stirap", lo=0.5))
        for name in ("p_ionize", "p_e", "p_ion"):
            object.__setattr__(self, name, check_probability(getattr(self, name), name))
        if self.p_d is not None:
            object.__setattr__(self, "p_d", check_probability(self.p_d, "p_d"))

    @classmethod
    def from_p_d(cls, p_d: float, a_stirap: float = 0.9725) -> IonizationModel:
        return cls(a_stirap=a_stirap, p_d=p_d)


DetectionModel = Union[FluorescenceModel, IonizationModel]


def fragment_detection_efficiency(p_e: float, p_ion: float) -> float:
    """Probability that at least one of electron and ion is detected."""
    p_e = check_probability(p_e, "p_e")
    p_ion = check_probability(p_ion, "p_ion")
    return 1.0 - (1.0 - p_e) * (1.0 - p_ion)


def effective_p_d(model: IonizationModel) -> float:
    if model.p_d is not None:
        return model.p_d
    return model.p_ionize * fragment_detection_efficiency(model.p_e, model.p_ion)


def symmetric_composed_accuracy(a_stirap: float, a_hf: float) -> float:
    """Accuracy of two independent symmetric steps (two errors cancel)."""
    return a_stirap * a_hf + (1.0 - a_stirap) * (1.0 - a_hf)


def product_composed_accuracy(a_stirap: float, a_hf: float) -> float:
    return a_stirap * a_hf


def contrast_reduction(accuracy: float) -> float:
    """Correlator factor ``(2a - 1)**2`` for symmetric per-atom accuracy ``a``."""
    return (2.0 * accuracy - 1.0) ** 2


def _require_singlet(state: WernerState) -> None:
    if state.bell_state is not BellState.PSI_MINUS:
        raise UnsupportedStateError(f"readout formulas are derived for psi_minus, got {state.bell_state.value}")


def _symmetric_accuracy_joint(state: WernerState, accuracy: float, setting: AnalysisSetting) -> JointDistribution:
    correlation = -state.visibility * contrast_reduction(accuracy) * setting.contrast_factor()
    return symmetric_joint(correlation)


def fluorescence_joint(
    state: WernerState, model: FluorescenceModel, setting: AnalysisSetting
) -> JointDistribution:
    _require_singlet(state)
    return _symmetric_accuracy_joint(state, model.a_det, setting)


def ionization_joint(state: WernerState, model: IonizationModel, setting: AnalysisSetting) -> JointDistribution:
    _require_singlet(state)
    q = _symmetric_accuracy_joint(state, model.a_stirap, setting)
    p_d = effective_p_d(model)
    miss = 1.0 - p_d
    return JointDistribution(
        p_uu=p_d * p_d * q.p_uu,
        p_ud=p_d * q.p_ud + p_d * miss * q.p_uu,
        p_du=p_d * q.p_du + p_d * miss * q.p_uu,
        p_dd=q.p_dd + miss * (q.p_ud + q.p_du) + miss * miss * q.p_uu,
    )


def joint_distribution(state: WernerState, model: DetectionModel, setting: AnalysisSetting) -> JointDistribution:
    """Observed four-outcome distribution for either readout model."""
    if isinstance(model, FluorescenceModel):
        return fluorescence_joint(state, model, setting)
    if isinstance(model, IonizationModel):
        return ionization_joint(state, model, setting)
    raise TypeError(f"unknown detection model {type(model).__name__}")

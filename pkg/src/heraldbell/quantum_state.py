"""
Werner-state algebra.

A Werner state ``V |Psi><Psi| + (1 - V) * 1/4`` is fully described by its
visibility ``V`` and the Bell state it is built around, so no density matrix
is ever formed here.

Joint outcome probabilities at analysis angles ``(alpha, beta)`` (degrees,
light-polarisation convention) for the singlet are::

    p_uu = p_dd = (1 - V cos 2(beta - alpha)) / 4
    p_ud = p_du = (1 + V cos 2(beta - alpha)) / 4

The anti-correlated entries follow from normalisation together with the
exchange symmetry of the singlet. For ``PsiPlus`` the sign of the cosine
term is reversed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

NORMALIZATION_ATOL = 1e-12


class BellState(enum.Enum):
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"

    @property
    def correlation_sign(self) -> int:
        # sign multiplying V cos 2(beta - alpha) in the correlator
        return -1 if self is BellState.PSI_MINUS else 1


def check_probability(value: float, name: str = "probability", lo: float = 0.0, hi: float = 1.0) -> float:
    """Return ``value`` as float, raising :class:`DomainError` if outside ``[lo, hi]``."""
    value = float(value)
    if not (lo <= value <= hi) or math.isnan(value):
        raise DomainError(f"{name}={value!r}: probability out of range [{lo}, {hi}]")
    return value


@dataclass(frozen=True)
class WernerState:
    visibility: float
    bell_state: BellState = BellState.PSI_MINUS

    def __post_init__(self):
        object.__setattr__(self, "visibility", check_probability(self.visibility, "visibility"))
        if not isinstance(self.bell_state, BellState):
            raise DomainError(f"unknown Bell state {self.bell_state!r}")

    @property
    def fidelity(self) -> float:
        return visibility_to_fidelity(self.visibility)

    @classmethod
    def from_fidelity(cls, fidelity: float, bell_state: BellState = BellState.PSI_MINUS) -> WernerState:
        return cls(fidelity_to_visibility(fidelity), bell_state)


@dataclass(frozen=True)
class AnalysisSetting:
    """Analysis directions of the two particles, in degrees."""

    alpha: float
    beta: float

    @property
    def relative_angle(self) -> float:
        """``beta - alpha`` reduced to ``[0, 180)``."""
        return (self.beta - self.alpha) % 180.0

    def contrast_factor(self) -> float:
        """``cos 2(beta - alpha)``."""
        return math.cos(2.0 * math.radians(self.relative_angle))


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of the four outcome pairs at one setting.

    Index order everywhere in the package is ``(uu, ud, du, dd)``; the first
    letter refers to particle 1 (analysed at ``alpha``).
    """

    p_uu: float
    p_ud: float
    p_du: float
    p_dd: float

    def __post_init__(self):
        values = self.as_array()
        if np.any(values < -NORMALIZATION_ATOL) or abs(values.sum() - 1.0) > NORMALIZATION_ATOL:
            raise DomainError(f"not a probability distribution: {values.tolist()}")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_uu, self.p_ud, self.p_du, self.p_dd], dtype=np.float64)

    @property
    def correlation(self) -> float:
        """Expectation value of the spin product, ``2 (p_uu + p_dd) - 1``."""
        return 2.0 * (self.p_uu + self.p_dd) - 1.0


def visibility_to_fidelity(v: float) -> float:
    """Fidelity with the target Bell state, ``1/4 + 3V/4``."""
    v = check_probability(v, "visibility")
    return 0.25 + 0.75 * v


def fidelity_to_visibility(f: float) -> float:
    """Inverse of :func:`visibility_to_fidelity`."""
    f = check_probability(f, "fidelity", lo=0.25)
    return (4.0 * f - 1.0) / 3.0


def apply_depolarizing_error(state, e: float):
    """Mix ``state`` with the fully mixed state with probability ``e``.

    Accepts a :class:`WernerState` (visibility scales by ``1 - e``) or a bare
    fidelity (``F -> (1 - e) F + e/4``) and returns the same kind.
    """
    e = check_probability(e, "error probability")
    if isinstance(state, WernerState):
        return WernerState((1.0 - e) * state.visibility, state.bell_state)
    f = check_probability(state, "fidelity", lo=0.25)
    return (1.0 - e) * f + 0.25 * e


def symmetric_joint(correlation: float) -> JointDistribution:
    """Exchange-symmetric distribution with a given correlator ``E``.

    ``p_uu = p_dd = (1 + E)/4`` and ``p_ud = p_du = (1 - E)/4``.
    """
    same = 0.25 * (1.0 + correlation)
    diff = 0.25 * (1.0 - correlation)
    return JointDistribution(same, diff, diff, same)


def ideal_joint_distribution(state: WernerState, setting: AnalysisSetting) -> JointDistribution:
    """Outcome probabilities for perfect readout of ``state`` at ``setting``."""
    correlation = state.bell_state.correlation_sign * state.visibility * setting.contrast_factor()
    return symmetric_joint(correlation)

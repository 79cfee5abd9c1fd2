"""Feasibility model for heralded atom-atom Bell tests."""

from .chsh import (
    DEFAULT_SETTINGS,
    ChshSettings,
    SettingCounts,
    SignificanceQuery,
    correlator,
    delta_s,
    summarize,
    ChshSummary,
    delta_s_coefficient,
    delta_s_fluorescence_closed,
    required_events,
    s_fluorescence_closed,
    s_from_distributions,
    s_ionization_closed,
)
from .detection import (
    FluorescenceModel,
    IonizationModel,
    effective_p_d,
    fluorescence_joint,
    fragment_detection_efficiency,
    ionization_joint,
    joint_distribution,
)
from .montecarlo import SimulationPlan, replicate, simulate
from .quantum_state import (
    AnalysisSetting,
    BellState,
    JointDistribution,
    WernerState,
    apply_depolarizing_error,
    fidelity_to_visibility,
    ideal_joint_distribution,
    visibility_to_fidelity,
)
from .schedule import (
    CycleModel,
    DetectionTimeline,
    RunPlan,
    cycle_time,
    effective_rate,
    locality_margin,
    measurement_time,
)
from .swap_chain import (
    ErrorBudget,
    LinkModel,
    atom_atom_state,
    atom_photon_visibility,
    herald_stats,
    swap_fidelity,
)

__version__ = "0.1.0"

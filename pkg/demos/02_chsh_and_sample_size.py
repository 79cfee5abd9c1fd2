# %% [markdown]
# # CHSH value and the number of events for a 3-sigma violation
#
# Fluorescence readout loses contrast symmetrically. Ionization readout is
# asymmetric: a missed fragment turns "up" into "down".

# %%
import math

from heraldbell.chsh import (
    BINOMIAL_DEVIATION,
    SignificanceQuery,
    chsh_distributions,
    delta_s,
    required_events,
    s_fluorescence_closed,
    s_from_distributions,
    s_ionization_closed,
)
from heraldbell.detection import FluorescenceModel, IonizationModel
from heraldbell.quantum_state import WernerState

state = WernerState(0.925)
fluorescence = FluorescenceModel(a_det=0.95)
ionization = IonizationModel.from_p_d(0.95, a_stirap=0.9725)

for name, model in (("fluorescence", fluorescence), ("ionization", ionization)):
    dists = chsh_distributions(state, model)
    print(f"{name:<13} S = {s_from_distributions(dists):.4f}")
print(f"closed forms: {s_fluorescence_closed(0.925, 0.95):.4f}, {s_ionization_closed(0.925, 0.9725, 0.95):.4f}")

# %% [markdown]
# Required events. Here the observable visibility is fed in directly, with
# perfect readout for fluorescence and unit STIRAP accuracy for ionization.

# %%
n_flr = required_events(SignificanceQuery(3, FluorescenceModel(a_det=1.0), WernerState(0.749)))
n_ion = required_events(SignificanceQuery(3, IonizationModel.from_p_d(0.95, a_stirap=1.0), WernerState(0.826)))
print(f"fluorescence, V=0.749: N = {n_flr}")
print(f"ionization, p_d=0.95:  N = {n_ion}")

# %% [markdown]
# The quoted sample sizes rest on a count deviation of sqrt(N p^2 (1-p)).
# With the textbook sqrt(N p (1-p)) they grow considerably:

# %%
n_flr_binomial = required_events(
    SignificanceQuery(3, FluorescenceModel(a_det=1.0), WernerState(0.749)), deviation=BINOMIAL_DEVIATION
)
print(f"fluorescence, binomial deviation: N = {n_flr_binomial}")
dists = chsh_distributions(WernerState(0.749), FluorescenceModel(a_det=1.0))
print(f"dS at N=2600: {delta_s(dists, 2600):.4f} vs {delta_s(dists, 2600, BINOMIAL_DEVIATION):.4f}")
print(f"dS at V=0, N=2600 equals sqrt(6/N) = {math.sqrt(6 / 2600):.4f}")

# %% [markdown]
# # Checking the analytic numbers by simulation
#
# Every heralded event is drawn one by one: dark herald or true herald,
# then one of four readout outcomes.

# %%
from heraldbell.chsh import BINOMIAL_DEVIATION, chsh_distributions, delta_s, s_from_distributions
from heraldbell.detection import FluorescenceModel
from heraldbell.montecarlo import SimulationPlan, replicate, simulate
from heraldbell.quantum_state import WernerState
from heraldbell.swap_chain import ErrorBudget, LinkModel, atom_atom_state, herald_stats, swapped_state

budget, link = ErrorBudget(), LinkModel()
plan = SimulationPlan(
    seed=1,
    n_events=1_000_000,
    state=swapped_state(budget),
    detection=FluorescenceModel(),
    dark_fraction=herald_stats(link).e_dc,
)
report = simulate(plan)
analytic = s_from_distributions(chsh_distributions(atom_atom_state(budget, link), FluorescenceModel()))
print(f"S simulated {report.s_empirical:.4f} +- {report.delta_s_empirical:.4f}, analytic {analytic:.4f}")
print(f"dark heralds: {report.dark_fraction_empirical:.4%} (expected {plan.dark_fraction:.4%})")

# %% [markdown]
# Scatter of S over many runs of 2600 events, compared with both error formulas.

# %%
state, model = WernerState(0.749), FluorescenceModel(a_det=1.0)
summary = replicate(SimulationPlan(2, 2600, state, model), n_replicas=2000)
dists = chsh_distributions(state, model)
squared, binomial = delta_s(dists, 2600), delta_s(dists, 2600, BINOMIAL_DEVIATION)
print(f"simulated std {summary.s_std:.4f}")
print(f"p^2(1-p) form {squared:.4f}  ratio {summary.s_std / squared:.2f}")
print(f"p(1-p) form   {binomial:.4f}  ratio {summary.s_std / binomial:.2f}")
print(f"runs with S > 2: {sum(s > 2 for s in summary.s_values) / summary.n_replicas:.1%}")

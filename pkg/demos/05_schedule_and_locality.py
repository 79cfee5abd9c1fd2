# %% [markdown]
# # How long does the experiment take, and is it space-like separated?

# %%
from heraldbell.schedule import (
    CycleModel,
    DetectionTimeline,
    RunPlan,
    amortized_cooling,
    cycle_time,
    effective_rate,
    locality_margin,
    measurement_time,
)

cycle = CycleModel(
    prep_time=5e-6,
    cooling_amortized=amortized_cooling(200e-6, 20),
    fiber_length=200.0,
    fiber_speed_fraction=2 / 3,
    occupancy_1=0.5,
    occupancy_2=0.5,
)
rate = effective_rate(cycle)
print(f"cycle {cycle_time(cycle) * 1e6:.2f} us, effective rate {rate / 1e3:.2f} kHz")
print(f"one heralded event every {measurement_time(RunPlan(2.34e-7, 1), rate).seconds / 60:.1f} min")
for n in (2600, 3470):
    single = measurement_time(RunPlan(2.34e-7, n), rate).days
    double = measurement_time(RunPlan(2.34e-7, n, second_bell_state=True), rate).days
    print(f"{n} events: {single:.1f} days ({double:.1f} with two detected Bell states)")

# %%
timeline = DetectionTimeline()
for distance in (200.0, 250.0, 276.0, 300.0, 400.0):
    margin = locality_margin(timeline, distance)
    print(f"{distance:5.0f} m: margin {margin * 1e9:+7.1f} ns  {'ok' if margin > 0 else 'too close'}")

# %% [markdown]
# # Sample-size curves
#
# Required events versus observable visibility (fluorescence) and versus
# fragment detection probability (ionization). Writes two CSV files and,
# if matplotlib is around, a plot.

# %%
import csv
import io
from pathlib import Path

from heraldbell.cli import visibility_sweep, p_d_sweep, run_sweep

out = Path("sweeps")
out.mkdir(exist_ok=True)
tables = {}
for name, spec in (("visibility", visibility_sweep(steps=47)), ("p_d", p_d_sweep())):
    text = run_sweep(spec)
    (out / f"{name}.csv").write_text(text)
    tables[name] = list(csv.DictReader(io.StringIO(text)))
    finite = [row for row in tables[name] if row["status"] == "ok"]
    print(f"{name}: {len(finite)} of {len(tables[name])} rows violate the inequality")

# %%
for row in tables["p_d"]:
    print(f"p_d = {float(row['value']):.3f}   N = {row['required_events'] or '-'}")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, name, label in zip(axes, tables, ("observable visibility", "p_d")):
        finite = [row for row in tables[name] if row["status"] == "ok"]
        ax.semilogy([float(r["value"]) for r in finite], [float(r["required_events"]) for r in finite])
        ax.set_xlabel(label)
        ax.set_ylabel("events for 3 sigma")
    fig.tight_layout()
    fig.savefig(out / "sweeps.png", dpi=120)

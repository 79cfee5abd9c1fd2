"""
Command-line front end.

    heraldbell budget | chsh | required-events | sweep | montecarlo | schedule | report
        [--scenario PATH] [--set KEY=VALUE ...] [--out PATH] [--format text|csv]

Exit status: 0 on success, 2 for scenario parse/validation failures, 3 when
``required-events`` finds no violation (S <= 2).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import chsh, schedule
from .detection import IonizationModel, contrast_reduction, effective_p_d
from .errors import NoViolationError, ScenarioError
from .montecarlo import SimulationPlan, replicate, simulate
from .scenario import Scenario, default_scenario, parse_scenario, resolve_key
from .swap_chain import budget_report, herald_stats, swapped_state

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_NO_VIOLATION = 3

SWEEP_COLUMNS = (
    "variable", "value", "s", "delta_s_coefficient", "required_events_exact", "required_events", "status"
)
REPORT_COLUMNS = ("section", "quantity", "value", "reference_value", "unit")


def fmt(value) -> str:
    """Nine significant digits; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.9g}"


@dataclass(frozen=True)
class Row:
    section: str
    quantity: str
    value: float | int | None
    reference: float | int | None = None
    unit: str = ""


# budget


def run_budget(scenario: Scenario) -> list[Row]:
    r = budget_report(scenario.budget(), scenario.link(), scenario.dark_fraction_convention)
    sec = "budget"
    return [
        Row(sec, "V_at-ph", r.v_at_ph, 0.985),
        Row(sec, "F_swap", r.f_swap, 0.956),
        Row(sec, "p_true", r.herald.p_true, 2.34e-7, "per attempt"),
        Row(sec, "p_dark", r.herald.p_dark, 3.96e-9, "per attempt"),
        Row(sec, "p_double_dark", r.herald.p_double_dark, 4e-12, "per attempt"),
        Row(sec, "e_dc", r.herald.e_dc, 0.0168),
        Row(sec, "F_at-at", r.f_at_at, 0.944),
        Row(sec, "V_at-at", r.v_at_at, 0.925),
    ]


# chsh


def _model_rows(sec: str, scenario: Scenario, model, n_events: int, ref_s: float, ref_n: int) -> list[Row]:
    state = scenario.state()
    summary = chsh.summarize(state, model, scenario.k, scenario.settings(), scenario.deviation)
    dists = chsh.chsh_distributions(state, model, scenario.settings())
    if isinstance(model, IonizationModel):
        observable, ref_observable = state.visibility * contrast_reduction(model.a_stirap), 0.826
        extra = [Row(sec, "p_d", effective_p_d(model), 0.95)]
    else:
        observable, ref_observable = state.visibility * contrast_reduction(model.a_det), 0.749
        extra = []
    return extra + [
        Row(sec, "observable_visibility", observable, ref_observable),
        Row(sec, "S_closed_form", summary.s_closed, ref_s),
        Row(sec, "S_general", summary.s, ref_s),
        Row(sec, f"delta_S_at_N={n_events}", chsh.delta_s(dists, n_events, scenario.deviation)),
        Row(sec, f"required_events_k={fmt(scenario.k)}", summary.required_events, ref_n, "events"),
    ]


def run_chsh(scenario: Scenario) -> list[Row]:
    n_events = scenario.get("chsh.n_events")
    rows = [Row("chsh", "V_at-at", scenario.state().visibility, 0.925)]
    rows += _model_rows("chsh.fluorescence", scenario, scenario.fluorescence(), n_events, 2.12, 2600)
    rows += _model_rows("chsh.ionization", scenario, scenario.ionization(), n_events, 2.10, 3470)
    return rows


def run_required_events(scenario: Scenario) -> int:
    query = chsh.SignificanceQuery(scenario.k, scenario.detection(), scenario.state(), scenario.settings())
    return chsh.required_events(query, scenario.deviation)


# sweep


@dataclass(frozen=True)
class SweepSpec:
    """Scan one scenario variable over ``steps`` points, endpoints included.

    ``variable`` is ``observable_visibility`` (fluorescence with the visibility
    taken as already including readout), ``p_d`` (ionization), or any numeric
    ``section.key`` of the scenario.
    """

    variable: str
    lo: float
    hi: float
    steps: int
    fixed: Scenario

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ScenarioError(f"sweep range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.steps < 2:
            raise ScenarioError(f"sweep needs at least 2 steps, got {self.steps}")
        if self.variable not in ("observable_visibility", "p_d"):
            section, key = resolve_key(self.variable)
            if not isinstance(self.fixed.values[section][key], (int, float)) or isinstance(
                self.fixed.values[section][key], bool
            ):
                raise ScenarioError(f"sweep variable {self.variable!r} is not numeric")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)

    def scenario_at(self, value: float) -> Scenario:
        if self.variable == "observable_visibility":
            updates = {"state.visibility": value, "detection.model": "fluorescence", "fluorescence.a_det": 1.0}
        elif self.variable == "p_d":
            updates = {"detection.model": "ionization", "ionization.p_d": value}
        else:
            section, key = resolve_key(self.variable)
            current = self.fixed.values[section][key]
            updates = {f"{section}.{key}": int(round(value)) if isinstance(current, int) else float(value)}
        return self.fixed.with_values(updates)


def visibility_sweep(base: Scenario | None = None, steps: int = 231) -> SweepSpec:
    """Required events vs observable visibility, fluorescence readout."""
    return SweepSpec("observable_visibility", 0.72, 0.95, steps, base or default_scenario())


def p_d_sweep(base: Scenario | None = None, steps: int = 31) -> SweepSpec:
    """Required events vs fragment detection probability, ionization readout.

    The atom-atom visibility is pinned at 0.925 so that
    ``V (2 a_ST - 1)**2 = 0.826`` with the default STIRAP accuracy.
    """
    base = (base or default_scenario()).with_values({"state.visibility": 0.925})
    return SweepSpec("p_d", 0.85, 1.0, steps, base)


def sweep_rows(spec: SweepSpec) -> list[dict]:
    rows = []
    for value in spec.values():
        value = float(value)
        try:
            scenario = spec.scenario_at(value)
            summary = chsh.summarize(
                scenario.state(), scenario.detection(), scenario.k, scenario.settings(), scenario.deviation
            )
        except (ValueError, ScenarioError) as exc:
            rows.append({"variable": spec.variable, "value": value, "status": f"invalid: {exc}"})
            continue
        status = "ok" if summary.required_events is not None else "no_violation"
        rows.append(
            {
                "variable": spec.variable,
                "value": value,
                "s": summary.s,
                "delta_s_coefficient": summary.delta_s_coefficient,
                "required_events_exact": summary.required_events_exact,
                "required_events": summary.required_events,
                "status": status,
            }
        )
    return rows


def run_sweep(spec: SweepSpec) -> str:
    """CSV table, one row per sweep point.

    ``required_events_exact`` is the unrounded solution of the k-sigma
    condition; ``required_events`` rounds it up to a multiple of 4. Rows with
    S <= 2 keep both empty and carry ``status=no_violation``.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in sweep_rows(spec):
        writer.writerow([row["variable"]] + [fmt(row.get(c)) for c in SWEEP_COLUMNS[1:-1]] + [row["status"]])
    return buffer.getvalue()


# montecarlo


def _z_score(observed: float, expected: float, error: float) -> float:
    if error > 0:
        return (observed - expected) / error
    return 0.0 if observed == expected else math.inf


def montecarlo_plan(scenario: Scenario, n_events: int, seed: int) -> SimulationPlan:
    """Plan for the scenario's active readout.

    With the chain-derived state, events start from the true-herald state and
    dark heralds are mixed in during sampling; an explicit ``[state]``
    visibility is simulated as given.
    """
    if scenario.get("state.visibility") is None:
        state = swapped_state(scenario.budget())
        dark_fraction = herald_stats(scenario.link(), scenario.dark_fraction_convention).e_dc
    else:
        state, dark_fraction = scenario.state(), 0.0
    return SimulationPlan(seed, n_events, state, scenario.detection(), scenario.settings(), dark_fraction)


def run_montecarlo(
    scenario: Scenario, n_events: int | None = None, n_replicas: int | None = None, seed: int | None = None,
    workers: int | None = None,
) -> list[Row]:
    mc = scenario.values["montecarlo"]
    n_events = mc["events"] if n_events is None else n_events
    n_replicas = mc["replicas"] if n_replicas is None else n_replicas
    seed = mc["seed"] if seed is None else seed
    workers = mc["workers"] if workers is None else workers

    plan = montecarlo_plan(scenario, n_events, seed)
    dists = chsh.chsh_distributions(scenario.state(), scenario.detection(), scenario.settings())
    s_analytic = chsh.s_from_distributions(dists)
    report = simulate(plan, workers=workers)
    sec = "montecarlo"
    rows = [
        Row(sec, "events", n_events),
        Row(sec, "seed", seed),
        Row(sec, "S_analytic", s_analytic),
        Row(sec, "S_empirical", report.s_empirical),
        Row(sec, "S_standard_error", report.delta_s_empirical),
        Row(sec, "S_z_score", _z_score(report.s_empirical, s_analytic, report.delta_s_empirical)),
    ]
    if plan.dark_fraction > 0:
        rows += [
            Row(sec, "e_dc_analytic", plan.dark_fraction),
            Row(sec, "dark_fraction_empirical", report.dark_fraction_empirical),
        ]
    for i, counts in enumerate(report.counts, start=1):
        rows.append(Row(sec, f"setting{i}_counts_uu/ud/du/dd", None, None,
                        f"{counts.n_uu}/{counts.n_ud}/{counts.n_du}/{counts.n_dd}"))
    if n_replicas >= 2:
        summary = replicate(plan, n_replicas, workers=workers)
        squared = chsh.delta_s(dists, n_events, chsh.SQUARED_DEVIATION)
        binomial = chsh.delta_s(dists, n_events, chsh.BINOMIAL_DEVIATION)
        rows += [
            Row(sec, "replicas", n_replicas),
            Row(sec, "S_replica_mean", summary.s_mean),
            Row(sec, "S_replica_std", summary.s_std),
            Row(sec, "delta_S_squared_form", squared),
            Row(sec, "delta_S_binomial_form", binomial),
            Row(sec, "std_ratio_to_squared_form", summary.s_std / squared),
            Row(sec, "std_ratio_to_binomial_form", summary.s_std / binomial),
        ]
    return rows


# schedule


def run_schedule(scenario: Scenario) -> list[Row]:
    cycle = scenario.cycle()
    rate = schedule.effective_rate(cycle)
    p_true = herald_stats(scenario.link(), scenario.dark_fraction_convention).p_true
    second = scenario.get("cycle.second_bell_state")
    per_event = schedule.measurement_time(schedule.RunPlan(p_true, 1, second), rate)
    sec = "schedule"
    rows = [
        Row(sec, "cycle_time", schedule.cycle_time(cycle) * 1e6, 17.0, "us"),
        Row(sec, "repetition_rate", schedule.repetition_rate(cycle) / 1e3, 58.8, "kHz"),
        Row(sec, "effective_rate", rate / 1e3, 14.7, "kHz"),
        Row(sec, "time_per_event", per_event.seconds, 300.0, "s"),
    ]
    for name, ref_n, ref_days in (("fluorescence", 2600, 9.0), ("ionization", 3470, 12.0)):
        try:
            n = run_required_events(scenario.with_values({"detection.model": name}))
        except NoViolationError:
            rows.append(Row(sec, f"total_time_{name}", None, ref_days, "days (no violation)"))
            continue
        total = schedule.measurement_time(schedule.RunPlan(p_true, n, second), rate)
        rows.append(Row(sec, f"events_{name}", n, ref_n, "events"))
        rows.append(Row(sec, f"total_time_{name}", total.days, ref_days, "days"))
    distance = scenario.get("timeline.station_distance_m")
    margin = schedule.locality_margin(scenario.timeline(), distance)
    rows += [
        Row(sec, "detection_duration", scenario.timeline().total * 1e9, 1000.0, "ns (target: < 1 us)"),
        Row(sec, f"locality_margin_at_{fmt(distance)}m", margin * 1e9, None, "ns"),
        Row(sec, "locality_holds", int(margin > 0)),
    ]
    return rows


def run_report(scenario: Scenario) -> list[Row]:
    return run_budget(scenario) + run_chsh(scenario) + run_schedule(scenario) + run_montecarlo(scenario)


# output


def render_rows(rows: Sequence[Row], form: str) -> str:
    if form == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in rows:
            writer.writerow([r.section, r.quantity, fmt(r.value), fmt(r.reference), r.unit])
        return buffer.getvalue()
    lines = []
    section = None
    for r in rows:
        if r.section != section:
            if section is not None:
                lines.append("")
            lines.append(f"== {r.section} ==")
            section = r.section
        ref = f"  (ref: {fmt(r.reference)})" if r.reference is not None else ""
        value = fmt(r.value) if r.value is not None else "-"
        unit = f" {r.unit}" if r.unit else ""
        lines.append(f"{r.quantity:<34} {value:>16}{unit}{ref}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heraldbell", description=__doc__.strip().splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario document (INI); defaults apply for missing keys")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one scenario key, e.g. --set fiber_length_m=300 (repeatable)")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("text", "csv"), default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("budget", "chsh", "required-events", "schedule"):
        sub.add_parser(name, parents=[common])

    mc_options = argparse.ArgumentParser(add_help=False)
    mc_options.add_argument("--seed", type=int)
    mc_options.add_argument("--events", type=int)
    mc_options.add_argument("--replicas", type=int)
    mc_options.add_argument("--workers", type=int)
    sub.add_parser("montecarlo", parents=[common, mc_options])
    sub.add_parser("report", parents=[common, mc_options])

    sweep = sub.add_parser("sweep", parents=[common])
    sweep.add_argument("--preset", choices=("visibility", "p_d"), help="preset range: observable visibility 0.72-0.95 or p_d 0.85-1.0")
    sweep.add_argument("--variable", help="observable_visibility, p_d, or a section.key")
    sweep.add_argument("--lo", type=float)
    sweep.add_argument("--hi", type=float)
    sweep.add_argument("--steps", type=int)
    return parser


def _load(args) -> Scenario:
    text = ""
    if args.scenario:
        with open(args.scenario, encoding="utf-8") as handle:
            text = handle.read()
    return parse_scenario(text, args.overrides)


def _sweep_spec(args, scenario: Scenario) -> SweepSpec:
    if args.preset == "visibility":
        spec = visibility_sweep(scenario)
    elif args.preset == "p_d":
        spec = p_d_sweep(scenario)
    else:
        if args.variable is None or args.lo is None or args.hi is None:
            raise ScenarioError("sweep needs --preset or all of --variable, --lo, --hi")
        return SweepSpec(args.variable, args.lo, args.hi, args.steps or 11, scenario)
    return SweepSpec(
        args.variable or spec.variable,
        spec.lo if args.lo is None else args.lo,
        spec.hi if args.hi is None else args.hi,
        args.steps or spec.steps,
        spec.fixed,
    )


def _mc_kwargs(args) -> dict:
    return {"n_events": args.events, "n_replicas": args.replicas, "seed": args.seed, "workers": args.workers}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    form = args.format or ("csv" if args.command == "sweep" else "text")
    status = EXIT_OK
    try:
        scenario = _load(args)
        if args.command == "budget":
            output = render_rows(run_budget(scenario), form)
        elif args.command == "chsh":
            output = render_rows(run_chsh(scenario), form)
        elif args.command == "required-events":
            try:
                n = run_required_events(scenario)
                rows = [Row("required-events", "required_events", n, None, "events")]
            except NoViolationError as exc:
                print(f"error: {exc}", file=sys.stderr)
                rows = [Row("required-events", "required_events", None, None, "no violation")]
                status = EXIT_NO_VIOLATION
            output = render_rows(rows, form)
        elif args.command == "sweep":
            spec = _sweep_spec(args, scenario)
            output = run_sweep(spec) if form == "csv" else _sweep_text(spec)
        elif args.command == "montecarlo":
            output = render_rows(run_montecarlo(scenario, **_mc_kwargs(args)), form)
        elif args.command == "schedule":
            output = render_rows(run_schedule(scenario), form)
        else:
            kwargs = _mc_kwargs(args)
            rows = run_budget(scenario) + run_chsh(scenario) + run_schedule(scenario)
            rows += run_montecarlo(scenario, **kwargs)
            output = render_rows(rows, form)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(output)
    else:
        sys.stdout.write(output)
    return status


def _sweep_text(spec: SweepSpec) -> str:
    lines = [f"{'value':>12} {'S':>12} {'dS*sqrt(N)':>12} {'N':>10}  status"]
    for row in sweep_rows(spec):
        lines.append(
            f"{fmt(row['value']):>12} {fmt(row.get('s')):>12} {fmt(row.get('delta_s_coefficient')):>12} "
            f"{fmt(row.get('required_events')):>10}  {row['status']}"
        )
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sys.exit(main())

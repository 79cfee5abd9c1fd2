"""
Scenario documents.

A scenario is an INI-style file. Every key carries its unit in its name and
every default is the value quoted for the proposed experiment::

    [budget]            e_exc, e_pol, e_bsm
    [link]              eta1, eta2, r_dc_cps, delta_t_ns, dark_fraction_convention
    [state]             visibility (``none``: derive from the error budget)
    [detection]         model = fluorescence | ionization
    [fluorescence]      a_det, a_stirap, a_hf
    [ionization]        a_stirap, p_ionize, p_e, p_ion, p_d (``none``: compose)
    [chsh]              alpha_deg, alpha_prime_deg, beta_deg, beta_prime_deg,
                        k_sigma, deviation, n_events
    [cycle]             prep_time_us, cooling_time_us, cycles_per_cooling,
                        fiber_length_m, fiber_speed_fraction, occupancy_1,
                        occupancy_2, second_bell_state
    [timeline]          basis_choice_ns, stirap_ns, decoherence_ns,
                        fragment_flight_ns, station_distance_m
    [montecarlo]        seed, events, replicas, workers

The :class:`Scenario` keeps values in document units so that emitting and
re-parsing is exact; the accessor methods build the SI-unit model objects.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping

from .chsh import BINOMIAL_DEVIATION, SQUARED_DEVIATION, ChshSettings
from .detection import DetectionModel, FluorescenceModel, IonizationModel
from .errors import ScenarioError
from .quantum_state import WernerState
from .schedule import CycleModel, DetectionTimeline, amortized_cooling
from .swap_chain import DARK_FRACTION_OF_TOTAL, DARK_FRACTION_OF_TRUE, ErrorBudget, LinkModel, atom_atom_state


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text: str) -> float | None:
    if text.strip().lower() in ("", "none"):
        return None
    return float(text)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return value

    return parse


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {value}")
    return value


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# section -> key -> (parser, default)
SCHEMA: dict[str, dict[str, tuple[Callable[[str], Any], Any]]] = {
    "budget": {
        "e_exc": (float, 0.005),
        "e_pol": (float, 0.01),
        "e_bsm": (float, 0.03),
    },
    "link": {
        "eta1": (float, 0.78e-3),
        "eta2": (float, 1.2e-3),
        "r_dc_cps": (float, 50.0),
        "delta_t_ns": (float, 40.0),
        "dark_fraction_convention": (_choice(DARK_FRACTION_OF_TOTAL, DARK_FRACTION_OF_TRUE), DARK_FRACTION_OF_TOTAL),
    },
    "state": {
        "visibility": (_optional_float, None),
    },
    "detection": {
        "model": (_choice("fluorescence", "ionization"), "fluorescence"),
    },
    "fluorescence": {
        "a_det": (float, 0.95),
        "a_stirap": (float, 0.9725),
        "a_hf": (float, 0.978),
    },
    "ionization": {
        "a_stirap": (float, 0.9725),
        "p_ionize": (float, 0.99),
        "p_e": (float, 0.85),
        "p_ion": (float, 0.65),
        "p_d": (_optional_float, 0.95),
    },
    "chsh": {
        "alpha_deg": (float, 0.0),
        "alpha_prime_deg": (float, 45.0),
        "beta_deg": (float, 22.5),
        "beta_prime_deg": (float, -22.5),
        "k_sigma": (float, 3.0),
        "deviation": (_choice(SQUARED_DEVIATION, BINOMIAL_DEVIATION), SQUARED_DEVIATION),
        "n_events": (int, 2600),
    },
    "cycle": {
        "prep_time_us": (float, 5.0),
        "cooling_time_us": (float, 200.0),
        "cycles_per_cooling": (int, 20),
        "fiber_length_m": (float, 200.0),
        "fiber_speed_fraction": (float, 2.0 / 3.0),
        "occupancy_1": (float, 0.5),
        "occupancy_2": (float, 0.5),
        "second_bell_state": (_parse_bool, False),
    },
    "timeline": {
        "basis_choice_ns": (float, 100.0),
        "stirap_ns": (float, 120.0),
        "decoherence_ns": (float, 200.0),
        "fragment_flight_ns": (float, 500.0),
        "station_distance_m": (float, 300.0),
    },
    "montecarlo": {
        "seed": (_u64, 20090101),
        "events": (int, 1_000_000),
        "replicas": (int, 200),
        "workers": (int, 1),
    },
}


def _defaults() -> dict[str, dict[str, Any]]:
    return {section: {key: default for key, (_, default) in keys.items()} for section, keys in SCHEMA.items()}


def resolve_key(name: str) -> tuple[str, str]:
    """Map ``section.key`` or an unambiguous bare ``key`` to its schema entry."""
    if "." in name:
        section, key = name.split(".", 1)
        if section in SCHEMA and key in SCHEMA[section]:
            return section, key
        raise ScenarioError(f"unknown key {name!r}")
    owners = [section for section, keys in SCHEMA.items() if name in keys]
    if not owners:
        raise ScenarioError(f"unknown key {name!r}")
    if len(owners) > 1:
        options = ", ".join(f"{s}.{name}" for s in owners)
        raise ScenarioError(f"ambiguous key {name!r}; use one of {options}")
    return owners[0], name


@dataclass(frozen=True)
class Scenario:
    values: Mapping[str, Mapping[str, Any]]

    def __post_init__(self):
        self.validate()

    def get(self, name: str) -> Any:
        section, key = resolve_key(name)
        return self.values[section][key]

    def with_values(self, updates: Mapping[str, Any]) -> Scenario:
        """Copy with ``{"section.key": value}`` replaced (already typed)."""
        values = {section: dict(keys) for section, keys in self.values.items()}
        for name, value in updates.items():
            section, key = resolve_key(name)
            values[section][key] = value
        return Scenario(values)

    # model accessors

    def budget(self) -> ErrorBudget:
        b = self.values["budget"]
        return ErrorBudget(b["e_exc"], b["e_pol"], b["e_bsm"])

    def link(self) -> LinkModel:
        lk = self.values["link"]
        return LinkModel(lk["eta1"], lk["eta2"], lk["r_dc_cps"], lk["delta_t_ns"] / 1e9)

    @property
    def dark_fraction_convention(self) -> str:
        return self.values["link"]["dark_fraction_convention"]

    def state(self) -> WernerState:
        """Atom-atom state: the ``[state]`` override or the full error chain."""
        override = self.values["state"]["visibility"]
        if override is not None:
            return WernerState(override)
        return atom_atom_state(self.budget(), self.link(), self.dark_fraction_convention)

    def fluorescence(self) -> FluorescenceModel:
        f = self.values["fluorescence"]
        return FluorescenceModel(f["a_det"], f["a_stirap"], f["a_hf"])

    def ionization(self) -> IonizationModel:
        i = self.values["ionization"]
        return IonizationModel(i["a_stirap"], i["p_ionize"], i["p_e"], i["p_ion"], i["p_d"])

    def detection(self) -> DetectionModel:
        if self.values["detection"]["model"] == "ionization":
            return self.ionization()
        return self.fluorescence()

    def settings(self) -> ChshSettings:
        c = self.values["chsh"]
        return ChshSettings(c["alpha_deg"], c["alpha_prime_deg"], c["beta_deg"], c["beta_prime_deg"])

    @property
    def k(self) -> float:
        return self.values["chsh"]["k_sigma"]

    @property
    def deviation(self) -> str:
        return self.values["chsh"]["deviation"]

    def cycle(self) -> CycleModel:
        c = self.values["cycle"]
        return CycleModel(
            prep_time=c["prep_time_us"] / 1e6,
            cooling_amortized=amortized_cooling(c["cooling_time_us"] / 1e6, c["cycles_per_cooling"]),
            fiber_length=c["fiber_length_m"],
            fiber_speed_fraction=c["fiber_speed_fraction"],
            occupancy_1=c["occupancy_1"],
            occupancy_2=c["occupancy_2"],
        )

    def timeline(self) -> DetectionTimeline:
        t = self.values["timeline"]
        return DetectionTimeline(
            t["basis_choice_ns"] / 1e9,
            t["stirap_ns"] / 1e9,
            t["decoherence_ns"] / 1e9,
            t["fragment_flight_ns"] / 1e9,
        )

    def validate(self) -> None:
        """Build every model once so that range violations surface at parse time."""
        if set(self.values) != set(SCHEMA) or any(set(self.values[s]) != set(SCHEMA[s]) for s in SCHEMA):
            raise ScenarioError("scenario values do not match the schema")
        builders = {
            "budget": self.budget,
            "link": self.link,
            "state": self.state,
            "fluorescence": self.fluorescence,
            "ionization": self.ionization,
            "chsh": self.settings,
            "cycle": self.cycle,
            "timeline": self.timeline,
        }
        for section, build in builders.items():
            try:
                build()
            except (ValueError, ZeroDivisionError) as exc:
                raise ScenarioError(f"[{section}] {exc}") from exc
        if not self.k > 0:
            raise ScenarioError(f"[chsh] k_sigma={self.k!r} must be positive")
        if self.values["chsh"]["n_events"] <= 0 or self.values["chsh"]["n_events"] % 4:
            raise ScenarioError("[chsh] n_events must be a positive multiple of 4")
        if self.values["cycle"]["cycles_per_cooling"] < 1:
            raise ScenarioError("[cycle] cycles_per_cooling must be >= 1")
        if not self.values["timeline"]["station_distance_m"] > 0:
            raise ScenarioError("[timeline] station_distance_m must be > 0")
        mc = self.values["montecarlo"]
        if mc["events"] <= 0 or mc["events"] % 4:
            raise ScenarioError("[montecarlo] events must be a positive multiple of 4")
        if mc["replicas"] < 0 or mc["workers"] < 1:
            raise ScenarioError("[montecarlo] replicas must be >= 0 and workers >= 1")


def default_scenario() -> Scenario:
    return Scenario(_defaults())


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.fullmatch(r"\[([^\]]+)\]", stripped)
        if header:
            current = header.group(1).strip().lower()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", stripped, re.IGNORECASE):
            return number
    return None


def _convert(section: str, key: str, raw: str, where: str) -> Any:
    parser, _ = SCHEMA[section][key]
    try:
        return parser(raw)
    except ValueError as exc:
        raise ScenarioError(f"{where}[{section}] {key} = {raw!r}: {exc}") from exc


def parse_overrides(assignments: Iterable[str]) -> dict[str, Any]:
    """Parse ``--set key=value`` strings into typed ``{"section.key": value}``."""
    updates = {}
    for item in assignments:
        if "=" not in item:
            raise ScenarioError(f"override {item!r} is not of the form key=value")
        name, raw = item.split("=", 1)
        section, key = resolve_key(name.strip())
        updates[f"{section}.{key}"] = _convert(section, key, raw.strip(), "override: ")
    return updates


def parse_scenario(text: str, overrides: Iterable[str] = ()) -> Scenario:
    """Parse and validate a scenario document; missing keys take defaults."""
    parser = configparser.ConfigParser(interpolation=None, strict=True, default_section="__no_default__")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"parse error: {exc}") from exc

    values = _defaults()
    for section in parser.sections():
        if section not in SCHEMA:
            line = _line_of(text, section, "")
            raise ScenarioError(f"unknown section [{section}]" + (f" (line {line})" if line else ""))
        for key, raw in parser.items(section):
            line = _line_of(text, section, key)
            where = f"line {line}: " if line else ""
            if key not in SCHEMA[section]:
                raise ScenarioError(f"{where}unknown key {key!r} in [{section}]")
            values[section][key] = _convert(section, key, raw, where)

    for name, value in parse_overrides(overrides).items():
        section, key = name.split(".")
        values[section][key] = value
    try:
        return Scenario(values)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def emit_scenario(scenario: Scenario) -> str:
    lines = []
    for section, keys in SCHEMA.items():
        lines.append(f"[{section}]")
        for key in keys:
            lines.append(f"{key} = {_format(scenario.values[section][key])}")
        lines.append("")
    return "\n".join(lines)

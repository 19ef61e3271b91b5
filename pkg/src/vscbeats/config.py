"""TOML run configuration: parsing, validation, and defaults.

A run file holds exactly one parameter block: either natural units

    [params]
    omega_c = 1.0
    omega_d = 0.1
    n_molecules = 10

or an SI description of a Fabry-Perot cavity

    [params.si]
    freq_thz = 1.0
    area_um2 = 1.0
    mass_me = 4000.0
    dipole_e = 1.0
    n_molecules = 10000000

plus an optional [scenario] table (fully_excited / partially_activated) and an
[output] table.  Command-line flags override file values.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .closed_form import InitialConditions
from .errors import ConfigError
from .params import CODATA, CavityGeometry, SystemParams, from_si
from .scenarios import Custom, FullyExcited, PartiallyActivated, ScenarioSpec

DEFAULT_SPAN_BEATS = 2.0
DEFAULT_SAMPLES_PER_PERIOD = 64
VALID_OUTPUTS = ("trajectory", "observables", "phase_space", "energies")


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    scenario: ScenarioSpec
    span_beats: float = DEFAULT_SPAN_BEATS
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD
    outputs: tuple[str, ...] = ("trajectory", "observables")
    seed: int = 0
    output_dir: str = "."
    si_source: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.span_beats > 0:
            raise ConfigError("span_beats must be positive")
        if self.samples_per_period < 4:
            raise ConfigError("samples_per_period must be at least 4")
        for out in self.outputs:
            if out not in VALID_OUTPUTS:
                raise ConfigError(
                    f"output.outputs: unknown entry {out!r} "
                    f"(valid: {', '.join(VALID_OUTPUTS)})")


def _expect(table: dict, key: str, kind, path: str, default=None):
    if key not in table:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}: missing required key")
    value = table[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(
            f"{path}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _check_keys(table: dict, allowed, path: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _params_from_tables(raw: dict) -> tuple[SystemParams, dict | None]:
    table = raw.get("params")
    if table is None:
        raise ConfigError("params: missing table")
    if not isinstance(table, dict):
        raise ConfigError("params: expected a table")
    si = table.get("si")
    natural_keys = [k for k in table if k != "si"]
    if si is not None and natural_keys:
        raise ConfigError(
            f"params.{natural_keys[0]}: natural-unit keys cannot be combined "
            "with the params.si block (exactly one parameterization)")
    if si is None and not natural_keys:
        raise ConfigError("params: provide natural-unit keys or a params.si block")

    if si is not None:
        _check_keys(si, {"freq_thz", "area_um2", "mass_me", "dipole_e",
                         "n_molecules", "vib_freq_thz"}, "params.si")
        freq = _expect(si, "freq_thz", float, "params.si")
        area = _expect(si, "area_um2", float, "params.si")
        mass_me = _expect(si, "mass_me", float, "params.si")
        dipole_e = _expect(si, "dipole_e", float, "params.si")
        n = _expect(si, "n_molecules", int, "params.si")
        vib = si.get("vib_freq_thz")
        geometry = CavityGeometry.from_frequency(
            area * 1e-12, 2.0 * math.pi * freq * 1e12, CODATA)
        params = from_si(CODATA, geometry, freq, mass_me, dipole_e, n,
                         vib_freq_thz=vib)
        return params, dict(si)

    _check_keys(table, {"omega_v", "omega_c", "omega_d", "n_molecules",
                        "mass", "x0"}, "params")
    return SystemParams(
        omega_v=_expect(table, "omega_v", float, "params", default=1.0),
        omega_c=_expect(table, "omega_c", float, "params", default=1.0),
        omega_d=_expect(table, "omega_d", float, "params"),
        n_molecules=_expect(table, "n_molecules", int, "params"),
        mass=_expect(table, "mass", float, "params", default=1.0),
        x0=_expect(table, "x0", float, "params", default=1.0),
    ), None


def _scenario_from_table(raw: dict, n: int, seed: int) -> ScenarioSpec:
    table = raw.get("scenario", {})
    if not isinstance(table, dict):
        raise ConfigError("scenario: expected a table")
    kind = _expect(table, "kind", str, "scenario", default="fully_excited")
    if kind == "fully_excited":
        _check_keys(table, {"kind", "x0", "velocity_scale"}, "scenario")
        return ScenarioSpec(FullyExcited(
            x0=_expect(table, "x0", float, "scenario", default=1.0),
            velocity_scale=_expect(table, "velocity_scale", float, "scenario",
                                   default=0.0),
            seed=seed), n)
    if kind == "partially_activated":
        _check_keys(table, {"kind", "x0", "beta"}, "scenario")
        return ScenarioSpec(PartiallyActivated(
            beta=_expect(table, "beta", float, "scenario"),
            x0=_expect(table, "x0", float, "scenario", default=1.0)), n)
    if kind == "custom":
        _check_keys(table, {"kind", "displacements", "velocities",
                            "cavity_q", "cavity_qdot"}, "scenario")
        ic = InitialConditions(
            displacements=_expect(table, "displacements", list, "scenario"),
            velocities=_expect(table, "velocities", list, "scenario"),
            cavity_q=_expect(table, "cavity_q", float, "scenario", default=0.0),
            cavity_qdot=_expect(table, "cavity_qdot", float, "scenario",
                                default=0.0))
        return ScenarioSpec(Custom(ic), n)
    raise ConfigError(f"scenario.kind: unknown kind {kind!r}")


def parse_config(raw: dict) -> RunConfig:
    """Validate a parsed TOML document into a RunConfig."""
    _check_keys(raw, {"params", "scenario", "output", "span_beats",
                      "samples_per_period", "seed"}, "<root>")
    seed = _expect(raw, "seed", int, "<root>", default=0)
    params, si_source = _params_from_tables(raw)
    scenario = _scenario_from_table(raw, params.n_molecules, seed)
    out = raw.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output: expected a table")
    _check_keys(out, {"directory", "outputs"}, "output")
    outputs = out.get("outputs", ["trajectory", "observables"])
    if not isinstance(outputs, list) or not all(isinstance(o, str)
                                                for o in outputs):
        raise ConfigError("output.outputs: expected a list of strings")
    return RunConfig(
        params=params,
        scenario=scenario,
        span_beats=_expect(raw, "span_beats", float, "<root>",
                           default=DEFAULT_SPAN_BEATS),
        samples_per_period=_expect(raw, "samples_per_period", int, "<root>",
                                   default=DEFAULT_SAMPLES_PER_PERIOD),
        outputs=tuple(outputs),
        seed=seed,
        output_dir=_expect(out, "directory", str, "output", default="."),
        si_source=si_source,
    )


def load_config(path: str) -> RunConfig:
    """Parse and validate a TOML run file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}")
    return parse_config(raw)

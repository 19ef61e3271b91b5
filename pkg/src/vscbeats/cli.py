"""Command-line interface.

Subcommands: derive, simulate, sweep, phase-space, verify, figures.
Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__, closed_form, oracle, output, scenarios, verification
from .config import (
    DEFAULT_SAMPLES_PER_PERIOD,
    DEFAULT_SPAN_BEATS,
    RunConfig,
    load_config,
)
from .errors import (
    ConfigError,
    InsufficientSpan,
    InvalidIndex,
    InvalidInitialConditions,
    InvalidInput,
    InvalidParameter,
    MissingMomenta,
    NumericalDivergence,
    StepSizeTooLarge,
    TooLargeForDense,
    VscBeatsError,
)
from .params import SystemParams, classify_regime, derive
from .scenarios import (
    Custom,
    FullyExcited,
    Measure,
    PartiallyActivated,
    ScenarioSpec,
    SweepSpec,
)

USAGE_ERRORS = (ConfigError, InvalidParameter, InvalidInput,
                InvalidInitialConditions, InvalidIndex)
NUMERICAL_ERRORS = (NumericalDivergence, StepSizeTooLarge, TooLargeForDense,
                    InsufficientSpan, MissingMomenta)


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--omega-v", type=float, default=1.0,
                   help="bare vibrational frequency (default 1.0)")
    p.add_argument("--omega", "--omega-c", dest="omega_c", type=float,
                   default=1.0, help="cavity frequency (default 1.0)")
    p.add_argument("--omega-d", type=float, required=False,
                   help="diamagnetic (coupling) frequency")
    p.add_argument("--n", type=int, default=10, help="number of molecules")
    p.add_argument("--mass", type=float, default=1.0, help="molecular mass")
    p.add_argument("--x0", type=float, default=1.0,
                   help="displacement scale (default 1.0)")


def _params_from_args(args) -> SystemParams:
    if args.omega_d is None:
        raise InvalidParameter("--omega-d is required")
    return SystemParams(omega_v=args.omega_v, omega_c=args.omega_c,
                        omega_d=args.omega_d, n_molecules=args.n,
                        mass=args.mass, x0=args.x0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vscbeats",
                     description="Collective cavity-vibration dynamics: "
                                 "polariton spectra, beats, and verification")
    parser.add_argument("--version", action="version",
                        version=f"vscbeats {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print derived spectral quantities")
    _add_param_flags(p)

    p = sub.add_parser("simulate", help="run one scenario, write trajectory "
                                        "and observables")
    _add_param_flags(p)
    p.add_argument("--config", help="TOML run file (flags override)")
    p.add_argument("--scenario", choices=["fully_excited",
                                          "partially_activated"],
                   default=None)
    p.add_argument("--beta", type=float, default=0.2,
                   help="activation ratio for partially_activated")
    p.add_argument("--velocity-scale", type=float, default=0.0,
                   help="velocity spread for fully_excited, in x0*omega_v")
    p.add_argument("--span", type=float, default=None,
                   help="time span in beat periods (default 2)")
    p.add_argument("--sampling", type=int, default=None,
                   help="samples per bare period (default 64)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--molecules", default=None,
                   help="comma list of 1-based molecule indices to store "
                        "(default: first three)")
    p.add_argument("--engine", choices=["closed-form", "oracle"],
                   default="closed-form",
                   help="closed-form evaluation or brute-force integration")
    p.add_argument("--steps-per-period", type=int, default=200,
                   help="oracle engine: leapfrog steps per upper-polariton "
                        "period")
    p.add_argument("--svg", action="store_true",
                   help="also write an SVG quick-look plot")

    p = sub.add_parser("sweep", help="detuning sweep of beat quantities")
    _add_param_flags(p)
    p.add_argument("--grid", default="0.5:2.0:151",
                   help="omega_c/omega_v grid, start:stop:count or comma list")
    p.add_argument("--measure", choices=[m.value for m in Measure],
                   default="analytic")
    p.add_argument("--scenario", choices=["fully_excited",
                                          "partially_activated"],
                   default="fully_excited")
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", default=".")
    p.add_argument("--svg", action="store_true")

    p = sub.add_parser("phase-space", help="sampled phase-space points of one "
                                           "molecule plus uncoupled reference")
    _add_param_flags(p)
    p.add_argument("--molecule", type=int, default=1,
                   help="1-based molecule index (default 1)")
    p.add_argument("--velocity-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--span", type=float, default=1.0,
                   help="span in beat periods")
    p.add_argument("--sampling", type=int, default=None)
    p.add_argument("--output-dir", default=".")

    p = sub.add_parser("verify", help="run the closed-form-vs-oracle and "
                                      "spectral verification suite")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--quick", action="store_true")

    p = sub.add_parser("figures", help="emit the datasets behind the standard "
                                       "figure set")
    p.add_argument("--fig", required=True,
                   choices=["1a", "1b", "1c", "1d", "2a", "2b",
                            "2c", "2d", "2e", "3a", "3b"])
    p.add_argument("--coupling", default=None,
                   help="comma list of omega_d/omega_v values overriding the "
                        "preset")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--velocity-scale", type=float, default=1.0)
    p.add_argument("--output-dir", default=".")
    p.add_argument("--svg", action="store_true")
    return parser


def _parse_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        pieces = text.split(":")
        if len(pieces) != 3:
            raise InvalidInput(f"grid {text!r} is not start:stop:count")
        start, stop, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
        if count < 2:
            raise InvalidInput("grid count must be at least 2")
        return tuple(np.linspace(start, stop, count).tolist())
    return tuple(float(v) for v in text.split(","))


def _parse_molecule_list(text: str | None, n: int) -> list[int]:
    if text is None:
        return list(range(min(n, 3)))
    indices = []
    for piece in text.split(","):
        one_based = int(piece)
        if not 1 <= one_based <= n:
            raise InvalidInput(f"molecule index {one_based} outside 1..{n}")
        indices.append(one_based - 1)
    return indices


def cmd_derive(args) -> int:
    params = _params_from_args(args)
    coupling = derive(params)
    rows = [
        ("g", coupling.g),
        ("omega_bar_sq", coupling.omega_bar_sq),
        ("alpha", coupling.alpha),
        ("mixing", coupling.mixing),
        ("omega_plus", coupling.omega_plus),
        ("omega_minus", coupling.omega_minus),
        ("gap", coupling.gap),
        ("sum_freq", coupling.sum_freq),
        ("vrs", coupling.vrs),
        ("vrs_printed", coupling.vrs_printed),
        ("beat_period", coupling.beat_period),
    ]
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {output.format_float(value)}")
    print(f"{'regime':<{width}}  "
          f"{classify_regime(coupling, params).value}")
    return 0


def _config_from_args(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
        params = cfg.params
        scenario = cfg.scenario
        span = cfg.span_beats
        sampling = cfg.samples_per_period
        seed = cfg.seed
        outdir = cfg.output_dir
    else:
        params = _params_from_args(args)
        scenario = None
        span, sampling, seed, outdir = (DEFAULT_SPAN_BEATS,
                                        DEFAULT_SAMPLES_PER_PERIOD, 0, ".")
    # flag overrides
    if args.seed is not None:
        seed = args.seed
    if args.span is not None:
        span = args.span
    if args.sampling is not None:
        sampling = args.sampling
    if args.output_dir is not None:
        outdir = args.output_dir
    if scenario is None or args.scenario is not None:
        kind_name = args.scenario or "fully_excited"
        if kind_name == "fully_excited":
            kind = FullyExcited(x0=params.x0,
                                velocity_scale=args.velocity_scale, seed=seed)
        else:
            kind = PartiallyActivated(beta=args.beta, x0=params.x0)
        scenario = ScenarioSpec(kind, params.n_molecules)
    elif isinstance(scenario.kind, FullyExcited) \
            and scenario.kind.seed != seed:
        scenario = ScenarioSpec(replace(scenario.kind, seed=seed),
                                scenario.n_molecules)
    return RunConfig(params=params, scenario=scenario, span_beats=span,
                     samples_per_period=sampling, outputs=("trajectory",
                                                           "observables"),
                     seed=seed, output_dir=outdir)


def _scenario_text(scenario: ScenarioSpec) -> str:
    kind = scenario.kind
    if isinstance(kind, FullyExcited):
        return (f"fully_excited x0={output.format_float(kind.x0)} "
                f"velocity_scale={output.format_float(kind.velocity_scale)}")
    if isinstance(kind, PartiallyActivated):
        return (f"partially_activated beta={output.format_float(kind.beta)} "
                f"x0={output.format_float(kind.x0)}")
    return "custom"


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    params = cfg.params
    coupling = derive(params)
    ic = scenarios.build_initial_conditions(cfg.scenario, params.omega_v)
    stored = _parse_molecule_list(getattr(args, "molecules", None),
                                  params.n_molecules)
    t_end = cfg.span_beats * coupling.beat_period

    if args.engine == "oracle":
        traj = oracle.integrate(ic, params, coupling, t_end,
                                steps_per_period=args.steps_per_period,
                                samples_per_period=cfg.samples_per_period,
                                store="all")
    else:
        modes = closed_form.fit_polariton_modes(ic, params, coupling)
        times = scenarios.default_times(coupling, params, cfg.span_beats,
                                        cfg.samples_per_period)
        traj = closed_form.evaluate_trajectory(modes, params, coupling, times,
                                               store="all")

    excited = None
    if isinstance(cfg.scenario.kind, PartiallyActivated):
        excited = range(scenarios.excited_prefix_size(cfg.scenario))
    elif isinstance(cfg.scenario.kind, FullyExcited):
        excited = range(params.n_molecules)
    obs = scenarios.compute_observables(traj, params, coupling,
                                        excited_set=excited)

    header = output.header_lines(
        __version__, cfg.seed, output.params_text(params),
        {"scenario": _scenario_text(cfg.scenario), "engine": args.engine,
         "span_beats": output.format_float(cfg.span_beats),
         "samples_per_period": cfg.samples_per_period})
    columns = {"t": traj.times, "X": traj.collective_x, "q": traj.cavity_q}
    for i in stored:
        columns[f"x_{i + 1}"] = traj.locals[i]
    for i in stored:
        columns[f"v_{i + 1}"] = traj.local_velocities[i]
    traj_path = os.path.join(cfg.output_dir, "trajectory.csv")
    output.write_csv(traj_path, header, columns)

    payload = {
        "derived": {
            "g": coupling.g, "mixing": coupling.mixing,
            "omega_plus": coupling.omega_plus,
            "omega_minus": coupling.omega_minus,
            "gap": coupling.gap, "vrs": coupling.vrs,
            "beat_period": coupling.beat_period,
            "regime": coupling.regime.value,
        },
        "observables": {
            "beat_period_analytic": obs.beat_period_analytic,
            "beat_period_measured": obs.beat_period_measured,
            "envelope_min": obs.envelope_min,
            "envelope_max": obs.envelope_max,
        },
    }
    if obs.energy_partition is not None:
        energy_path = os.path.join(cfg.output_dir, "energies.csv")
        e = obs.energy_partition
        output.write_csv(energy_path, header,
                         {"t": e.times, "excited": e.excited,
                          "ground": e.ground, "cavity": e.cavity,
                          "total": e.total})
        payload["observables"]["energy_total_initial"] = float(e.total[0])
        payload["observables"]["energy_total_drift"] = float(
            np.max(np.abs(e.total - e.total[0])))
    obs_path = os.path.join(cfg.output_dir, "observables.json")
    output.write_json(obs_path, header, payload)

    if args.svg:
        output.write_svg(os.path.join(cfg.output_dir, "trajectory.svg"),
                         "collective coordinate", traj.times,
                         {"X": traj.collective_x, "q": traj.cavity_q})
    print(f"wrote {traj_path} and {obs_path}")
    return 0


def cmd_sweep(args) -> int:
    params = _params_from_args(args)
    grid = _parse_grid(args.grid)
    if args.scenario == "fully_excited":
        kind = FullyExcited(x0=params.x0, velocity_scale=0.0, seed=args.seed)
    else:
        kind = PartiallyActivated(beta=args.beta, x0=params.x0)
    sweep = SweepSpec(detuning_grid=grid, omega_d=params.omega_d,
                      scenario=ScenarioSpec(kind, params.n_molecules),
                      measure=Measure(args.measure))
    rows = scenarios.detuning_sweep(sweep, params)
    header = output.header_lines(
        __version__, args.seed, output.params_text(params),
        {"scenario": _scenario_text(sweep.scenario),
         "measure": args.measure})
    nan = float("nan")
    columns = {
        "omega_ratio": np.array([r.omega_ratio for r in rows]),
        "gap": np.array([r.gap for r in rows]),
        "period_analytic": np.array([r.period_analytic for r in rows]),
        "period_measured": np.array(
            [nan if r.period_measured is None else r.period_measured
             for r in rows]),
        "envelope_min": np.array(
            [nan if r.envelope_min is None else r.envelope_min for r in rows]),
    }
    path = os.path.join(args.output_dir, "sweep.csv")
    output.write_csv(path, header, columns)
    status_path = os.path.join(args.output_dir, "sweep_status.csv")
    with open(status_path, "w", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("omega_ratio,status\n")
        for r in rows:
            fh.write(f"{output.format_float(r.omega_ratio)},{r.status}\n")
    if args.svg:
        output.write_svg(os.path.join(args.output_dir, "sweep.svg"),
                         "beat period vs detuning",
                         columns["omega_ratio"],
                         {"T_analytic": columns["period_analytic"]})
    print(f"wrote {path}")
    return 0


def cmd_phase_space(args) -> int:
    params = _params_from_args(args)
    coupling = derive(params)
    spec = ScenarioSpec(FullyExcited(x0=params.x0,
                                     velocity_scale=args.velocity_scale,
                                     seed=args.seed), params.n_molecules)
    ic = scenarios.build_initial_conditions(spec, params.omega_v)
    modes = closed_form.fit_polariton_modes(ic, params, coupling)
    times = scenarios.default_times(coupling, params, span_beats=args.span,
                                    samples_per_period=args.sampling or 64)
    index = args.molecule - 1
    if not 0 <= index < params.n_molecules:
        raise InvalidIndex(f"molecule {args.molecule} outside 1..{params.n_molecules}")
    traj = closed_form.evaluate_trajectory(modes, params, coupling, times,
                                           store=[index])
    points = scenarios.phase_space_samples(traj, params, index, times)
    reference = scenarios.uncoupled_phase_circle(
        float(ic.displacements[index]), float(ic.velocities[index]),
        params, times)
    header = output.header_lines(
        __version__, args.seed, output.params_text(params),
        {"molecule": args.molecule,
         "velocity_scale": output.format_float(args.velocity_scale)})
    path = os.path.join(args.output_dir, "phase_space.csv")
    output.write_csv(path, header, {
        "t": times, "x": points[:, 0], "p_scaled": points[:, 1],
        "x_uncoupled": reference[:, 0], "p_scaled_uncoupled": reference[:, 1],
    })
    print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    results = verification.run_checks(n=args.n, quick=args.quick)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


def _figure_series(fig: str, couplings, n: int, seed: int,
                   velocity_scale: float):
    """Closed-form datasets behind the standard figures; local solutions do
    not depend on N."""
    datasets = {}
    if fig in ("1a", "1b", "1c"):
        ratio = 1.2 if fig == "1c" else 1.0
        spans = {"1a": None, "1b": 8.0 * 2 * math.pi, "1c": None}
        for wd in couplings:
            params = SystemParams.natural(omega_d=wd, n_molecules=n,
                                          omega_c=ratio)
            coupling = derive(params)
            t_end = spans[fig] or 1.2 * coupling.beat_period
            times = np.arange(0, t_end, 2 * math.pi / 64)
            lam2 = coupling.mixing ** 2
            xnorm = (lam2 * np.cos(coupling.omega_plus * times)
                     + np.cos(coupling.omega_minus * times)) / (lam2 + 1)
            datasets[f"X_norm_wd{wd:g}"] = (times, xnorm)
    elif fig == "1d":
        grid = np.linspace(0.5, 2.0, 301)
        for wd in couplings:
            periods = 4 * math.pi / np.sqrt((grid - 1.0) ** 2 + wd * wd)
            datasets[f"T_wd{wd:g}"] = (grid, periods)
    elif fig in ("2a", "2b"):
        wd = couplings[0] if couplings else (0.07 if fig == "2a" else 0.5)
        params = SystemParams.natural(omega_d=wd, n_molecules=n)
        coupling = derive(params)
        spec = ScenarioSpec(FullyExcited(velocity_scale=velocity_scale,
                                         seed=seed), n)
        ic = scenarios.build_initial_conditions(spec, params.omega_v)
        modes = closed_form.fit_polariton_modes(ic, params, coupling)
        t_end = 1.2 * coupling.beat_period if fig == "2a" else 8.0 * 2 * math.pi
        times = np.arange(0, t_end, 2 * math.pi / 64)
        traj = closed_form.evaluate_trajectory(modes, params, coupling, times,
                                               store=[0, 1, 2])
        for i in range(3):
            datasets[f"x_{i + 1}"] = (times, traj.locals[i])
    elif fig in ("2c", "2d", "2e"):
        wd = couplings[0] if couplings else 0.07
        params = SystemParams.natural(omega_d=wd, n_molecules=n)
        coupling = derive(params)
        spec = ScenarioSpec(FullyExcited(velocity_scale=velocity_scale,
                                         seed=seed), n)
        ic = scenarios.build_initial_conditions(spec, params.omega_v)
        modes = closed_form.fit_polariton_modes(ic, params, coupling)
        centers = {"2c": 5.0, "2d": 25.0, "2e": coupling.beat_period / 4.0}
        center = centers[fig] / params.omega_v
        window = 2 * math.pi / params.omega_v
        times = np.arange(max(0.0, center - window), center + window,
                          2 * math.pi / 256)
        traj = closed_form.evaluate_trajectory(modes, params, coupling, times,
                                               store=[0, 1, 2])
        for i in range(3):
            pts = scenarios.phase_space_samples(traj, params, i, times)
            datasets[f"x_{i + 1}"] = (times, pts[:, 0])
            datasets[f"p_scaled_{i + 1}"] = (times, pts[:, 1])
        ref = scenarios.uncoupled_phase_circle(
            float(ic.displacements[0]), float(ic.velocities[0]), params, times)
        datasets["x_uncoupled"] = (times, ref[:, 0])
        datasets["p_scaled_uncoupled"] = (times, ref[:, 1])
    elif fig in ("3a", "3b"):
        wd = couplings[0] if couplings else (0.07 if fig == "3a" else 0.35)
        params = SystemParams.natural(omega_d=wd, n_molecules=n)
        coupling = derive(params)
        t_end = 1.2 * coupling.beat_period
        times = np.arange(0, t_end, 2 * math.pi / 64)
        for beta in (0.05, 0.2):
            excited, ground = closed_form.partially_activated_local(
                params, coupling, beta, times)
            datasets[f"excited_beta{beta:g}"] = (times, excited)
            datasets[f"ground_beta{beta:g}"] = (times, ground)
    return datasets


FIGURE_PRESETS = {
    "1a": (0.05, 0.005), "1b": (0.5, 0.05), "1c": (0.5, 0.05),
    "1d": (0.02, 0.2), "2a": (0.07,), "2b": (0.5,), "2c": (0.07,),
    "2d": (0.07,), "2e": (0.07,), "3a": (0.07,), "3b": (0.35,),
}


def cmd_figures(args) -> int:
    if args.coupling:
        couplings = tuple(float(v) for v in args.coupling.split(","))
    else:
        couplings = FIGURE_PRESETS[args.fig]
    datasets = _figure_series(args.fig, couplings, args.n, args.seed,
                              args.velocity_scale)
    header = output.header_lines(
        __version__, args.seed,
        f"figure={args.fig} couplings={','.join(f'{c:g}' for c in couplings)}",
        {"n": args.n,
         "velocity_scale": output.format_float(args.velocity_scale)})
    # figures share one x-grid per dataset file when grids differ in length
    path = os.path.join(args.output_dir, f"fig{args.fig}.csv")
    names = list(datasets)
    grids = {name: datasets[name][0] for name in names}
    lengths = {len(g) for g in grids.values()}
    if len(lengths) == 1 and all(
            np.array_equal(grids[names[0]], grids[n2]) for n2 in names[1:]):
        columns = {"x": grids[names[0]]}
        for name in names:
            columns[name] = datasets[name][1]
        output.write_csv(path, header, columns)
        if args.svg:
            output.write_svg(os.path.join(args.output_dir,
                                          f"fig{args.fig}.svg"),
                             f"figure {args.fig}", columns["x"],
                             {k: v for k, v in columns.items() if k != "x"})
    else:
        columns = {}
        for name in names:
            columns[f"x_{name}"] = datasets[name][0]
            columns[name] = datasets[name][1]
        length = max(len(v) for v in columns.values())
        padded = {}
        for key, value in columns.items():
            if len(value) < length:
                pad = np.full(length - len(value), np.nan)
                padded[key] = np.concatenate([value, pad])
            else:
                padded[key] = value
        output.write_csv(path, header, padded)
    print(f"wrote {path}")
    return 0


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        command = {
            "derive": cmd_derive,
            "simulate": cmd_simulate,
            "sweep": cmd_sweep,
            "phase-space": cmd_phase_space,
            "verify": cmd_verify,
            "figures": cmd_figures,
        }[args.command]
        return command(args)
    except SystemExit as exc:
        code = exc.code
        return 0 if code is None else int(code)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except VscBeatsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()

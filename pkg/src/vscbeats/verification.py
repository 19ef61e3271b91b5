"""Self-contained verification checks pitting the two routes against each other.

Each check returns a CheckResult; the CLI `verify` subcommand prints one
PASS/FAIL line per check and maps any failure to exit code 3.  Thresholds here
follow the integrator error laws documented in :mod:`vscbeats.oracle`: position
error ~ W*t*(W*dt)^2/24 and bounded energy oscillation (W*dt)^2/4, with a
safety factor of a few.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_form, oracle, scenarios
from .params import SystemParams, derive

__all__ = ["CheckResult", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _spectral_equivalence(sizes) -> CheckResult:
    worst = 0.0
    for n in sizes:
        params = SystemParams.natural(omega_d=0.1, n_molecules=n)
        coupling = derive(params)
        spectrum = oracle.hessian_spectrum(params, coupling)
        freqs = spectrum.frequencies
        expected_extremes = (coupling.omega_minus, coupling.omega_plus)
        rel = max(abs(freqs[0] - expected_extremes[0]) / expected_extremes[0],
                  abs(freqs[-1] - expected_extremes[1]) / expected_extremes[1])
        worst = max(worst, rel)
        if spectrum.multiplicity_v != n - 1:
            return CheckResult(
                "spectral-equivalence", False,
                f"N={n}: {spectrum.multiplicity_v} bare modes, expected {n - 1}")
    ok = worst < 1e-9
    return CheckResult("spectral-equivalence", ok,
                       f"extremes match polaritons to {worst:.2e} "
                       f"(N in {list(sizes)})")


def _ehrenfest(n: int, steps_per_period: int, span_beats: float) -> CheckResult:
    params = SystemParams.natural(omega_d=0.1, n_molecules=n)
    coupling = derive(params)
    spec = scenarios.ScenarioSpec(
        scenarios.FullyExcited(velocity_scale=0.3, seed=11), n)
    ic = scenarios.build_initial_conditions(spec, params.omega_v)
    t_end = span_beats * coupling.beat_period
    traj_o = oracle.integrate(ic, params, coupling, t_end,
                              steps_per_period=steps_per_period)
    modes = closed_form.fit_polariton_modes(ic, params, coupling)
    traj_c = closed_form.evaluate_trajectory(modes, params, coupling,
                                             traj_o.times)
    err = max(float(np.max(np.abs(traj_o.locals[i] - traj_c.locals[i])))
              for i in range(n))
    theta = 2.0 * math.pi / steps_per_period
    budget = 4.0 * coupling.omega_plus * t_end * theta * theta / 24.0 \
        * params.x0
    ok = err < budget
    return CheckResult(
        "closed-form-vs-brute-force", ok,
        f"max |x_closed - x_oracle| = {err:.2e} x0 "
        f"(budget {budget:.2e}, K={steps_per_period}, span {span_beats}T, N={n})")


def _energy_drift(n: int, steps_per_period: int,
                  span_beats: float) -> CheckResult:
    params = SystemParams.natural(omega_d=0.1, n_molecules=n)
    coupling = derive(params)
    ic = scenarios.build_initial_conditions(
        scenarios.ScenarioSpec(scenarios.FullyExcited(), n), params.omega_v)
    t_end = span_beats * coupling.beat_period
    traj = oracle.integrate(ic, params, coupling, t_end,
                            steps_per_period=steps_per_period)
    energies = scenarios.energy_partition(traj, params, coupling.g,
                                          excited_set=range(n))
    drift = float(np.max(np.abs(energies.total - energies.total[0]))
                  / energies.total[0])
    theta = 2.0 * math.pi / steps_per_period
    budget = 0.5 * theta * theta  # 2x the (W dt)^2/4 oscillation bound
    ok = drift < budget
    return CheckResult(
        "energy-conservation", ok,
        f"relative drift {drift:.2e} over {span_beats}T "
        f"(budget {budget:.2e}, K={steps_per_period})")


def _time_reversal(n: int) -> CheckResult:
    params = SystemParams.natural(omega_d=0.1, n_molecules=n)
    coupling = derive(params)
    ic = scenarios.build_initial_conditions(
        scenarios.ScenarioSpec(
            scenarios.FullyExcited(velocity_scale=0.5, seed=5), n),
        params.omega_v)
    state0 = oracle.FullState.from_initial_conditions(ic, params)
    dt = 2.0 * math.pi / (coupling.omega_plus * 200)
    t_end = 40.0 / params.omega_v
    fwd = oracle.propagate(state0.copy(), params, coupling.g, t_end, dt)
    fwd.p = -fwd.p
    fwd.p_q = -fwd.p_q
    back = oracle.propagate(fwd, params, coupling.g, t_end, dt)
    err = max(float(np.max(np.abs(back.x - state0.x))),
              abs(back.q - state0.q))
    ok = err < 1e-6 * params.x0
    return CheckResult("time-reversal", ok,
                       f"return error {err:.2e} x0 after momentum flip")


def _gap_identities() -> CheckResult:
    worst = 0.0
    for ratio in np.linspace(0.5, 2.0, 200):
        params = SystemParams.natural(omega_d=0.1, n_molecules=10,
                                      omega_c=float(ratio))
        c = derive(params)
        wv, wc, wd = params.omega_v, params.omega_c, params.omega_d
        gap_law = math.sqrt((wc - wv) ** 2 + wd * wd)
        worst = max(
            worst,
            abs(c.omega_plus * c.omega_minus - wc * wv) / (wc * wv),
            abs(c.omega_plus ** 2 + c.omega_minus ** 2
                - (wv * wv + wc * wc + wd * wd))
            / (wv * wv + wc * wc + wd * wd),
            abs(c.gap - gap_law) / gap_law,
        )
    ok = worst < 1e-12
    return CheckResult("spectral-identities", ok,
                       f"product/trace/gap laws hold to {worst:.2e} "
                       "on 200-point detuning grid")


def _mode_fit_roundtrip(n: int) -> CheckResult:
    params = SystemParams.natural(omega_d=0.15, n_molecules=n, omega_c=1.1)
    coupling = derive(params)
    rng = np.random.default_rng(7)
    ic = closed_form.InitialConditions(
        displacements=rng.normal(size=n), velocities=rng.normal(size=n),
        cavity_q=0.3, cavity_qdot=-0.2)
    modes = closed_form.fit_polariton_modes(ic, params, coupling)
    traj = closed_form.evaluate_trajectory(modes, params, coupling,
                                           np.array([0.0, 1.0]))
    scale = float(np.max(np.abs(ic.displacements)))
    err = max(
        float(np.max(np.abs(
            np.array([traj.locals[i][0] for i in range(n)])
            - ic.displacements))),
        float(np.max(np.abs(
            np.array([traj.local_velocities[i][0] for i in range(n)])
            - ic.velocities))),
        abs(float(traj.cavity_q[0]) - ic.cavity_q),
        abs(float(traj.cavity_qdot[0]) - ic.cavity_qdot),
    )
    ok = err < 1e-10 * scale
    return CheckResult("mode-fit-roundtrip", ok,
                       f"t=0 reconstruction error {err:.2e} (N={n})")


def _beat_period(n: int) -> CheckResult:
    params = SystemParams.natural(omega_d=0.1, n_molecules=n)
    coupling = derive(params)
    ic = scenarios.build_initial_conditions(
        scenarios.ScenarioSpec(scenarios.FullyExcited(), n), params.omega_v)
    modes = closed_form.fit_polariton_modes(ic, params, coupling)
    times = scenarios.default_times(coupling, params, span_beats=2.0)
    traj = closed_form.evaluate_trajectory(modes, params, coupling, times,
                                           store=None)
    measured = scenarios.measure_beating_period(traj, params)
    rel = abs(measured - coupling.beat_period) / coupling.beat_period
    ok = rel < 0.02
    return CheckResult("beat-period", ok,
                       f"measured {measured:.3f} vs 4*pi/gap = "
                       f"{coupling.beat_period:.3f} ({rel * 100:.2f}%)")


def run_checks(n: int = 5, quick: bool = True) -> list[CheckResult]:
    """Run the verification suite; `quick` trades span/steps for runtime."""
    n = max(2, n)
    if quick:
        ehrenfest = _ehrenfest(n=max(4, n), steps_per_period=2000,
                               span_beats=1.0)
        drift = _energy_drift(n=max(4, n), steps_per_period=2000,
                              span_beats=1.0)
    else:
        ehrenfest = _ehrenfest(n=20, steps_per_period=8000, span_beats=2.0)
        drift = _energy_drift(n=20, steps_per_period=8000, span_beats=2.0)
    return [
        _spectral_equivalence((2, n, 50)),
        _gap_identities(),
        _mode_fit_roundtrip(max(3, n)),
        ehrenfest,
        drift,
        _time_reversal(max(4, n)),
        _beat_period(max(4, n)),
    ]

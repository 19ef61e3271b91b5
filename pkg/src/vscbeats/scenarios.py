"""Named initial conditions, beat observables, energy partition, and sweeps.

The beat period is measured blindly (no knowledge of the polariton gap): a
sliding-window maximum of |signal| over three bare periods builds an envelope,
the envelope's below-threshold valleys locate the beat nodes, and the period is
twice the spacing of the first two nodes (nodes sit at T/4, 3T/4, ...).  The
node position within each valley is refined by the centroid of the threshold
deficit, which is symmetric around the true node.

Envelope depth is a different problem: a windowed maximum cannot resolve a
floor much smaller than (window * gap / 2), so the minimum is instead obtained
by least-squares extraction of the two tones at the known polariton
frequencies; a two-tone signal's envelope oscillates between |A+| + |A-| and
||A+| - |A-||.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .closed_form import (
    InitialConditions,
    Trajectory,
    evaluate_trajectory,
    fit_polariton_modes,
)
from .errors import (
    EmptyExcitedSetWarning,
    InsufficientSpan,
    InvalidIndex,
    InvalidInput,
    InvalidParameter,
    MissingMomenta,
)
from .params import DerivedCoupling, SystemParams, derive

__all__ = [
    "FullyExcited", "PartiallyActivated", "Custom", "ScenarioSpec",
    "Measure", "SweepSpec", "SweepRow", "EnergySeries", "Observables",
    "build_initial_conditions", "measure_beating_period", "envelope_extrema",
    "energy_partition", "phase_space_samples", "uncoupled_phase_circle",
    "detuning_sweep", "period_curve_fwhm", "compute_observables",
]

ENVELOPE_WINDOW_PERIODS = 3.0   # sliding-max width, in bare periods
MIN_BEAT_CONTRAST = 0.1         # reject period measurement below this modulation


@dataclass(frozen=True)
class FullyExcited:
    """All bonds stretched by x0; velocities drawn uniformly then mean-subtracted."""

    x0: float = 1.0
    velocity_scale: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class PartiallyActivated:
    """First floor(beta*N) molecules stretched by x0, everything else at rest."""

    beta: float
    x0: float = 1.0


@dataclass(frozen=True)
class Custom:
    """Pass explicit initial conditions through unchanged."""

    ic: InitialConditions


@dataclass(frozen=True)
class ScenarioSpec:
    kind: FullyExcited | PartiallyActivated | Custom
    n_molecules: int

    def __post_init__(self):
        if self.n_molecules < 1:
            raise InvalidParameter("n_molecules must be at least 1")
        if isinstance(self.kind, Custom) \
                and self.kind.ic.n_molecules != self.n_molecules:
            raise InvalidParameter("custom initial conditions have wrong length")


class Measure(enum.Enum):
    ANALYTIC = "analytic"
    FROM_TRAJECTORY = "from_trajectory"
    BOTH = "both"


@dataclass(frozen=True)
class SweepSpec:
    """Detuning sweep: omega_c/omega_v grid at fixed diamagnetic frequency."""

    detuning_grid: tuple[float, ...]
    omega_d: float
    scenario: ScenarioSpec
    measure: Measure = Measure.ANALYTIC

    def __post_init__(self):
        grid = tuple(float(g) for g in self.detuning_grid)
        object.__setattr__(self, "detuning_grid", grid)
        if not grid:
            raise InvalidParameter("detuning grid is empty")
        if any(g <= 0 for g in grid):
            raise InvalidParameter("detuning grid values must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidParameter("detuning grid must be strictly increasing")
        if not self.omega_d > 0:
            raise InvalidParameter("omega_d must be positive")


@dataclass(frozen=True)
class SweepRow:
    omega_ratio: float
    gap: float
    period_analytic: float
    period_measured: float | None
    envelope_min: float | None
    status: str  # "ok" or the error that hit this grid point


@dataclass(frozen=True)
class EnergySeries:
    """Per-sample bare molecular energies by set, cavity energy, and total."""

    times: np.ndarray
    excited: np.ndarray
    ground: np.ndarray
    cavity: np.ndarray
    total: np.ndarray


@dataclass(frozen=True)
class Observables:
    beat_period_analytic: float
    beat_period_measured: float | None
    envelope_min: float
    envelope_max: float
    energy_partition: EnergySeries | None
    phase_points: np.ndarray | None


def build_initial_conditions(spec: ScenarioSpec,
                             omega_v: float = 1.0) -> InitialConditions:
    """Deterministic initial conditions for a named scenario.

    The cavity always starts unperturbed, q(0) = qdot(0) = 0.  Fully excited
    velocities are uniform in [-scale, scale]*x0*omega_v, then mean-subtracted
    so they sum to zero exactly.
    """
    n = spec.n_molecules
    kind = spec.kind
    if isinstance(kind, Custom):
        return kind.ic
    if isinstance(kind, FullyExcited):
        disp = np.full(n, kind.x0)
        if kind.velocity_scale == 0.0:
            vel = np.zeros(n)
        else:
            rng = np.random.default_rng(kind.seed)
            vel = rng.uniform(-1.0, 1.0, size=n) * kind.velocity_scale \
                * kind.x0 * omega_v
            vel -= vel.mean()
        return InitialConditions(disp, vel)
    if isinstance(kind, PartiallyActivated):
        if not 0.0 <= kind.beta <= 1.0:
            raise InvalidParameter("beta must lie in [0, 1]")
        n_ex = int(math.floor(kind.beta * n + 1e-12))
        if kind.beta > 0.0 and n_ex == 0:
            warnings.warn(
                f"beta = {kind.beta} with N = {n} rounds to zero excited "
                "molecules; returning the all-ground configuration",
                EmptyExcitedSetWarning, stacklevel=2)
        disp = np.zeros(n)
        disp[:n_ex] = kind.x0
        return InitialConditions(disp, np.zeros(n))
    raise InvalidParameter(f"unknown scenario kind {type(kind).__name__}")


def excited_prefix_size(spec: ScenarioSpec) -> int:
    """Number of excited molecules for a partially activated scenario."""
    if not isinstance(spec.kind, PartiallyActivated):
        raise InvalidInput("scenario is not partially activated")
    return int(math.floor(spec.kind.beta * spec.n_molecules + 1e-12))


def _signal_series(traj: Trajectory, signal) -> np.ndarray:
    if isinstance(signal, str):
        if signal != "collective":
            raise InvalidInput(f"unknown signal {signal!r}")
        return np.abs(traj.collective_x)
    try:
        return np.abs(traj.locals[int(signal)])
    except KeyError:
        raise InvalidIndex(f"molecule {signal} is not stored in the trajectory")


def measure_beating_period(traj: Trajectory, params: SystemParams,
                           signal="collective") -> float:
    """Beat period from envelope-node spacing, blind to the polariton gap.

    Returns 2x the spacing of the first two envelope minima (nodes occur every
    half beat period).  Raises InsufficientSpan when fewer than two interior
    valleys fit in the trajectory, or when the envelope modulates by less than
    MIN_BEAT_CONTRAST (shallow beats carry no measurable node).
    """
    sig = _signal_series(traj, signal)
    dt = traj.dt
    window = max(3, int(round(
        ENVELOPE_WINDOW_PERIODS * 2.0 * math.pi / params.omega_v / dt)))
    if window >= sig.size:
        raise InsufficientSpan("trajectory shorter than the envelope window")
    env = sliding_window_view(sig, window).max(axis=1)
    t_env = traj.times[: env.size] + 0.5 * (window - 1) * dt

    lo, hi = float(env.min()), float(env.max())
    if hi <= 0.0 or (hi - lo) < MIN_BEAT_CONTRAST * hi:
        raise InsufficientSpan(
            f"envelope contrast {(hi - lo) / hi if hi else 0.0:.3f} is below "
            f"{MIN_BEAT_CONTRAST}; no measurable beating")
    # valleys below the midpoint threshold; equals 0.5*max when beats reach zero
    threshold = lo + 0.5 * (hi - lo)
    below = env < threshold
    edges = np.flatnonzero(np.diff(below.astype(np.int8)))
    starts = list(edges[~below[edges]] + 1)
    stops = list(edges[below[edges]] + 1)
    if below[0]:
        starts.insert(0, 0)
    if below[-1]:
        stops.append(below.size)

    minima_times = []
    for a, b in zip(starts, stops):
        if a == 0 or b == below.size:
            continue  # valley truncated by the series edge
        deficit = threshold - env[a:b]
        minima_times.append(float(np.average(t_env[a:b], weights=deficit)))
    if len(minima_times) < 2:
        raise InsufficientSpan(
            f"found {len(minima_times)} envelope minima; need two "
            "(span at least 1.25 beat periods)")
    return 2.0 * (minima_times[1] - minima_times[0])


def envelope_extrema(traj: Trajectory, params: SystemParams,
                     coupling: DerivedCoupling,
                     signal="collective") -> tuple[float, float]:
    """(envelope_min, envelope_max) of a signal via two-tone least squares.

    The collective coordinate contains exactly the two polariton tones; local
    signals additionally carry the bare frequency, which is included in the
    basis when a molecule index is requested.
    """
    if isinstance(signal, str):
        if signal != "collective":
            raise InvalidInput(f"unknown signal {signal!r}")
        series = traj.collective_x
        freqs = [coupling.omega_plus, coupling.omega_minus]
    else:
        try:
            series = traj.locals[int(signal)]
        except KeyError:
            raise InvalidIndex(
                f"molecule {signal} is not stored in the trajectory")
        freqs = [coupling.omega_plus, coupling.omega_minus, params.omega_v]
    t = traj.times
    columns = []
    for f in freqs:
        columns.append(np.cos(f * t))
        columns.append(np.sin(f * t))
    basis = np.stack(columns, axis=1)
    coef, *_ = np.linalg.lstsq(basis, series, rcond=None)
    amps = np.hypot(coef[0::2], coef[1::2])
    env_max = float(amps.sum())
    if len(amps) == 2:
        env_min = float(abs(amps[0] - amps[1]))
    else:
        # three tones: minimum of | |A+| e^{i a} + |A-| e^{i b} + |Av| | over phases
        env_min = float(max(2.0 * amps.max() - env_max, 0.0))
    return env_min, env_max


def energy_partition(traj: Trajectory, params: SystemParams, g: float,
                     excited_set) -> EnergySeries:
    """Bare molecular energy by set plus cavity energy, per sample.

    Requires every molecule's coordinate and velocity series and the cavity
    qdot series (the cavity momentum is qdot/omega_c).
    """
    n = params.n_molecules
    if traj.cavity_qdot is None:
        raise MissingMomenta("trajectory lacks the cavity qdot series")
    missing = [i for i in range(n) if i not in traj.locals
               or i not in traj.local_velocities]
    if missing:
        raise MissingMomenta(
            f"trajectory lacks coordinate/velocity series for molecules "
            f"{missing[:5]}{'...' if len(missing) > 5 else ''}")
    excited = np.zeros(n, dtype=bool)
    excited[np.asarray(list(excited_set), dtype=int)] = True

    m, wv, wc = params.mass, params.omega_v, params.omega_c
    nt = traj.times.size
    e_exc = np.zeros(nt)
    e_gnd = np.zeros(nt)
    total_x = np.zeros(nt)
    for i in range(n):
        x = traj.locals[i]
        v = traj.local_velocities[i]
        bare = 0.5 * m * (v * v) + 0.5 * m * wv * wv * (x * x)
        if excited[i]:
            e_exc += bare
        else:
            e_gnd += bare
        total_x += x
    p_q = traj.cavity_qdot / wc
    disp = traj.cavity_q - g * total_x
    e_cav = 0.5 * wc * p_q * p_q + 0.5 * wc * disp * disp
    return EnergySeries(times=traj.times, excited=e_exc, ground=e_gnd,
                        cavity=e_cav, total=e_exc + e_gnd + e_cav)


def phase_space_samples(traj: Trajectory, params: SystemParams,
                        molecule_index: int, times) -> np.ndarray:
    """(x, p/(m*omega_v)) pairs at the requested times, shape (len(times), 2).

    Times snap to the nearest sample of the trajectory grid and must lie
    within its span.  The momentum axis p/(m*omega_v) equals v/omega_v, so an
    uncoupled molecule traces a circle of radius sqrt(x0^2 + (v0/omega_v)^2).
    """
    if molecule_index not in traj.locals:
        raise InvalidIndex(f"molecule {molecule_index} is not stored")
    if molecule_index not in traj.local_velocities:
        raise MissingMomenta(f"molecule {molecule_index} has no velocity series")
    t = np.atleast_1d(np.asarray(times, dtype=float))
    t0, t1 = traj.times[0], traj.times[-1]
    if np.any(t < t0 - 1e-12) or np.any(t > t1 + 1e-12):
        raise InvalidInput(f"requested times outside the span [{t0}, {t1}]")
    idx = np.clip(np.round((t - t0) / traj.dt).astype(int), 0,
                  traj.times.size - 1)
    # omega_v sets the momentum scale so circles are circles
    return np.stack([traj.locals[molecule_index][idx],
                     traj.local_velocities[molecule_index][idx]
                     / params.omega_v], axis=1)


def uncoupled_phase_circle(x0: float, v0: float, params: SystemParams,
                           times) -> np.ndarray:
    """Reference phase-space points of a bare molecule (g = 0), same scaling."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    wv = params.omega_v
    x = x0 * np.cos(wv * t) + (v0 / wv) * np.sin(wv * t)
    v_over_w = -x0 * np.sin(wv * t) + (v0 / wv) * np.cos(wv * t)
    return np.stack([x, v_over_w], axis=1)


def default_times(coupling: DerivedCoupling, params: SystemParams,
                  span_beats: float = 2.0,
                  samples_per_period: int = 64) -> np.ndarray:
    """Uniform grid: samples_per_period per bare period, span in beat periods."""
    sample_dt = (2.0 * math.pi / params.omega_v) / samples_per_period
    t_end = span_beats * coupling.beat_period
    n = max(2, math.ceil(t_end / sample_dt) + 1)
    return np.arange(n) * sample_dt


def detuning_sweep(sweep: SweepSpec, params: SystemParams) -> list[SweepRow]:
    """Per-detuning beat quantities; row-level errors never abort the sweep.

    Each grid point rescales the cavity frequency, re-derives the coupling, and
    (if requested) evaluates a closed-form trajectory of the scenario and
    measures the period and envelope from it.
    """
    rows = []
    ic = build_initial_conditions(sweep.scenario, params.omega_v)
    for ratio in sweep.detuning_grid:
        point = replace(params, omega_c=ratio * params.omega_v,
                        omega_d=sweep.omega_d,
                        n_molecules=sweep.scenario.n_molecules)
        coupling = derive(point)
        measured = None
        env_min = None
        status = "ok"
        if sweep.measure in (Measure.FROM_TRAJECTORY, Measure.BOTH):
            try:
                modes = fit_polariton_modes(ic, point, coupling)
                times = default_times(coupling, point, span_beats=2.0)
                traj = evaluate_trajectory(modes, point, coupling, times,
                                           store=None)
                measured = measure_beating_period(traj, point)
                emin, emax = envelope_extrema(traj, point, coupling)
                env_min = emin / emax if emax > 0 else 0.0
            except InsufficientSpan as exc:
                status = f"insufficient-span: {exc}"
            except (InvalidInput, InvalidParameter) as exc:
                status = f"invalid: {exc}"
        rows.append(SweepRow(omega_ratio=ratio, gap=coupling.gap,
                             period_analytic=coupling.beat_period,
                             period_measured=measured,
                             envelope_min=env_min, status=status))
    return rows


def period_curve_fwhm(ratios: np.ndarray, periods: np.ndarray) -> float:
    """Full width at half maximum of T(omega ratio), linearly interpolated."""
    ratios = np.asarray(ratios, dtype=float)
    periods = np.asarray(periods, dtype=float)
    if ratios.size < 3:
        raise InvalidInput("need at least three grid points")
    half = 0.5 * periods.max()
    above = periods >= half

    def crossing(i_out: int, i_in: int) -> float:
        x0, x1 = ratios[i_out], ratios[i_in]
        y0, y1 = periods[i_out], periods[i_in]
        return x0 + (half - y0) * (x1 - x0) / (y1 - y0)

    first = int(np.argmax(above))
    last = int(len(above) - 1 - np.argmax(above[::-1]))
    if not above.any() or (first == 0 and last == len(above) - 1):
        raise InvalidInput("half-maximum crossings lie outside the grid")
    left = crossing(first - 1, first) if first > 0 else ratios[0]
    right = crossing(last + 1, last) if last < len(above) - 1 else ratios[-1]
    return float(right - left)


def compute_observables(traj: Trajectory, params: SystemParams,
                        coupling: DerivedCoupling, g: float | None = None,
                        excited_set=None,
                        phase_molecule: int | None = None,
                        phase_times=None) -> Observables:
    """Bundle the standard observables of one trajectory for serialization."""
    try:
        measured = measure_beating_period(traj, params)
    except InsufficientSpan:
        measured = None
    env_min, env_max = envelope_extrema(traj, params, coupling)
    energies = None
    if excited_set is not None:
        g_val = coupling.g if g is None else g
        energies = energy_partition(traj, params, g_val, excited_set)
    points = None
    if phase_molecule is not None and phase_times is not None:
        points = phase_space_samples(traj, params, phase_molecule, phase_times)
    return Observables(beat_period_analytic=coupling.beat_period,
                       beat_period_measured=measured,
                       envelope_min=env_min, envelope_max=env_max,
                       energy_partition=energies, phase_points=points)

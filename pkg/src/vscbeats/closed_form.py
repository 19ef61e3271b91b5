"""Exact analytic solutions of the coupled cavity-ensemble dynamics.

The model separates exactly into a collective part (the mass-weighted mean
coordinate X coupled to the cavity quadrature q) and N-1 relative coordinates
that never see the cavity.  The collective block is diagonalized by a rotation
parameterized by the mixing parameter: with u = sqrt(m) X and w = -q/sqrt(omega_c)
the polariton coordinates are

    [Q+, Q-] = M [u, w],   M = [[-L, 1], [1, L]] / sqrt(1 + L^2),

where L is the (negative) mixing parameter.  M is symmetric orthogonal, so the
same matrix maps back.  Each polariton evolves as a free oscillator
Q(t) = A sin(Omega t + phi); each relative coordinate oscillates at the bare
molecular frequency.  Per-molecule trajectories are recovered from

    x_1 = (X + sum_j xt_j)/sqrt(N),    x_i = x_1 - sqrt(N) xt_i  (i >= 2),

with xt_j = (x_1 - x_j)/sqrt(N) the scaled relative bond lengths.

Phase convention: amplitudes are non-negative, phases live in [0, 2*pi), and a
zero-amplitude mode gets phase 0, which makes fitted amplitudes unique.
Velocities map through the same rotation (a point transformation), with the
cavity velocity qdot = omega_c * p_q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInitialConditions, InvalidInput, InvalidParameter
from .params import DerivedCoupling, SystemParams

__all__ = [
    "InitialConditions", "ModeAmplitudes", "Trajectory",
    "fit_polariton_modes", "eval_collective", "eval_collective_velocity",
    "eval_relative", "eval_relative_velocity", "assemble_local",
    "fully_excited_local", "partially_activated_local", "evaluate_trajectory",
]


@dataclass(frozen=True)
class InitialConditions:
    """Per-molecule displacements/velocities plus the cavity quadrature state."""

    displacements: np.ndarray
    velocities: np.ndarray
    cavity_q: float = 0.0
    cavity_qdot: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "displacements",
                           np.asarray(self.displacements, dtype=float))
        object.__setattr__(self, "velocities",
                           np.asarray(self.velocities, dtype=float))
        if self.displacements.ndim != 1 or self.velocities.ndim != 1:
            raise InvalidInitialConditions("displacements/velocities must be 1-D")
        if self.displacements.size != self.velocities.size:
            raise InvalidInitialConditions(
                f"length mismatch: {self.displacements.size} displacements, "
                f"{self.velocities.size} velocities")
        if self.displacements.size < 1:
            raise InvalidInitialConditions("need at least one molecule")
        if not (np.all(np.isfinite(self.displacements))
                and np.all(np.isfinite(self.velocities))
                and np.isfinite(self.cavity_q) and np.isfinite(self.cavity_qdot)):
            raise InvalidInitialConditions("initial conditions must be finite")

    @property
    def n_molecules(self) -> int:
        return self.displacements.size


@dataclass(frozen=True)
class ModeAmplitudes:
    """Polariton amplitudes/phases plus relative-mode amplitudes/phases.

    ``rel_amplitudes[j-2]``, ``rel_phases[j-2]`` describe relative coordinate j
    (j = 2..N); both arrays are empty for a single molecule.
    """

    a_plus: float
    a_minus: float
    phi_plus: float
    phi_minus: float
    rel_amplitudes: np.ndarray
    rel_phases: np.ndarray
    n_molecules: int

    @property
    def relative(self) -> list[tuple[float, float]]:
        """(amplitude, phase) pairs for the relative modes."""
        return list(zip(self.rel_amplitudes.tolist(), self.rel_phases.tolist()))


@dataclass
class Trajectory:
    """Uniformly sampled time series of the coupled system.

    ``locals`` and ``local_velocities`` map 0-based molecule indices to series.
    ``cavity_qdot`` is required by energy observables (the cavity momentum is
    qdot/omega_c); closed-form builders always fill it.
    """

    times: np.ndarray
    collective_x: np.ndarray
    cavity_q: np.ndarray
    locals: dict[int, np.ndarray]
    local_velocities: dict[int, np.ndarray]
    n_molecules: int
    relatives: np.ndarray | None = None
    cavity_qdot: np.ndarray | None = None
    collective_xdot: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise InvalidInput("time grid must be 1-D with at least two samples")
        dt = np.diff(t)
        if not np.all(dt > 0):
            raise InvalidInput("time grid must be strictly increasing")
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12 * max(abs(t[-1]), 1.0)):
            raise InvalidInput("time grid must be uniformly spaced")
        for name, series in (("collective_x", self.collective_x),
                             ("cavity_q", self.cavity_q)):
            if np.asarray(series).shape != t.shape:
                raise InvalidInput(f"{name} does not share the time grid length")
        for idx, series in self.locals.items():
            if series.shape != t.shape:
                raise InvalidInput(f"locals[{idx}] does not share the time grid length")
        for idx, series in self.local_velocities.items():
            if series.shape != t.shape:
                raise InvalidInput(
                    f"local_velocities[{idx}] does not share the time grid length")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0])


def _amp_phase(value: float, slope_over_omega: float) -> tuple[float, float]:
    """Amplitude/phase such that A*sin(w t + phi) matches value and slope at t=0."""
    amp = float(np.hypot(value, slope_over_omega))
    if amp == 0.0:
        return 0.0, 0.0
    phi = float(np.arctan2(value, slope_over_omega)) % (2.0 * np.pi)
    return amp, phi


def fit_polariton_modes(ic: InitialConditions, params: SystemParams,
                        coupling: DerivedCoupling) -> ModeAmplitudes:
    """Fit polariton and relative-mode amplitudes/phases to initial conditions."""
    n = ic.n_molecules
    if n != params.n_molecules:
        raise InvalidInitialConditions(
            f"initial conditions hold {n} molecules, params declare "
            f"{params.n_molecules}")
    m, wc, wv = params.mass, params.omega_c, params.omega_v
    lam = coupling.mixing
    norm = np.sqrt(1.0 + lam * lam)
    sqrt_n = np.sqrt(n)

    x_col = float(ic.displacements.sum()) / sqrt_n
    v_col = float(ic.velocities.sum()) / sqrt_n

    # rotate (sqrt(m) X, -q/sqrt(omega_c)) and velocities into polariton coordinates
    u, udot = np.sqrt(m) * x_col, np.sqrt(m) * v_col
    w, wdot = -ic.cavity_q / np.sqrt(wc), -ic.cavity_qdot / np.sqrt(wc)
    q_plus = (-lam * u + w) / norm
    q_minus = (u + lam * w) / norm
    qdot_plus = (-lam * udot + wdot) / norm
    qdot_minus = (udot + lam * wdot) / norm

    a_plus, phi_plus = _amp_phase(q_plus, qdot_plus / coupling.omega_plus)
    a_minus, phi_minus = _amp_phase(q_minus, qdot_minus / coupling.omega_minus)

    rel_x = (ic.displacements[0] - ic.displacements[1:]) / sqrt_n
    rel_v = (ic.velocities[0] - ic.velocities[1:]) / sqrt_n
    rel_amp = np.hypot(rel_x, rel_v / wv)
    rel_phase = np.where(rel_amp == 0.0, 0.0,
                         np.arctan2(rel_x, rel_v / wv) % (2.0 * np.pi))

    return ModeAmplitudes(a_plus=a_plus, a_minus=a_minus,
                          phi_plus=phi_plus, phi_minus=phi_minus,
                          rel_amplitudes=rel_amp, rel_phases=rel_phase,
                          n_molecules=n)


def eval_collective(modes: ModeAmplitudes, coupling: DerivedCoupling,
                    params: SystemParams, t):
    """Collective coordinate X(t) and cavity quadrature q(t)."""
    t = np.asarray(t, dtype=float)
    lam = coupling.mixing
    norm = np.sqrt(1.0 + lam * lam)
    sp = modes.a_plus * np.sin(coupling.omega_plus * t + modes.phi_plus)
    sm = modes.a_minus * np.sin(coupling.omega_minus * t + modes.phi_minus)
    x = (-lam * sp + sm) / (np.sqrt(params.mass) * norm)
    q = -np.sqrt(params.omega_c) * (sp + lam * sm) / norm
    return x, q


def eval_collective_velocity(modes: ModeAmplitudes, coupling: DerivedCoupling,
                             params: SystemParams, t):
    """Analytic time derivatives (Xdot(t), qdot(t)); never finite differences."""
    t = np.asarray(t, dtype=float)
    lam = coupling.mixing
    norm = np.sqrt(1.0 + lam * lam)
    cp = modes.a_plus * coupling.omega_plus * np.cos(
        coupling.omega_plus * t + modes.phi_plus)
    cm = modes.a_minus * coupling.omega_minus * np.cos(
        coupling.omega_minus * t + modes.phi_minus)
    xdot = (-lam * cp + cm) / (np.sqrt(params.mass) * norm)
    qdot = -np.sqrt(params.omega_c) * (cp + lam * cm) / norm
    return xdot, qdot


def eval_relative(modes: ModeAmplitudes, params: SystemParams, t) -> np.ndarray:
    """Relative coordinates xt_j(t), shape (N-1, len(t)).

    These oscillate at the bare molecular frequency only; no cavity parameter
    enters, so the series are bitwise invariant under any change of omega_c or
    omega_d.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    phase = params.omega_v * t[None, :] + modes.rel_phases[:, None]
    return modes.rel_amplitudes[:, None] * np.sin(phase)


def eval_relative_velocity(modes: ModeAmplitudes, params: SystemParams,
                           t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    phase = params.omega_v * t[None, :] + modes.rel_phases[:, None]
    return params.omega_v * modes.rel_amplitudes[:, None] * np.cos(phase)


def assemble_local(collective_x: np.ndarray, relatives: np.ndarray,
                   params: SystemParams) -> np.ndarray:
    """Per-molecule series from collective and relative series, shape (N, nt).

    x_1 = (X + sum_j xt_j)/sqrt(N); x_i = x_1 - sqrt(N) xt_i for i >= 2.
    For N = 1 there are no relative coordinates and x_1 = X.
    """
    x = np.atleast_1d(np.asarray(collective_x, dtype=float))
    rel = np.asarray(relatives, dtype=float)
    n = params.n_molecules
    if rel.shape != (n - 1, x.size):
        raise InvalidInput(
            f"relatives have shape {rel.shape}, expected {(n - 1, x.size)}")
    sqrt_n = np.sqrt(n)
    first = (x + rel.sum(axis=0)) / sqrt_n
    if n == 1:
        return first[None, :]
    return np.vstack([first, first[None, :] - sqrt_n * rel])


def fully_excited_local(params: SystemParams, coupling: DerivedCoupling,
                        velocities, t) -> np.ndarray:
    """Per-molecule solution for x_i(0) = x0, sum(v_i) = 0, cavity at rest.

    x_i(t) = x0 [L^2 cos(W+ t) + cos(W- t)]/(L^2+1) + (v_i/omega_v) sin(omega_v t):
    a polaritonic part common to every molecule (no 1/N suppression) plus a bare
    oscillation carrying the individual velocity.
    """
    v = np.asarray(velocities, dtype=float)
    if v.size != params.n_molecules:
        raise InvalidInitialConditions(
            f"{v.size} velocities for {params.n_molecules} molecules")
    vsum = float(v.sum())
    vscale = max(float(np.max(np.abs(v))), params.x0 * params.omega_v)
    if abs(vsum) > 1e-9 * vscale * params.n_molecules:
        raise InvalidInitialConditions(
            f"velocities must sum to zero (got {vsum:.3e})")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam2 = coupling.mixing ** 2
    pol = params.x0 * (lam2 * np.cos(coupling.omega_plus * t)
                       + np.cos(coupling.omega_minus * t)) / (lam2 + 1.0)
    bare = np.sin(params.omega_v * t)[None, :] * (v / params.omega_v)[:, None]
    return pol[None, :] + bare


def partially_activated_local(params: SystemParams, coupling: DerivedCoupling,
                              beta: float, t) -> tuple[np.ndarray, np.ndarray]:
    """Excited-set and ground-set solutions for a fraction beta displaced by x0.

    Both sets share the beta-scaled polaritonic part; the excited molecules add
    (1-beta) of the bare oscillation, the ground molecules subtract beta of it.
    The returned series scale exactly linearly with beta (beta multiplies last).
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameter(f"beta must lie in [0, 1], got {beta}")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam2 = coupling.mixing ** 2
    pol_unit = (lam2 * np.cos(coupling.omega_plus * t)
                + np.cos(coupling.omega_minus * t)) / (lam2 + 1.0)
    bare = np.cos(params.omega_v * t)
    excited = params.x0 * (beta * (pol_unit - bare) + bare)
    ground = params.x0 * beta * (pol_unit - bare)
    return excited, ground


def _resolve_store(store, n: int) -> list[int]:
    if store == "all":
        return list(range(n))
    if store is None:
        return []
    indices = [int(i) for i in store]
    for i in indices:
        if not 0 <= i < n:
            raise InvalidInput(f"molecule index {i} out of range for N={n}")
    return indices


def evaluate_trajectory(modes: ModeAmplitudes, params: SystemParams,
                        coupling: DerivedCoupling, times,
                        store="all", keep_relatives: bool = False) -> Trajectory:
    """Sample the closed-form solution on a time grid.

    ``store`` selects which per-molecule series to materialize ("all", None, or
    an index iterable); the collective/cavity series are always present.  The
    relative-mode sum needed for reconstruction is evaluated as a single
    sine/cosine pair, so the cost is O(len(times)) plus O(1) per stored
    molecule, independent of N.
    """
    t = np.atleast_1d(np.asarray(times, dtype=float))
    n = modes.n_molecules
    if n != params.n_molecules:
        raise InvalidInput("modes and params disagree on the molecule count")
    x_col, q = eval_collective(modes, coupling, params, t)
    xdot_col, qdot = eval_collective_velocity(modes, coupling, params, t)

    # sum_j A_j sin(w t + phi_j) collapses to S*sin(w t) + C*cos(w t)
    sin_coef = float(np.sum(modes.rel_amplitudes * np.cos(modes.rel_phases)))
    cos_coef = float(np.sum(modes.rel_amplitudes * np.sin(modes.rel_phases)))
    wv = params.omega_v
    rel_sum = sin_coef * np.sin(wv * t) + cos_coef * np.cos(wv * t)
    rel_sum_dot = wv * (sin_coef * np.cos(wv * t) - cos_coef * np.sin(wv * t))

    sqrt_n = np.sqrt(n)
    first = (x_col + rel_sum) / sqrt_n
    first_dot = (xdot_col + rel_sum_dot) / sqrt_n

    indices = _resolve_store(store, n)
    locals_map: dict[int, np.ndarray] = {}
    vel_map: dict[int, np.ndarray] = {}
    for i in indices:
        if i == 0 or n == 1:
            locals_map[i] = first.copy()
            vel_map[i] = first_dot.copy()
        else:
            amp = modes.rel_amplitudes[i - 1]
            phase = modes.rel_phases[i - 1]
            locals_map[i] = first - sqrt_n * amp * np.sin(wv * t + phase)
            vel_map[i] = first_dot - sqrt_n * wv * amp * np.cos(wv * t + phase)

    relatives = eval_relative(modes, params, t) if keep_relatives else None
    return Trajectory(times=t, collective_x=x_col, cavity_q=q,
                      locals=locals_map, local_velocities=vel_map,
                      n_molecules=n, relatives=relatives,
                      cavity_qdot=qdot, collective_xdot=xdot_col)

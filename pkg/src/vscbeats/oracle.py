"""Brute-force verification route: direct integration and dense diagonalization.

Nothing in this module knows about polaritons, mixing parameters, or the
collective/relative split.  It works on the raw (N+1)-degree-of-freedom
quadratic Hamiltonian

    H = sum_i [p_i^2/(2m) + m w_v^2 x_i^2 / 2]
        + w_c p_q^2 / 2 + (w_c/2) (q - g sum_i x_i)^2,

where the cavity quadrature q carries an effective mass of 1/w_c (its kinetic
term is w_c p_q^2/2, so qdot = w_c p_q -- easy to get wrong by a factor of w_c).
The coupling constant g satisfies w_c g^2 N = m w_d^2.

Two independent tools:

* a fixed-step kick-drift-kick leapfrog.  The stepper is written in matrix
  form (one force matrix-vector product per step) purely for speed; it is the
  textbook leapfrog map.  Being symplectic, its energy error is oscillatory and
  bounded: for a normal mode of frequency W the relative bound is (W*dt)^2/4,
  and the accumulated phase error over a span t is about W*t*(W*dt)^2/24.
  Choose steps_per_period accordingly; the defaults suit qualitative runs.
* a cyclic Jacobi eigensolver for the mass-weighted Hessian, dependency-free
  and adequate for the dense guard of N <= 2000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import InitialConditions, Trajectory
from .errors import (
    InvalidInput,
    NumericalDivergence,
    StepSizeTooLarge,
    TooLargeForDense,
)
from .params import DerivedCoupling, SystemParams

__all__ = [
    "FullState", "HessianSpectrum", "EnergyBreakdown", "equations_of_motion",
    "total_energy", "integrate", "propagate", "hessian_spectrum",
    "jacobi_eigenvalues", "DENSE_GUARD", "DEFAULT_STEPS_PER_PERIOD",
]

DENSE_GUARD = 2000
DEFAULT_STEPS_PER_PERIOD = 200
MIN_STEPS_PER_PERIOD = 50
DEFAULT_SAMPLES_PER_PERIOD = 64


@dataclass
class FullState:
    """Full phase-space state: molecular coordinates/momenta plus cavity pair."""

    x: np.ndarray
    p: np.ndarray
    q: float
    p_q: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.x.shape != self.p.shape or self.x.ndim != 1:
            raise InvalidInput("x and p must be 1-D arrays of equal length")

    @classmethod
    def from_initial_conditions(cls, ic: InitialConditions,
                                params: SystemParams) -> "FullState":
        return cls(x=ic.displacements.copy(),
                   p=params.mass * ic.velocities,
                   q=ic.cavity_q,
                   p_q=ic.cavity_qdot / params.omega_c)

    def copy(self) -> "FullState":
        return FullState(self.x.copy(), self.p.copy(), self.q, self.p_q)


@dataclass(frozen=True)
class HessianSpectrum:
    """Sorted normal-mode frequencies and the count of bare-frequency modes."""

    frequencies: np.ndarray
    multiplicity_v: int


@dataclass(frozen=True)
class EnergyBreakdown:
    """Total energy split into per-molecule bare terms and the cavity block."""

    total: float
    molecular: np.ndarray  # p_i^2/2m + m w_v^2 x_i^2/2 per molecule
    cavity: float          # w_c p_q^2/2 + (w_c/2)(q - g sum x)^2


def coupling_constant(params: SystemParams) -> float:
    """g from the identity omega_c * g^2 * N = mass * omega_d^2."""
    return math.sqrt(params.mass * params.omega_d ** 2
                     / (params.n_molecules * params.omega_c))


def _resolve_g(params: SystemParams, coupling: DerivedCoupling | None,
               g: float | None) -> float:
    if g is not None:
        return float(g)
    if coupling is not None:
        return coupling.g
    return coupling_constant(params)


def equations_of_motion(state: FullState, params: SystemParams,
                        g: float) -> FullState:
    """Hamilton's equations; the returned FullState holds the time derivatives.

    xdot_i = p_i/m
    pdot_i = -m w_v^2 x_i + w_c g (q - g sum_j x_j)
    qdot   = w_c p_q
    pdot_q = -w_c (q - g sum_i x_i)
    """
    m, wv, wc = params.mass, params.omega_v, params.omega_c
    shared = wc * (state.q - g * state.x.sum())
    return FullState(x=state.p / m,
                     p=-m * wv * wv * state.x + g * shared,
                     q=wc * state.p_q,
                     p_q=-shared)


def total_energy(state: FullState, params: SystemParams,
                 g: float) -> EnergyBreakdown:
    """Hamiltonian value plus its molecular/cavity partition."""
    m, wv, wc = params.mass, params.omega_v, params.omega_c
    molecular = state.p ** 2 / (2.0 * m) + 0.5 * m * wv * wv * state.x ** 2
    disp = state.q - g * state.x.sum()
    cavity = 0.5 * wc * state.p_q ** 2 + 0.5 * wc * disp * disp
    return EnergyBreakdown(total=float(molecular.sum() + cavity),
                           molecular=molecular, cavity=float(cavity))


def _leapfrog_blocks(y: np.ndarray, v: np.ndarray, k_dt: np.ndarray,
                     dv: np.ndarray, steps: int, buf: np.ndarray) -> None:
    """Advance (y, v) by `steps` kick-drift-kick steps in place.

    k_dt is -dt * Hessian (a full kick); dv is dt * inverse-mass diagonal.
    Consecutive half kicks are fused, which leaves exactly the KDK chain:
    K(dt/2) [D K]^(steps-1) D K(dt/2).
    """
    np.matmul(0.5 * k_dt, y, out=buf)
    v += buf
    for _ in range(steps - 1):
        y += dv * v
        np.matmul(k_dt, y, out=buf)
        v += buf
    y += dv * v
    np.matmul(0.5 * k_dt, y, out=buf)
    v += buf


def _plan_grid(t_end: float, dt_max: float, omega_v: float,
               samples_per_period: int) -> tuple[float, int, int]:
    """Sample spacing, steps per sample, and sample count for a run."""
    sample_dt = (2.0 * math.pi / omega_v) / samples_per_period
    steps_per_sample = max(1, math.ceil(sample_dt / dt_max - 1e-12))
    n_samples = max(2, math.ceil(t_end / sample_dt - 1e-9) + 1)
    return sample_dt, steps_per_sample, n_samples


def integrate(ic: InitialConditions, params: SystemParams,
              coupling: DerivedCoupling, t_end: float, dt: float | None = None,
              *, g: float | None = None,
              steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
              samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
              store="all") -> Trajectory:
    """Leapfrog integration of the full system, sampled on a uniform grid.

    ``dt`` bounds the integrator step from above; when omitted it is derived
    from ``steps_per_period`` (steps per upper-polariton period; at least 50).
    The actual step divides the sample spacing exactly and never exceeds the
    bound.  ``g`` overrides the coupling constant (g = 0 gives the decoupled
    ensemble).  ``store`` selects per-molecule series as in the closed form.
    """
    if t_end <= 0.0:
        raise InvalidInput("t_end must be positive")
    n = ic.n_molecules
    if n != params.n_molecules:
        raise InvalidInput("initial conditions and params disagree on N")
    period_plus = 2.0 * math.pi / coupling.omega_plus
    dt_guard = period_plus / MIN_STEPS_PER_PERIOD
    if dt is None:
        if steps_per_period < MIN_STEPS_PER_PERIOD:
            raise StepSizeTooLarge(
                f"steps_per_period must be >= {MIN_STEPS_PER_PERIOD}")
        dt_max = period_plus / steps_per_period
    else:
        if dt > dt_guard * (1.0 + 1e-12):
            raise StepSizeTooLarge(
                f"dt = {dt:.3e} exceeds {dt_guard:.3e} "
                f"(= upper-polariton period / {MIN_STEPS_PER_PERIOD})")
        dt_max = float(dt)

    g_val = _resolve_g(params, coupling, g)
    sample_dt, steps_per_sample, n_samples = _plan_grid(
        t_end, dt_max, params.omega_v, samples_per_period)
    step = sample_dt / steps_per_sample

    mass_inv = np.empty(n + 1)
    mass_inv[:n] = 1.0 / params.mass
    mass_inv[n] = params.omega_c  # cavity effective mass is 1/omega_c
    k_dt = -step * _hessian_plain(n, params, g_val)
    dv = step * mass_inv
    buf = np.empty(n + 1)

    y = np.concatenate([ic.displacements, [ic.cavity_q]])
    v = np.concatenate([params.mass * ic.velocities,
                        [ic.cavity_qdot / params.omega_c]])

    indices = _resolve_store_indices(store, n)
    times = np.arange(n_samples) * sample_dt
    xs = np.empty((n_samples, len(indices)))
    vs = np.empty((n_samples, len(indices)))
    col = np.empty(n_samples)
    col_dot = np.empty(n_samples)
    qs = np.empty(n_samples)
    qdots = np.empty(n_samples)

    sqrt_n = math.sqrt(n)
    idx = np.asarray(indices, dtype=int)
    for k in range(n_samples):
        if k:
            _leapfrog_blocks(y, v, k_dt, dv, steps_per_sample, buf)
        xs[k] = y[idx]
        vs[k] = v[idx] / params.mass
        col[k] = y[:n].sum() / sqrt_n
        col_dot[k] = v[:n].sum() / (params.mass * sqrt_n)
        qs[k] = y[n]
        qdots[k] = params.omega_c * v[n]  # v-slot stores p_q for the cavity
        if not np.isfinite(col[k]) or not np.isfinite(qs[k]):
            raise NumericalDivergence(f"non-finite state at t = {times[k]:.6g}")

    return Trajectory(
        times=times, collective_x=col, cavity_q=qs,
        locals={i: xs[:, j].copy() for j, i in enumerate(indices)},
        local_velocities={i: vs[:, j].copy() for j, i in enumerate(indices)},
        n_molecules=n, cavity_qdot=qdots, collective_xdot=col_dot)


def propagate(state: FullState, params: SystemParams, g: float,
              t_end: float, dt: float) -> FullState:
    """Advance a full state by leapfrog without sampling; returns the end state.

    The number of steps is round(t_end/dt); useful for time-reversal checks
    where the exact step count must match a previous run.
    """
    n = state.x.size
    steps = max(1, round(t_end / dt))
    step = t_end / steps
    mass_inv = np.empty(n + 1)
    mass_inv[:n] = 1.0 / params.mass
    mass_inv[n] = params.omega_c
    k_dt = -step * _hessian_plain(n, params, g)
    dv = step * mass_inv
    buf = np.empty(n + 1)
    y = np.concatenate([state.x, [state.q]])
    v = np.concatenate([state.p, [state.p_q]])
    _leapfrog_blocks(y, v, k_dt, dv, steps, buf)
    if not np.all(np.isfinite(y)) or not np.all(np.isfinite(v)):
        raise NumericalDivergence("non-finite state after propagation")
    return FullState(x=y[:n], p=v[:n], q=float(y[n]), p_q=float(v[n]))


def _hessian_plain(n: int, params: SystemParams, g: float) -> np.ndarray:
    """Hessian of V in plain coordinates (x_1..x_N, q)."""
    m, wv, wc = params.mass, params.omega_v, params.omega_c
    k = np.full((n + 1, n + 1), wc * g * g)
    k[np.arange(n), np.arange(n)] += m * wv * wv
    k[:n, n] = -wc * g
    k[n, :n] = -wc * g
    k[n, n] = wc
    return k


def _resolve_store_indices(store, n: int) -> list[int]:
    if store == "all":
        return list(range(n))
    if store is None:
        return []
    indices = [int(i) for i in store]
    for i in indices:
        if not 0 <= i < n:
            raise InvalidInput(f"molecule index {i} out of range for N={n}")
    return indices


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-14,
                       max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by the cyclic Jacobi method.

    Sweeps run in deterministic row-major order over the upper triangle;
    convergence is declared when the off-diagonal Frobenius norm drops below
    ``tol`` times the full Frobenius norm.  Returns eigenvalues sorted
    ascending.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput("matrix must be square")
    if not np.allclose(a, a.T, rtol=1e-12, atol=1e-12 * np.abs(a).max()):
        raise InvalidInput("matrix must be symmetric")
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy()

    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * norm:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Givens angle that annihilates a[p,q] (smaller-root branch)
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    raise NumericalDivergence("Jacobi sweep limit exceeded")


def hessian_spectrum(params: SystemParams, coupling: DerivedCoupling | None = None,
                     *, g: float | None = None,
                     bare_tol: float = 1e-9) -> HessianSpectrum:
    """Normal-mode frequencies from the dense mass-weighted Hessian.

    Mass weighting uses sqrt(m) for molecular coordinates and 1/sqrt(omega_c)
    for the cavity quadrature, matching the kinetic form (so frequencies are
    the square roots of the weighted Hessian's eigenvalues).
    ``multiplicity_v`` counts frequencies within ``bare_tol * omega_v`` of the
    bare molecular frequency.
    """
    n = params.n_molecules
    if n > DENSE_GUARD:
        raise TooLargeForDense(
            f"N = {n} exceeds the dense guard ({DENSE_GUARD}); use the "
            "closed-form product/trace identities instead")
    g_val = _resolve_g(params, coupling, g)
    m, wv, wc = params.mass, params.omega_v, params.omega_c

    # weighted Hessian: D^-1 K D^-1 with D = diag(sqrt(mass vector))
    k = _hessian_plain(n, params, g_val)
    weights = np.empty(n + 1)
    weights[:n] = 1.0 / math.sqrt(m)
    weights[n] = math.sqrt(wc)
    k = k * weights[:, None] * weights[None, :]

    eigvals = jacobi_eigenvalues(k)
    if eigvals.min() < -1e-12 * max(eigvals.max(), 1.0):
        raise NumericalDivergence("weighted Hessian is not positive semidefinite")
    freqs = np.sqrt(np.clip(eigvals, 0.0, None))
    mult = int(np.sum(np.abs(freqs - wv) <= bare_tol * wv))
    return HessianSpectrum(frequencies=freqs, multiplicity_v=mult)

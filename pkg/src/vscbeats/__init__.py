"""Classical polariton dynamics of cavity-coupled molecular vibration ensembles.

The package has two independent routes to the same dynamics:

* :mod:`vscbeats.closed_form` evaluates the exact analytic solutions built on
  the collective/relative coordinate split and the polariton normal modes;
* :mod:`vscbeats.oracle` integrates the full (N+1)-degree-of-freedom equations
  of motion with a symplectic leapfrog and diagonalizes the mass-weighted
  Hessian with a dense Jacobi eigensolver.

:mod:`vscbeats.scenarios` provides named initial conditions, beat-period and
envelope observables, and detuning sweeps; :mod:`vscbeats.cli` exposes all of
it as a command line tool.
"""

from .params import (
    CODATA,
    CavityGeometry,
    DerivedCoupling,
    PhysicalConstants,
    Regime,
    SystemParams,
    classify_regime,
    derive,
    from_si,
    thz_preset,
    to_si,
)
from .closed_form import (
    InitialConditions,
    ModeAmplitudes,
    Trajectory,
    assemble_local,
    eval_collective,
    eval_collective_velocity,
    eval_relative,
    evaluate_trajectory,
    fit_polariton_modes,
    fully_excited_local,
    partially_activated_local,
)
from .oracle import (
    FullState,
    HessianSpectrum,
    equations_of_motion,
    hessian_spectrum,
    integrate,
    jacobi_eigenvalues,
    propagate,
    total_energy,
)
from .scenarios import (
    Custom,
    FullyExcited,
    Measure,
    PartiallyActivated,
    ScenarioSpec,
    SweepSpec,
    build_initial_conditions,
    detuning_sweep,
    energy_partition,
    envelope_extrema,
    measure_beating_period,
    phase_space_samples,
    uncoupled_phase_circle,
)

__version__ = "0.1.0"

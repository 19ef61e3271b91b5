"""System parameters and closed-form spectral quantities of the coupled system.

A single cavity mode (frequency ``omega_c``, quadrature coordinate q) couples to
the collective coordinate of N identical harmonic molecular vibrations (bare
frequency ``omega_v``, mass ``mass``).  The coupling strength enters through the
diamagnetic frequency ``omega_d`` (also called the depolarization shift), which
dresses the matter frequency and fixes the two polariton normal modes.

Everything here is exact arithmetic on the quadratic model: no integration, no
fitting.  Internal computations use natural units (omega_v = 1, mass = 1,
x0 = 1 by default); SI inputs are converted once at the boundary by
:func:`from_si`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DecoupledSystem, InvalidParameter

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA SI constants used by the SI conversion boundary.

    epsilon0: vacuum permittivity [F/m]
    c:        speed of light [m/s]
    e:        elementary charge [C]
    m_e:      electron mass [kg]
    """

    epsilon0: float = 8.8541878128e-12
    c: float = 2.99792458e8
    e: float = 1.602176634e-19
    m_e: float = 9.1093837015e-31

    def __post_init__(self):
        for name in ("epsilon0", "c", "e", "m_e"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameter(f"constant {name} must be positive")


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class CavityGeometry:
    """Fabry-Perot cavity geometry: mirror area, spacing, and optical volume.

    The effective optical volume is area * length.  When built from a target
    fundamental frequency, the mirror spacing follows length = pi*c/omega.
    """

    area: float
    length: float
    volume: float = field(init=False)

    def __post_init__(self):
        if not (self.area > 0.0 and self.length > 0.0):
            raise InvalidParameter("cavity area and length must be positive")
        object.__setattr__(self, "volume", self.area * self.length)

    @classmethod
    def from_frequency(cls, area: float, omega: float,
                       constants: PhysicalConstants = CODATA) -> "CavityGeometry":
        """Geometry whose fundamental mode frequency [rad/s] equals ``omega``."""
        if not omega > 0.0:
            raise InvalidParameter("cavity frequency must be positive")
        return cls(area=area, length=math.pi * constants.c / omega)

    def fundamental_frequency(self, constants: PhysicalConstants = CODATA) -> float:
        return math.pi * constants.c / self.length


@dataclass(frozen=True)
class SystemParams:
    """Inputs of the coupled cavity-ensemble model.

    Frequencies are angular [rad/time].  ``omega_d`` is the collective coupling
    scale sqrt(dipole^2 * N / (mass * epsilon0 * volume)); a zero value is a
    decoupled system and is rejected by :func:`derive` (the mixing parameter is
    undefined there), while the brute-force module handles g = 0 directly.
    """

    omega_v: float
    omega_c: float
    omega_d: float
    n_molecules: int
    mass: float = 1.0
    dipole: float = 0.0
    x0: float = 1.0

    def __post_init__(self):
        if not self.omega_v > 0.0:
            raise InvalidParameter("omega_v must be positive")
        if not self.omega_c > 0.0:
            raise InvalidParameter("omega_c must be positive")
        if self.omega_d < 0.0:
            raise InvalidParameter("omega_d must be non-negative")
        if self.n_molecules < 1:
            raise InvalidParameter("n_molecules must be at least 1")
        if not self.mass > 0.0:
            raise InvalidParameter("mass must be positive")
        if not self.x0 > 0.0:
            raise InvalidParameter("x0 must be positive")

    @classmethod
    def natural(cls, omega_d: float, n_molecules: int,
                omega_c: float = 1.0) -> "SystemParams":
        """Natural-unit construction: omega_v = 1, mass = 1, x0 = 1."""
        return cls(omega_v=1.0, omega_c=omega_c, omega_d=omega_d,
                   n_molecules=n_molecules)


class Regime(enum.Enum):
    """Light-matter interaction regime, classified by the normalized splitting."""

    STRONG = "strong"
    ULTRASTRONG = "ultrastrong"
    DEEP = "deep"


@dataclass(frozen=True)
class DerivedCoupling:
    """All spectral quantities derived in closed form from :class:`SystemParams`.

    g:             dimensionless light-molecule coupling, omega_c*g^2*N = mass*omega_d^2
    omega_bar_sq:  dressed matter frequency squared, omega_v^2 + omega_d^2
    alpha:         detuning ratio (omega_c^2 - omega_bar_sq) / (2 omega_d omega_c)
    mixing:        mixing parameter alpha - sqrt(1 + alpha^2); always negative
    omega_plus:    upper polariton frequency
    omega_minus:   lower polariton frequency
    gap:           omega_plus - omega_minus
    sum_freq:      omega_plus + omega_minus
    vrs:           vacuum Rabi splitting = gap evaluated at resonance = omega_d
    vrs_printed:   the quadratic-splitting form omega_d*sqrt(4 omega_v^2 + omega_d^2),
                   which equals omega_plus^2 - omega_minus^2 at resonance (kept for
                   reference; not used for classification)
    beat_period:   4*pi / gap
    regime:        classification by vrs / omega_v
    """

    g: float
    omega_bar_sq: float
    alpha: float
    mixing: float
    omega_plus: float
    omega_minus: float
    gap: float
    sum_freq: float
    vrs: float
    vrs_printed: float
    beat_period: float
    regime: Regime


def mixing_parameter(alpha: float) -> float:
    """alpha - sqrt(1 + alpha^2), evaluated on the cancellation-free branch."""
    if alpha > 0.0:
        return -1.0 / (alpha + math.hypot(1.0, alpha))
    return alpha - math.hypot(1.0, alpha)


def derive(params: SystemParams) -> DerivedCoupling:
    """Derive polariton frequencies and every dependent spectral quantity.

    Raises DecoupledSystem if omega_d == 0: the canonical transformation's
    mixing parameter divides by 2*omega_d*omega_c.
    """
    if params.omega_d == 0.0:
        raise DecoupledSystem("omega_d = 0: mixing parameter is undefined")
    wv, wc, wd = params.omega_v, params.omega_c, params.omega_d
    obar2 = wv * wv + wd * wd
    alpha = (wc * wc - obar2) / (2.0 * wd * wc)
    mixing = mixing_parameter(alpha)
    mean = 0.5 * (obar2 + wc * wc)
    split = 0.5 * math.sqrt(4.0 * wd * wd * wc * wc + (obar2 - wc * wc) ** 2)
    omega_plus = math.sqrt(mean + split)
    omega_minus = math.sqrt(mean - split)
    gap = omega_plus - omega_minus
    vrs = wd  # gap law at omega_c = omega_v: sqrt(0 + omega_d^2)
    coupling = DerivedCoupling(
        g=math.sqrt(params.mass * wd * wd / (params.n_molecules * wc)),
        omega_bar_sq=obar2,
        alpha=alpha,
        mixing=mixing,
        omega_plus=omega_plus,
        omega_minus=omega_minus,
        gap=gap,
        sum_freq=omega_plus + omega_minus,
        vrs=vrs,
        vrs_printed=wd * math.sqrt(4.0 * wv * wv + wd * wd),
        beat_period=4.0 * math.pi / gap,
        regime=_classify(vrs / wv),
    )
    return coupling


def _classify(ratio: float) -> Regime:
    # half-open intervals: the 0.1 boundary belongs to ultrastrong
    if ratio < 0.1:
        return Regime.STRONG
    if ratio < 1.0:
        return Regime.ULTRASTRONG
    return Regime.DEEP


def classify_regime(coupling: DerivedCoupling, params: SystemParams) -> Regime:
    """Regime from the normalized vacuum Rabi splitting vrs/omega_v."""
    return _classify(coupling.vrs / params.omega_v)


def diamagnetic_frequency_si(dipole_c: float, n_molecules: float, mass_kg: float,
                             volume_m3: float,
                             constants: PhysicalConstants = CODATA) -> float:
    """omega_d in SI units: sqrt(dipole^2 * N / (mass * epsilon0 * volume))."""
    return math.sqrt(dipole_c * dipole_c * n_molecules
                     / (mass_kg * constants.epsilon0 * volume_m3))


def from_si(constants: PhysicalConstants, geometry: CavityGeometry,
            freq_thz: float, mass_me: float, dipole_e: float, n: int,
            vib_freq_thz: float | None = None) -> SystemParams:
    """Build natural-unit parameters from an SI cavity description.

    ``freq_thz`` is the cavity fundamental frequency in THz (the geometry must
    have been constructed from the same frequency); ``mass_me`` the molecular
    mass in electron masses; ``dipole_e`` the dipole magnitude in elementary
    charges.  ``vib_freq_thz`` defaults to the cavity frequency (resonance).

    Returns parameters with omega_v = 1, mass = 1, x0 = 1; ``dipole`` keeps the
    value in elementary charges so :func:`to_si` can reproduce the inputs.
    """
    if not (freq_thz > 0.0 and mass_me > 0.0 and dipole_e > 0.0 and n >= 1):
        raise InvalidParameter("SI inputs must be positive (and n >= 1)")
    if vib_freq_thz is None:
        vib_freq_thz = freq_thz
    elif not vib_freq_thz > 0.0:
        raise InvalidParameter("vib_freq_thz must be positive")

    omega_c_si = TWO_PI * freq_thz * 1e12
    omega_v_si = TWO_PI * vib_freq_thz * 1e12
    expected_length = math.pi * constants.c / omega_c_si
    if abs(geometry.length - expected_length) > 1e-9 * expected_length:
        raise InvalidParameter(
            "geometry length is inconsistent with the cavity frequency "
            f"(expected pi*c/omega = {expected_length:.6e} m)")

    mass_kg = mass_me * constants.m_e
    dipole_c = dipole_e * constants.e
    omega_d_si = diamagnetic_frequency_si(dipole_c, n, mass_kg,
                                          geometry.volume, constants)
    return SystemParams(
        omega_v=1.0,
        omega_c=omega_c_si / omega_v_si,
        omega_d=omega_d_si / omega_v_si,
        n_molecules=n,
        mass=1.0,
        dipole=dipole_e,
        x0=1.0,
    )


def to_si(params: SystemParams, constants: PhysicalConstants,
          geometry: CavityGeometry, vib_freq_thz: float) -> dict:
    """Invert :func:`from_si`: recover the SI inputs from natural-unit params.

    ``vib_freq_thz`` anchors the time unit (natural omega_v maps onto it).
    The molecular mass is recovered from the microscopic identity
    omega_d^2 = dipole^2 N / (mass epsilon0 volume).
    """
    scale = TWO_PI * vib_freq_thz * 1e12 / params.omega_v
    omega_d_si = params.omega_d * scale
    dipole_c = params.dipole * constants.e
    mass_kg = (dipole_c * dipole_c * params.n_molecules
               / (constants.epsilon0 * geometry.volume * omega_d_si * omega_d_si))
    return {
        "omega_v_si": params.omega_v * scale,
        "omega_c_si": params.omega_c * scale,
        "omega_d_si": omega_d_si,
        "freq_thz": params.omega_c * scale / (TWO_PI * 1e12),
        "mass_kg": mass_kg,
        "mass_me": mass_kg / constants.m_e,
        "dipole_e": params.dipole,
        "n": params.n_molecules,
    }


def thz_preset(n: int, freq_thz: float = 1.0, area_m2: float = 1e-12,
               mass_me: float = 4e3, dipole_e: float = 1.0,
               constants: PhysicalConstants = CODATA
               ) -> tuple[SystemParams, CavityGeometry]:
    """Terahertz Fabry-Perot preset: resonant cavity, micron-scale mirrors.

    Defaults: 2*pi x 1 THz resonant mode, 1 um^2 cross-section, molecular mass
    4e3 electron masses, unit dipole in elementary charges.
    """
    omega_si = TWO_PI * freq_thz * 1e12
    geometry = CavityGeometry.from_frequency(area_m2, omega_si, constants)
    return from_si(constants, geometry, freq_thz, mass_me, dipole_e, n), geometry

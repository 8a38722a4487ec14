"""Doppler-averaged susceptibilities of the two circular probe components.

Each probe pathway contributes a partial susceptibility

    chi_t = (i / (hbar eps0)) * mu_t^2 * rho_gg * N0 * F_t,

where F_t is the thermal average of the inverse dressed-line denominator:
the one-photon detuning rides the atomic velocity through the first-order
Doppler shift, while the two-photon (EIT) term stays velocity-free because
probe and coupling co-propagate. Summing the pathway partials per circular
component gives chi- and chi+, hence refractive indices, absorption
coefficients, and the rotation angle of the linear probe polarization.

The mapping from cell temperature to vapor density uses the liquid-phase Rb
vapor-pressure curve rescaled to pass through a measured anchor point, so
nearby temperatures extrapolate consistently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atom import (
    D1_WAVELENGTH,
    EPSILON_0,
    HBAR,
    K_BOLTZMANN,
    NO_STARK,
    RB87_MASS,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SPEED_OF_LIGHT,
    FieldDrive,
    LevelScheme,
    ProbePathway,
    StarkShifts,
    ZeemanField,
    probe_pathways,
    zeeman_shift,
)
from .dynamics import RelaxationRates
from .quadrature import QuadratureResult, integrate_adaptive

__all__ = [
    "MediumParams",
    "SusceptibilityPair",
    "RotationAngle",
    "maxwellian_weight",
    "rb_vapor_density",
    "thermal_v_width",
    "doppler_factor",
    "doppler_factors",
    "susceptibility_pair",
    "rotation_angle",
    "SPECTRUM_CSV_COLUMNS",
]

# vapor-pressure anchor: density at 328.15 K fixed to the measured value
_ANCHOR_TEMPERATURE = 328.15
_ANCHOR_DENSITY = 1.62e17  # m^-3

SPECTRUM_CSV_COLUMNS = [
    "detuning_mhz",
    "re_chi_minus", "im_chi_minus",
    "re_chi_plus", "im_chi_plus",
    "n_diff", "alpha_plus", "alpha_minus", "phi_deg",
]


def _raw_vapor_density(t_kelvin: float) -> float:
    log10_torr = (
        15.88253
        - 4529.635 / t_kelvin
        + 0.00058663 * t_kelvin
        - 2.99138 * math.log10(t_kelvin)
    )
    pressure = 133.322368 * 10.0 ** log10_torr  # Pa
    return pressure / (K_BOLTZMANN * t_kelvin)


_ANCHOR_SCALE = _ANCHOR_DENSITY / _raw_vapor_density(_ANCHOR_TEMPERATURE)


def rb_vapor_density(t_kelvin: float) -> float:
    """Atomic number density (m^-3) of saturated Rb vapor at ``t_kelvin``."""
    if t_kelvin <= 0:
        raise ValueError("temperature must be positive")
    return _ANCHOR_SCALE * _raw_vapor_density(t_kelvin)


def thermal_v_width(t_kelvin: float, mass: float = RB87_MASS) -> float:
    """Maxwellian width parameter V = sqrt(2 k_B T / m); V/sqrt(2) is the rms speed."""
    return math.sqrt(2.0 * K_BOLTZMANN * t_kelvin / mass)


def maxwellian_weight(u, v_width: float, n0: float = 1.0):
    """Velocity-class density N0/(V sqrt(pi)) exp(-u^2/V^2)."""
    if v_width <= 0:
        raise ValueError("v_width must be positive")
    u = np.asarray(u, dtype=float)
    return n0 / (v_width * math.sqrt(math.pi)) * np.exp(-((u / v_width) ** 2))


@dataclass(frozen=True)
class MediumParams:
    """Vapor-cell parameters. ``v_width`` is the Maxwellian V, not the rms speed."""

    density: float
    temperature: float
    v_width: float
    cell_length: float = 0.05
    wavelength: float = D1_WAVELENGTH

    def __post_init__(self):
        for name in ("density", "temperature", "v_width", "cell_length", "wavelength"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_temperature(
        cls,
        t_kelvin: float,
        density: float | None = None,
        cell_length: float = 0.05,
        wavelength: float = D1_WAVELENGTH,
    ) -> "MediumParams":
        return cls(
            density=rb_vapor_density(t_kelvin) if density is None else density,
            temperature=t_kelvin,
            v_width=thermal_v_width(t_kelvin),
            cell_length=cell_length,
            wavelength=wavelength,
        )

    @property
    def wavevector(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def omega(self) -> float:
        return self.wavevector * SPEED_OF_LIGHT


@dataclass(frozen=True)
class SusceptibilityPair:
    """chi, refractive index, and absorption per circular component."""

    chi_minus: complex
    chi_plus: complex
    n_minus: float
    n_plus: float
    alpha_minus: float
    alpha_plus: float

    @classmethod
    def from_chis(cls, chi_minus: complex, chi_plus: complex, medium: MediumParams):
        k = medium.wavevector
        return cls(
            chi_minus=chi_minus,
            chi_plus=chi_plus,
            n_minus=math.sqrt(1.0 + chi_minus.real),
            n_plus=math.sqrt(1.0 + chi_plus.real),
            alpha_minus=2.0 * k * np.sqrt(1.0 + complex(chi_minus)).imag,
            alpha_plus=2.0 * k * np.sqrt(1.0 + complex(chi_plus)).imag,
        )


@dataclass(frozen=True)
class RotationAngle:
    """Rotation of the probe polarization plane, radians.

    ``exact`` uses the index difference, (pi/lambda)(n+ - n-)d; ``approx``
    the small-chi form (pi/2 lambda) Re(chi+ - chi-) d.
    """

    exact: float
    approx: float


def _pathway_integrand(
    p: ProbePathway,
    probe: FieldDrive,
    coupling: FieldDrive,
    rates: RelaxationRates,
    medium: MediumParams,
    zeeman: ZeemanField | None,
):
    """Velocity integrand 1/denominator and the one-photon resonance velocity."""
    z_g = zeeman_shift(p.ground, zeeman)
    z_e = zeeman_shift(p.excited, zeeman)
    one_photon = probe.detuning - (z_e - z_g)
    k = medium.wavevector
    eit = 0.0j
    if p.partner is not None and p.coupling_rabi != 0.0:
        z_b = zeeman_shift(p.partner, zeeman)
        two_photon = probe.detuning - coupling.detuning + p.stark_shift + z_g - z_b
        eit = (abs(p.coupling_rabi) ** 2 / 4.0) / (rates.gamma_ba - 1j * two_photon)
    base = rates.gamma_ca + eit

    def inv_denominator(u):
        return 1.0 / (base - 1j * (one_photon + k * u))

    return inv_denominator, -one_photon / k


def doppler_factors(
    pathways,
    probe: FieldDrive,
    coupling: FieldDrive,
    rates: RelaxationRates,
    medium: MediumParams,
    zeeman: ZeemanField | None = None,
    rtol: float = 1e-6,
    max_panels: int = 4000,
) -> QuadratureResult:
    """Thermal averages of the pathway denominators, all in one refinement.

    Returns one complex value per pathway (units: seconds), normalized by the
    total density, i.e. the velocity weight integrates to one.
    """
    pathways = tuple(pathways)
    parts = [
        _pathway_integrand(p, probe, coupling, rates, medium, zeeman)
        for p in pathways
    ]
    v = medium.v_width
    span = 6.0 * v

    def integrand(u):
        w = maxwellian_weight(u, v)
        return np.stack([w * f(u) for f, _ in parts])

    breakpoints = [ur for _, ur in parts if -span < ur < span]
    return integrate_adaptive(
        integrand, -span, span,
        breakpoints=breakpoints, rtol=rtol, max_panels=max_panels,
    )


def doppler_factor(
    pathway: ProbePathway,
    probe: FieldDrive,
    coupling: FieldDrive,
    rates: RelaxationRates,
    medium: MediumParams,
    zeeman: ZeemanField | None = None,
    rtol: float = 1e-6,
    max_panels: int = 4000,
) -> complex:
    result = doppler_factors(
        [pathway], probe, coupling, rates, medium, zeeman, rtol, max_panels
    )
    return complex(result.value)


def susceptibility_pair(
    scheme: LevelScheme,
    probe: FieldDrive,
    coupling: FieldDrive,
    rates: RelaxationRates,
    populations: dict,
    medium: MediumParams,
    stark: StarkShifts = NO_STARK,
    zeeman: ZeemanField | None = None,
    rtol: float = 1e-6,
    max_panels: int = 4000,
) -> tuple[SusceptibilityPair, QuadratureResult]:
    """Total chi-, chi+ at the probe detuning carried by ``probe``.

    ``populations`` maps ground sublevels to steady-state occupations; they
    multiply the pathway partials and are treated as velocity-independent.
    Both components' pathways share one adaptive refinement, so mirror-
    symmetric schemes cancel to machine precision.
    """
    paths_minus = probe_pathways(scheme, probe, coupling, SIGMA_MINUS, stark)
    paths_plus = probe_pathways(scheme, probe, coupling, SIGMA_PLUS, stark)
    all_paths = paths_minus + paths_plus
    if not all_paths:
        empty = SusceptibilityPair.from_chis(0.0j, 0.0j, medium)
        return empty, QuadratureResult(np.zeros(0), np.zeros(0), 0, 0)
    result = doppler_factors(
        all_paths, probe, coupling, rates, medium, zeeman, rtol, max_panels
    )
    factors = np.atleast_1d(result.value)
    prefactor = 1j * medium.density / (HBAR * EPSILON_0)
    chis = np.array([
        prefactor * p.probe_dipole ** 2 * populations.get(p.ground, 0.0) * f
        for p, f in zip(all_paths, factors)
    ])
    chi_minus = complex(chis[: len(paths_minus)].sum())
    chi_plus = complex(chis[len(paths_minus):].sum())
    return SusceptibilityPair.from_chis(chi_minus, chi_plus, medium), result


def rotation_angle(pair: SusceptibilityPair, medium: MediumParams) -> RotationAngle:
    d = medium.cell_length
    lam = medium.wavelength
    return RotationAngle(
        exact=math.pi / lam * (pair.n_plus - pair.n_minus) * d,
        approx=math.pi / (2.0 * lam) * (pair.chi_plus - pair.chi_minus).real * d,
    )

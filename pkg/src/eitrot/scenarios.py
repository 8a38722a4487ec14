"""Composed experiments: detuning sweeps, power and temperature scans,
EIT transmission peak counting, and their CSV/metadata serialization.

Each sweep resolves a ScenarioConfig into a level scheme, field drives,
relaxation rates, and medium parameters, then evaluates the susceptibility
pair and the detection chain per detuning point. Ground-state populations
follow one of two policies: the default solves the steady state once at
two-photon resonance and reuses it across the sweep (the line shapes then
come entirely from the detuning factors), while ``per_point`` re-solves at
every detuning for sensitivity studies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

from .atom import (
    COUPLING,
    D1_WAVELENGTH,
    LINEAR,
    NO_STARK,
    PROBE,
    SCHEME_IDS,
    SIGMA_MINUS,
    SIGMA_PLUS,
    TWO_PI,
    FieldDrive,
    LevelScheme,
    StarkShifts,
    ZeemanField,
    build_level_scheme,
    coupling_polarization,
    stark_shifts,
)
from .detection import (
    TRACE_CSV_COLUMNS,
    DetectorSignals,
    JonesVector,
    detector_intensities,
    propagate_cell,
)
from .dynamics import (
    RelaxationRates,
    build_hamiltonian,
    build_liouvillian,
    population_map,
    solve_steady_state,
)
from .spectra import (
    SPECTRUM_CSV_COLUMNS,
    MediumParams,
    rotation_angle,
    susceptibility_pair,
)

__all__ = [
    "ScenarioConfig",
    "SweepResult",
    "Peak",
    "PeakPair",
    "TransmissionCurve",
    "steady_populations",
    "sweep_probe_detuning",
    "find_dispersion_peaks",
    "sweep_coupling_power",
    "sweep_temperature",
    "eit_transmission",
    "count_transmission_peaks",
    "write_csv",
    "write_metadata",
    "POWER_SCAN_CSV_COLUMNS",
    "TEMP_SCAN_CSV_COLUMNS",
    "EIT_CSV_COLUMNS",
]

POWER_SCAN_CSV_COLUMNS = [
    "power_mw", "rabi_mhz",
    "left_detuning_mhz", "left_phi_deg",
    "right_detuning_mhz", "right_phi_deg",
]

TEMP_SCAN_CSV_COLUMNS = [
    "temperature_k", "density_m3",
    "left_detuning_mhz", "left_phi_deg",
    "right_detuning_mhz", "right_phi_deg",
    "max_abs_phi_deg",
]

EIT_CSV_COLUMNS = [
    "detuning_mhz", "transmission_sigma_minus", "transmission_sigma_plus",
]


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved inputs for one sweep. All frequencies in rad/s."""

    scheme_id: str = "sigma_f2"
    probe_rabi: float = TWO_PI * 10e6
    probe_polarization: str = LINEAR
    coupling_rabi: float = TWO_PI * 100e6
    coupling_detuning: float = 0.0
    detuning_min: float = -TWO_PI * 400e6
    detuning_max: float = TWO_PI * 400e6
    points: int = 1201
    temperature: float = 328.15
    density: float | None = None
    cell_length: float = 0.05
    wavelength: float = D1_WAVELENGTH
    b_field: float = 0.0
    stark_enabled: bool = True
    population_policy: str = "fixed"
    cg_overrides: dict | None = None
    rates: RelaxationRates = field(default_factory=RelaxationRates)
    rtol: float = 1e-6
    max_panels: int = 4000

    def __post_init__(self):
        if self.scheme_id not in SCHEME_IDS:
            raise ValueError(f"unknown scheme_id: {self.scheme_id!r}")
        if not self.detuning_min < self.detuning_max:
            raise ValueError("detuning range must be ordered")
        if self.points < 2:
            raise ValueError("need at least two sweep points")
        if self.population_policy not in ("fixed", "per_point"):
            raise ValueError(
                f"population_policy must be 'fixed' or 'per_point',"
                f" got {self.population_policy!r}"
            )
        if self.probe_rabi < 0 or self.coupling_rabi < 0:
            raise ValueError("Rabi frequencies must be non-negative")

    def scheme(self) -> LevelScheme:
        return build_level_scheme(self.scheme_id, self.cg_overrides)

    def medium(self) -> MediumParams:
        return MediumParams.from_temperature(
            self.temperature,
            density=self.density,
            cell_length=self.cell_length,
            wavelength=self.wavelength,
        )

    def zeeman(self) -> ZeemanField:
        return ZeemanField(b_field=self.b_field)

    def coupling_drive(self) -> FieldDrive:
        return FieldDrive(
            COUPLING,
            coupling_polarization(self.scheme_id),
            self.coupling_rabi,
            self.coupling_detuning,
        )

    def probe_drive(self, detuning: float) -> FieldDrive:
        return FieldDrive(PROBE, self.probe_polarization, self.probe_rabi, detuning)

    def stark(self, scheme: LevelScheme) -> StarkShifts:
        if not self.stark_enabled:
            return NO_STARK
        return stark_shifts(self.coupling_drive(), scheme)

    def detunings(self) -> np.ndarray:
        return np.linspace(self.detuning_min, self.detuning_max, self.points)


@dataclass(frozen=True)
class Peak:
    detuning: float  # rad/s
    phi: float  # rad


@dataclass(frozen=True)
class PeakPair:
    """Extremal rotation on each side of the central zero crossing."""

    left: Peak | None
    right: Peak | None

    @property
    def found(self) -> bool:
        return self.left is not None and self.right is not None


@dataclass(frozen=True)
class SweepResult:
    """Column-oriented record of one detuning sweep."""

    detunings: np.ndarray
    chi_minus: np.ndarray
    chi_plus: np.ndarray
    n_minus: np.ndarray
    n_plus: np.ndarray
    alpha_minus: np.ndarray
    alpha_plus: np.ndarray
    phi_exact: np.ndarray
    phi_approx: np.ndarray
    signals: tuple[DetectorSignals, ...]
    metadata: dict

    def spectrum_rows(self):
        for i, det in enumerate(self.detunings):
            yield (
                det / TWO_PI / 1e6,
                self.chi_minus[i].real, self.chi_minus[i].imag,
                self.chi_plus[i].real, self.chi_plus[i].imag,
                self.n_plus[i] - self.n_minus[i],
                self.alpha_plus[i], self.alpha_minus[i],
                math.degrees(self.phi_exact[i]),
            )

    def trace_rows(self):
        for det, s in zip(self.detunings, self.signals):
            yield (
                det / TWO_PI / 1e6,
                s.d1 / s.i0, s.d2 / s.i0, s.d3 / s.i0, s.d4 / s.i0,
                math.degrees(0.5 * math.atan2(-(s.d3 - s.d4), -(s.d1 - s.d2))),
            )


@dataclass(frozen=True)
class TransmissionCurve:
    detunings: np.ndarray
    transmission: np.ndarray
    component: str
    metadata: dict


def steady_populations(
    cfg: ScenarioConfig,
    probe_detuning: float | None = None,
    probe_polarization: str | None = None,
) -> dict:
    """Ground-sublevel occupations from the full steady-state solve.

    Defaults to two-photon resonance (probe detuning equal to the coupling
    detuning), the representative point for the fixed-population policy.
    """
    scheme = cfg.scheme()
    det = cfg.coupling_detuning if probe_detuning is None else probe_detuning
    pol = cfg.probe_polarization if probe_polarization is None else probe_polarization
    probe = FieldDrive(PROBE, pol, cfg.probe_rabi, det)
    coupling = cfg.coupling_drive()
    zeeman = cfg.zeeman() if cfg.b_field else None
    h = build_hamiltonian(scheme, probe, coupling, cfg.stark(scheme), zeeman)
    lio = build_liouvillian(scheme, h, cfg.rates)
    rho = solve_steady_state(lio)
    pops = population_map(rho, scheme)
    return {s: pops[s].real for s in scheme.ground()}


def _population_metadata(scheme: LevelScheme, pops: dict) -> dict:
    return {scheme.label(s): pops[s] for s in scheme.ground()}


def sweep_probe_detuning(cfg: ScenarioConfig) -> SweepResult:
    scheme = cfg.scheme()
    coupling = cfg.coupling_drive()
    stark = cfg.stark(scheme)
    zeeman = cfg.zeeman() if cfg.b_field else None
    medium = cfg.medium()
    rates = cfg.rates
    dets = cfg.detunings()

    fixed_pops = None
    if cfg.population_policy == "fixed":
        fixed_pops = steady_populations(cfg)

    n = len(dets)
    chi_m = np.empty(n, complex)
    chi_p = np.empty(n, complex)
    n_m = np.empty(n)
    n_p = np.empty(n)
    a_m = np.empty(n)
    a_p = np.empty(n)
    phi_ex = np.empty(n)
    phi_ap = np.empty(n)
    signals = []
    for i, det in enumerate(dets):
        pops = fixed_pops
        if pops is None:
            pops = steady_populations(cfg, probe_detuning=det)
        probe = cfg.probe_drive(det)
        pair, _ = susceptibility_pair(
            scheme, probe, coupling, rates, pops, medium,
            stark=stark, zeeman=zeeman, rtol=cfg.rtol, max_panels=cfg.max_panels,
        )
        ang = rotation_angle(pair, medium)
        chi_m[i], chi_p[i] = pair.chi_minus, pair.chi_plus
        n_m[i], n_p[i] = pair.n_minus, pair.n_plus
        a_m[i], a_p[i] = pair.alpha_minus, pair.alpha_plus
        phi_ex[i], phi_ap[i] = ang.exact, ang.approx
        out = propagate_cell(JonesVector.linear(), pair, medium)
        signals.append(detector_intensities(out, 1.0))

    meta_pops = fixed_pops if fixed_pops is not None else steady_populations(cfg)
    metadata = {
        "scheme": cfg.scheme_id,
        "populations": _population_metadata(scheme, meta_pops),
        "population_policy": cfg.population_policy,
        "coupling_detuning_mhz": cfg.coupling_detuning / TWO_PI / 1e6,
        "density_m3": medium.density,
        "temperature_k": medium.temperature,
        "v_width_ms": medium.v_width,
    }
    return SweepResult(
        detunings=dets,
        chi_minus=chi_m, chi_plus=chi_p,
        n_minus=n_m, n_plus=n_p,
        alpha_minus=a_m, alpha_plus=a_p,
        phi_exact=phi_ex, phi_approx=phi_ap,
        signals=tuple(signals),
        metadata=metadata,
    )


def find_dispersion_peaks(
    result: SweepResult, flat_tol: float = 1e-12
) -> PeakPair:
    """Extremal angle on each side of the zero crossing nearest resonance.

    Spectra whose largest |phi| sits below ``flat_tol`` (radians) carry no
    dispersion feature and give an empty pair, as do spectra that never
    change sign.
    """
    phi = result.phi_exact
    dets = result.detunings
    if np.max(np.abs(phi)) < flat_tol:
        return PeakPair(None, None)
    sign = np.sign(phi)
    nonzero = sign != 0
    crossings = np.flatnonzero(np.diff(sign[nonzero]) != 0)
    if len(crossings) == 0:
        return PeakPair(None, None)
    idx_nonzero = np.flatnonzero(nonzero)
    center = result.metadata.get("coupling_detuning_mhz", 0.0) * TWO_PI * 1e6
    mid = lambda c: 0.5 * (
        dets[idx_nonzero[c]] + dets[idx_nonzero[c + 1]]
    )
    central = min(crossings, key=lambda c: abs(mid(c) - center))
    split = idx_nonzero[central]
    left_half = np.abs(phi[: split + 1])
    right_half = np.abs(phi[split + 1:])
    i_left = int(np.argmax(left_half))
    i_right = split + 1 + int(np.argmax(right_half))
    return PeakPair(
        left=Peak(float(dets[i_left]), float(phi[i_left])),
        right=Peak(float(dets[i_right]), float(phi[i_right])),
    )


def sweep_coupling_power(
    cfg: ScenarioConfig, powers: Sequence[float]
) -> list[tuple[float, float, PeakPair]]:
    """Per-power dispersion peaks: (power W, coupling Rabi rad/s, peaks)."""
    from .atom import rabi_from_power

    if any(p <= 0 for p in powers):
        raise ValueError("powers must be positive")
    if list(powers) != sorted(powers):
        raise ValueError("powers must be ascending")
    out = []
    for p in powers:
        rabi = rabi_from_power(p, COUPLING)
        sub = replace(cfg, coupling_rabi=rabi)
        peaks = find_dispersion_peaks(sweep_probe_detuning(sub))
        out.append((p, rabi, peaks))
    return out


def sweep_temperature(
    cfg: ScenarioConfig, temps: Sequence[float]
) -> list[tuple[float, SweepResult]]:
    """One full detuning sweep per cell temperature (kelvin).

    Temperature sets both the vapor density (calibrated curve) and the
    Maxwellian width; an explicit density in ``cfg`` is deliberately
    dropped so each point sits on the curve.
    """
    out = []
    for t in temps:
        sub = replace(cfg, temperature=t, density=None)
        out.append((t, sweep_probe_detuning(sub)))
    return out


def eit_transmission(cfg: ScenarioConfig, component: str) -> TransmissionCurve:
    """Probe transmission exp(-alpha d) for one circular component.

    The steady state is solved with the probe restricted to that component,
    matching a measurement where only one circular polarization enters.
    """
    if component not in (SIGMA_MINUS, SIGMA_PLUS):
        raise ValueError("component must be sigma_minus or sigma_plus")
    sub = replace(cfg, probe_polarization=component)
    result = sweep_probe_detuning(sub)
    alpha = result.alpha_minus if component == SIGMA_MINUS else result.alpha_plus
    transmission = np.exp(-alpha * sub.medium().cell_length)
    return TransmissionCurve(
        detunings=result.detunings,
        transmission=transmission,
        component=component,
        metadata=result.metadata,
    )


def count_transmission_peaks(
    curve: TransmissionCurve, prominence_fraction: float = 0.02
) -> int:
    """Number of local transmission maxima above a prominence floor.

    The floor is a fraction of the curve's peak-to-valley range, so the
    count is stable under grid refinement and immune to quadrature-level
    ripple.
    """
    t = curve.transmission
    span = float(np.max(t) - np.min(t))
    if span == 0.0:
        return 0
    peaks, _ = find_peaks(t, prominence=prominence_fraction * span)
    return int(len(peaks))


def _format_float(x: float) -> str:
    return f"{x:.9g}"


def write_csv(path, columns: Sequence[str], rows) -> None:
    """Write rows with fixed 9-significant-digit formatting, deterministic."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_float(float(x)) for x in row) + "\n")


def write_metadata(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

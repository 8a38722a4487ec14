"""Sweeps, peak extraction, scans, and the transmission census."""

import math
from dataclasses import replace

import numpy as np
import pytest

from eitrot.atom import SIGMA_MINUS, SIGMA_PLUS, TWO_PI
from eitrot.scenarios import (
    Peak,
    PeakPair,
    ScenarioConfig,
    SweepResult,
    count_transmission_peaks,
    eit_transmission,
    find_dispersion_peaks,
    steady_populations,
    sweep_coupling_power,
    sweep_probe_detuning,
    sweep_temperature,
)

FIG_CFG = ScenarioConfig(
    scheme_id="sigma_f2",
    probe_rabi=TWO_PI * 10e6,
    coupling_rabi=TWO_PI * 80e6,
    density=1.8e17,
    temperature=328.15,
    detuning_min=-TWO_PI * 40e6,
    detuning_max=TWO_PI * 40e6,
    points=81,
)

EIT_CFG = ScenarioConfig(
    scheme_id="sigma_f2",
    probe_rabi=TWO_PI * 1e6,
    coupling_rabi=TWO_PI * 30e6,
    density=1e17,
    temperature=328.15,
    b_field=10e-4,
    detuning_min=-TWO_PI * 30e6,
    detuning_max=TWO_PI * 30e6,
    points=301,
)


def synthetic_sweep(phi, detunings, coupling_detuning_mhz=0.0):
    n = len(detunings)
    zeros = np.zeros(n)
    return SweepResult(
        detunings=np.asarray(detunings, dtype=float),
        chi_minus=zeros.astype(complex), chi_plus=zeros.astype(complex),
        n_minus=zeros + 1, n_plus=zeros + 1,
        alpha_minus=zeros, alpha_plus=zeros,
        phi_exact=np.asarray(phi, dtype=float), phi_approx=np.asarray(phi, dtype=float),
        signals=(), metadata={"coupling_detuning_mhz": coupling_detuning_mhz},
    )


class TestConfigValidation:
    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            ScenarioConfig(scheme_id="nope")
        with pytest.raises(ValueError):
            ScenarioConfig(points=1)
        with pytest.raises(ValueError):
            ScenarioConfig(detuning_min=1.0, detuning_max=-1.0)
        with pytest.raises(ValueError):
            ScenarioConfig(population_policy="sometimes")
        with pytest.raises(ValueError):
            ScenarioConfig(probe_rabi=-1.0)

    def test_medium_uses_vapor_curve_when_density_omitted(self):
        assert ScenarioConfig(temperature=328.15).medium().density == pytest.approx(
            1.62e17, rel=1e-12)
        assert ScenarioConfig(density=3e17).medium().density == 3e17


class TestPeakFinding:
    def test_dispersion_shape_extrema(self):
        x = np.linspace(-4.0, 4.0, 801)
        peaks = find_dispersion_peaks(synthetic_sweep(x * np.exp(-x * x), x))
        assert peaks.found
        assert peaks.left.detuning == pytest.approx(-1 / math.sqrt(2), abs=0.011)
        assert peaks.right.detuning == pytest.approx(1 / math.sqrt(2), abs=0.011)
        assert peaks.left.phi == pytest.approx(-math.exp(-0.5) / math.sqrt(2), abs=1e-4)
        assert peaks.right.phi == pytest.approx(math.exp(-0.5) / math.sqrt(2), abs=1e-4)

    def test_flat_spectrum_has_no_peaks(self):
        x = np.linspace(-1.0, 1.0, 41)
        assert not find_dispersion_peaks(synthetic_sweep(np.zeros(41), x)).found

    def test_one_signed_spectrum_has_no_peaks(self):
        x = np.linspace(-1.0, 1.0, 41)
        assert not find_dispersion_peaks(synthetic_sweep(np.exp(-x * x), x)).found

    def test_crossing_selection_honors_center(self):
        # two zero crossings; the one nearer the stated resonance wins
        x = np.linspace(-4.0, 4.0, 1601)
        phi = np.sin(x) * np.exp(-0.1 * x * x)
        center_mhz = 3.0 / (TWO_PI * 1e6)
        peaks = find_dispersion_peaks(synthetic_sweep(phi, x, center_mhz))
        assert peaks.found
        assert peaks.left.detuning < math.pi  # crossing at pi, not at 0


class TestSweep:
    def test_symmetric_scheme_never_rotates(self):
        cfg = replace(FIG_CFG, scheme_id="pi_f2", points=21)
        result = sweep_probe_detuning(cfg)
        assert np.max(np.abs(result.phi_exact)) < 1e-10
        assert not find_dispersion_peaks(result).found

    def test_rotating_scheme_dispersion_profile(self):
        result = sweep_probe_detuning(FIG_CFG)
        peaks = find_dispersion_peaks(result)
        assert peaks.found
        assert peaks.left.phi > 0 > peaks.right.phi
        assert abs(peaks.left.phi) != pytest.approx(abs(peaks.right.phi), rel=0.05)
        # detector trace and direct angle agree point by point
        for s, phi in zip(result.signals, result.phi_exact):
            rec = 0.5 * math.atan2(-(s.d3 - s.d4), -(s.d1 - s.d2))
            assert rec == pytest.approx(phi, abs=1e-9)

    def test_population_metadata_and_policy(self):
        fixed = sweep_probe_detuning(replace(FIG_CFG, points=11))
        assert fixed.metadata["population_policy"] == "fixed"
        pops = fixed.metadata["populations"]
        assert set(pops) >= {"a1", "a2", "a3", "b1"}
        assert all(v >= 0 for v in pops.values())
        # the strong coupling parks a good fraction in the excited manifold,
        # so the eight ground occupations sum to less than one
        assert 0.6 < sum(pops.values()) < 1.0
        per_point = sweep_probe_detuning(
            replace(FIG_CFG, points=11, population_policy="per_point"))
        assert per_point.metadata["population_policy"] == "per_point"
        assert np.max(np.abs(per_point.phi_exact - fixed.phi_exact)) > 0.0

    def test_steady_populations_default_point(self):
        pops = steady_populations(replace(FIG_CFG, points=11))
        scheme = FIG_CFG.scheme()
        a = [pops[scheme.by_label(l)] for l in ("a1", "a2", "a3")]
        assert a[0] == pytest.approx(0.226, abs=0.015)
        assert a[1] == pytest.approx(0.233, abs=0.015)
        assert a[2] == pytest.approx(0.066, abs=0.015)


class TestScans:
    def test_power_scan_is_monotone_in_both_peaks(self):
        rows = sweep_coupling_power(
            replace(FIG_CFG, points=61), [6e-3, 10e-3, 15e-3])
        assert [r[0] for r in rows] == [6e-3, 10e-3, 15e-3]
        lefts = [r[2].left.phi for r in rows]
        rights = [abs(r[2].right.phi) for r in rows]
        assert lefts == sorted(lefts)
        assert rights == sorted(rights)
        assert rows[0][1] < rows[1][1] < rows[2][1]

    def test_power_scan_input_validation(self):
        with pytest.raises(ValueError):
            sweep_coupling_power(FIG_CFG, [10e-3, 6e-3])
        with pytest.raises(ValueError):
            sweep_coupling_power(FIG_CFG, [0.0, 6e-3])

    def test_temperature_scan_follows_vapor_curve(self):
        cfg = replace(FIG_CFG, points=41, density=1.8e17)
        rows = sweep_temperature(cfg, [328.15, 338.15])
        n_cold = rows[0][1].metadata["density_m3"]
        n_hot = rows[1][1].metadata["density_m3"]
        # explicit density is dropped; both points sit on the curve
        assert n_cold == pytest.approx(1.62e17, rel=1e-9)
        assert n_hot / n_cold == pytest.approx(2.302, abs=0.002)
        hot_max = np.max(np.abs(rows[1][1].phi_exact))
        cold_max = np.max(np.abs(rows[0][1].phi_exact))
        assert hot_max > cold_max


class TestTransmission:
    def test_peak_census_with_field(self):
        assert count_transmission_peaks(eit_transmission(EIT_CFG, SIGMA_MINUS)) == 3
        assert count_transmission_peaks(eit_transmission(EIT_CFG, SIGMA_PLUS)) == 2

    def test_peak_census_degenerate(self):
        cfg = replace(EIT_CFG, b_field=0.0)
        assert count_transmission_peaks(eit_transmission(cfg, SIGMA_MINUS)) == 1
        assert count_transmission_peaks(eit_transmission(cfg, SIGMA_PLUS)) == 1

    def test_census_stable_under_grid_doubling(self):
        cfg = replace(EIT_CFG, points=601)
        assert count_transmission_peaks(eit_transmission(cfg, SIGMA_MINUS)) == 3
        assert count_transmission_peaks(eit_transmission(cfg, SIGMA_PLUS)) == 2

    def test_transmission_is_physical(self):
        curve = eit_transmission(EIT_CFG, SIGMA_MINUS)
        assert np.all(curve.transmission > 0.0)
        assert np.all(curve.transmission <= 1.0)
        assert curve.component == SIGMA_MINUS

    def test_rejects_linear_component(self):
        with pytest.raises(ValueError):
            eit_transmission(EIT_CFG, "linear")

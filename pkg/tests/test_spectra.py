"""Vapor properties, Doppler averages, susceptibilities, rotation angles."""

import math

import numpy as np
import pytest

from eitrot.atom import (
    COUPLING,
    LINEAR,
    PROBE,
    SIGMA_MINUS,
    SIGMA_PLUS,
    TWO_PI,
    FieldDrive,
    build_level_scheme,
    probe_pathways,
    stark_shifts,
)
from eitrot.dynamics import RelaxationRates
from eitrot.spectra import (
    MediumParams,
    SusceptibilityPair,
    doppler_factor,
    maxwellian_weight,
    rb_vapor_density,
    rotation_angle,
    susceptibility_pair,
    thermal_v_width,
)

GAMMA_CA = TWO_PI * 3.5e6
GAMMA_BA = TWO_PI * 1.1e6

SCHEME = build_level_scheme("sigma_f2")
WC80 = FieldDrive(COUPLING, SIGMA_MINUS, TWO_PI * 80e6)


def probe_at(det, rabi=TWO_PI * 10e6):
    return FieldDrive(PROBE, LINEAR, rabi, detuning=det)


def bare_path(probe, coupling=WC80):
    # a3 -> c5 has no coupling partner: plain two-level response
    return next(p for p in probe_pathways(SCHEME, probe, coupling, SIGMA_PLUS)
                if SCHEME.label(p.excited) == "c5")


class TestVapor:
    def test_anchor_density(self):
        assert rb_vapor_density(328.15) == pytest.approx(1.62e17, rel=1e-12)

    def test_ten_kelvin_step(self):
        # independent evaluation of the saturated-vapor curve, liquid branch
        def torr(t):
            return 10 ** (15.88253 - 4529.635 / t + 0.00058663 * t
                          - 2.99138 * math.log10(t))

        expected = 1.62e17 * (torr(338.15) / 338.15) / (torr(328.15) / 328.15)
        assert rb_vapor_density(338.15) == pytest.approx(expected, rel=1e-12)
        assert rb_vapor_density(338.15) / rb_vapor_density(328.15) == pytest.approx(
            2.302, abs=0.002)

    def test_rejects_nonpositive_temperature(self):
        with pytest.raises(ValueError):
            rb_vapor_density(0.0)

    def test_thermal_width(self):
        v = thermal_v_width(328.15)
        assert v == pytest.approx(
            math.sqrt(2 * 1.380649e-23 * 328.15 / 1.443e-25), rel=1e-12)
        # V/sqrt(2) is the rms along the beam, a few hundred m/s warm
        assert 200.0 < v < 300.0

    def test_maxwellian_weight(self):
        v = 240.0
        u = np.linspace(-8 * v, 8 * v, 400001)
        total = np.trapezoid(maxwellian_weight(u, v, n0=3.0e17), u)
        assert total == pytest.approx(3.0e17, rel=1e-9)
        peak = maxwellian_weight(0.0, v)
        assert maxwellian_weight(v, v) == pytest.approx(peak / math.e, rel=1e-12)

    def test_medium_params_validation(self):
        with pytest.raises(ValueError):
            MediumParams(density=-1.0, temperature=328.15, v_width=240.0)
        m = MediumParams.from_temperature(328.15)
        assert m.density == pytest.approx(1.62e17, rel=1e-12)
        assert m.wavevector == pytest.approx(TWO_PI / 794.979e-9, rel=1e-12)


class TestDopplerFactor:
    def test_cold_limit_is_stationary_integrand(self):
        det = TWO_PI * 5e6
        probe = probe_at(det)
        medium = MediumParams(density=1.62e17, temperature=328.15, v_width=1e-3)
        rates = RelaxationRates()
        got = doppler_factor(bare_path(probe), probe, WC80, rates, medium)
        assert got == pytest.approx(1.0 / (GAMMA_CA - 1j * det), rel=1e-6)

    def test_coupling_off_is_pure_voigt(self):
        det = TWO_PI * 2e6
        probe = probe_at(det)
        off = FieldDrive(COUPLING, SIGMA_MINUS, 0.0)
        medium = MediumParams.from_temperature(328.15)
        rates = RelaxationRates()
        k = medium.wavevector
        v = medium.v_width
        path = next(p for p in probe_pathways(SCHEME, probe, off, SIGMA_MINUS)
                    if SCHEME.label(p.excited) == "c1")
        got = doppler_factor(path, probe, off, rates, medium, rtol=1e-9)
        u = np.linspace(-6 * v, 6 * v, 2_000_001)
        oracle = np.trapezoid(
            maxwellian_weight(u, v) / (GAMMA_CA - 1j * (det + k * u)), u)
        assert got == pytest.approx(oracle, rel=1e-6)

    def test_eit_term_suppresses_on_resonance(self):
        probe = probe_at(0.0)
        medium = MediumParams.from_temperature(328.15)
        rates = RelaxationRates()
        path = next(p for p in probe_pathways(SCHEME, probe, WC80, SIGMA_MINUS)
                    if SCHEME.label(p.excited) == "c1")
        with_eit = doppler_factor(path, probe, WC80, rates, medium)
        without = doppler_factor(
            bare_path(probe), probe, WC80, rates, medium)
        assert abs(with_eit) < 0.2 * abs(without)


class TestSusceptibility:
    def setup_method(self):
        self.rates = RelaxationRates()
        self.pops = {SCHEME.by_label(l): v for l, v in
                     (("a1", 0.224), ("a2", 0.230), ("a3", 0.058))}
        self.medium = MediumParams(density=1.8e17, temperature=328.15,
                                   v_width=thermal_v_width(328.15))

    def test_scales_linearly_with_density(self):
        probe = probe_at(TWO_PI * 3e6)
        stark = stark_shifts(WC80, SCHEME)
        pair1, _ = susceptibility_pair(SCHEME, probe, WC80, self.rates,
                                       self.pops, self.medium, stark=stark)
        double = MediumParams(density=2 * self.medium.density, temperature=328.15,
                              v_width=self.medium.v_width)
        pair2, _ = susceptibility_pair(SCHEME, probe, WC80, self.rates,
                                       self.pops, double, stark=stark)
        assert pair2.chi_minus == pytest.approx(2 * pair1.chi_minus, rel=1e-9)
        assert pair2.chi_plus == pytest.approx(2 * pair1.chi_plus, rel=1e-9)

    def test_absorptive_part_positive(self):
        pair, _ = susceptibility_pair(SCHEME, probe_at(TWO_PI * 3e6), WC80,
                                      self.rates, self.pops, self.medium,
                                      stark=stark_shifts(WC80, SCHEME))
        assert pair.chi_minus.imag > 0
        assert pair.chi_plus.imag > 0
        assert pair.alpha_minus > 0
        assert pair.alpha_plus > 0

    def test_mirror_scheme_components_cancel(self):
        scheme = build_level_scheme("pi_f2")
        coupling = FieldDrive(COUPLING, "pi", TWO_PI * 80e6)
        pops = {s: 1.0 / 8.0 for s in scheme.ground()}
        pair, _ = susceptibility_pair(scheme, probe_at(TWO_PI * 2e6), coupling,
                                      self.rates, pops, self.medium)
        assert pair.chi_plus == pytest.approx(pair.chi_minus, rel=0, abs=1e-22)


class TestRotationAngle:
    def test_small_chi_reference_value(self):
        medium = MediumParams(density=1e17, temperature=328.15, v_width=240.0,
                              cell_length=0.05, wavelength=794.979e-9)
        pair = SusceptibilityPair.from_chis(0.0j, 1e-6 + 0.0j, medium)
        phi = rotation_angle(pair, medium)
        assert phi.approx == pytest.approx(0.0987955, rel=1e-5)
        assert phi.exact == pytest.approx(phi.approx, rel=1e-5)

    def test_exact_tracks_approx_for_small_chi(self):
        medium = MediumParams.from_temperature(328.15)
        rng = np.random.default_rng(3)
        for _ in range(25):
            chi_m = complex(*rng.uniform(-1e-3, 1e-3, 2))
            chi_p = complex(*rng.uniform(-1e-3, 1e-3, 2))
            pair = SusceptibilityPair.from_chis(chi_m, chi_p, medium)
            phi = rotation_angle(pair, medium)
            if abs(phi.approx) > 1e-6:
                assert phi.exact == pytest.approx(phi.approx, rel=0.01)

    def test_index_from_chi(self):
        medium = MediumParams.from_temperature(328.15)
        pair = SusceptibilityPair.from_chis(4e-4 + 1e-5j, -2e-4 + 3e-5j, medium)
        assert pair.n_minus == pytest.approx(math.sqrt(1.0 + 4e-4), rel=1e-12)
        assert pair.n_plus == pytest.approx(math.sqrt(1.0 - 2e-4), rel=1e-12)
        k = medium.wavevector
        assert pair.alpha_minus == pytest.approx(
            2 * k * np.sqrt(1 + 4e-4 + 1e-5j).imag, rel=1e-12)

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heraldshape.errors import FieldError, InvariantError
from heraldshape.heralding import DetectorSpectralResponse, SignalDensityMatrix, SpectralFilter, heralded_density_matrix
from heraldshape.metrics import (
    MARGINAL,
    SATISFIED,
    VIOLATED,
    RegimeWarning,
    fidelity,
    heralding_rate_modulated,
    heralding_rate_pulsed,
    idler_power_spectrum,
    purity,
    rms_width,
    simulated_heralding_fraction,
    validate_regime,
)
from heraldshape.numerics import Field1D, Field2D, TimeGrid
from heraldshape.shaping import apply_modulator, gaussian_modulator
from heraldshape.states import GaussianBiphotonParams, make_gaussian_joint

G = TimeGrid.symmetric(10.0, 801)


def gauss(center=0.0, sigma=1.0, k=0.0):
    return Field1D.from_function(G, lambda t: np.exp(-((t - center) ** 2) / (2 * sigma**2) + 1j * k * t))


def mixed(shapes, probs):
    """Density matrix sum_k p_k |f_k><f_k| from normalized fields."""
    acc = sum(p * np.outer(f.normalized().values, f.normalized().values.conj()) for f, p in zip(shapes, probs))
    return SignalDensityMatrix(Field2D(G, G, acc))


class TestPurity:
    def test_rank_one(self):
        assert purity(mixed([gauss(0.3, 1.2, 0.4)], [1.0])) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_maximally_mixed(self, d):
        # Hermite-Gaussian functions are orthogonal
        base = gauss().values
        t = G.times
        herm = [np.ones_like(t), 2 * t, 4 * t**2 - 2, 8 * t**3 - 12 * t, 16 * t**4 - 48 * t**2 + 12]
        shapes = [Field1D(G, h * base) for h in herm[:d]]
        assert purity(mixed(shapes, [1 / d] * d)) == pytest.approx(1 / d, abs=1e-6)

    def test_unitary_invariance(self):
        rho = mixed([gauss(-1.0), gauss(1.5, 0.7, 2.0), gauss(0.2, 2.0)], [0.5, 0.3, 0.2])
        n = G.n
        U = np.fft.fft(np.eye(n)) / math.sqrt(n)  # unitary DFT in the orthonormal sample basis
        rotated = U @ rho.values @ U.conj().T
        assert purity(SignalDensityMatrix(Field2D(G, G, rotated))) == pytest.approx(purity(rho), abs=1e-8)

    def test_rejects_invalid(self):
        rho = mixed([gauss()], [1.0])
        bad = SignalDensityMatrix(Field2D(G, G, 2 * rho.values))
        with pytest.raises(InvariantError):
            purity(bad)

    def test_delta_limit(self):
        g = TimeGrid.symmetric(5.0, 1024)
        state = make_gaussian_joint(GaussianBiphotonParams(6 * g.dt, 50.0), g, truncate=True)
        rho = heralded_density_matrix(apply_modulator(state, gaussian_modulator(1.0, g)), 0.0,
                                      DetectorSpectralResponse(1.0))
        assert purity(rho) == pytest.approx(1 / math.sqrt(2), rel=0.02)


class TestFidelity:
    def test_identical(self):
        f = gauss(0.4, 1.1, 0.9)
        assert fidelity(f, f) == pytest.approx(1.0, abs=1e-12)

    def test_even_odd(self):
        even = gauss()
        odd = Field1D(G, G.times * even.values)
        assert fidelity(even, odd) == pytest.approx(0.0, abs=1e-12)

    def test_phase_ramp_gaussian_overlap(self):
        # |int exp(-t^2/s^2) exp(i w t) dt|^2 / (int exp(-t^2/s^2))^2 = exp(-w^2 s^2 / 2)
        sigma, omega = 1.0, 1.0
        assert fidelity(gauss(sigma=sigma, k=omega), gauss(sigma=sigma)) == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_symmetric_and_phase_invariant(self):
        a, b = gauss(0.3, 1.0, 0.5), gauss(-0.2, 1.4)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-14)
        assert fidelity(a.scaled(np.exp(2.0j)), b) == pytest.approx(fidelity(a, b), abs=1e-14)

    def test_zero_target(self):
        with pytest.raises(FieldError):
            fidelity(gauss(), Field1D(G, np.zeros(G.n)))


class TestRates:
    def test_modulated_value(self):
        r = heralding_rate_modulated(10, 0.1, 1, 10)
        assert r.rate == pytest.approx(0.1)
        assert r.modulator_fraction == pytest.approx(0.1)
        assert not r.acceptance_clamped

    def test_pulsed_value(self):
        assert heralding_rate_pulsed(10, 0.1) == pytest.approx(1.0)

    def test_pulsed_ratio(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            for tm, tu in [(1, 10), (0.3, 50), (2, 2.5)]:
                r = heralding_rate_modulated(3.0, 0.05, tm, tu)
                assert heralding_rate_pulsed(3.0, 0.05) == pytest.approx(r.rate * tu / tm, rel=1e-14)
                assert heralding_rate_pulsed(3.0, 0.05) >= r.rate

    def test_continuity_at_full_width(self):
        with pytest.warns(RegimeWarning):
            r = heralding_rate_modulated(2.0, 0.1, 5.0, 5.0)
        assert r.rate == pytest.approx(heralding_rate_pulsed(2.0, 0.1))
        near = heralding_rate_modulated(2.0, 0.1, 5.0 - 1e-9, 5.0).rate
        assert near == pytest.approx(r.rate, rel=1e-8)

    def test_acceptance_clamped(self):
        r = heralding_rate_modulated(20, 0.1, 1, 10)
        assert r.rate == pytest.approx(0.2)
        assert r.filter_acceptance == 1.0 and r.acceptance_clamped

    @pytest.mark.parametrize("args", [(0, 0.1, 1, 10), (1, -0.1, 1, 10), (1, 0.1, math.inf, 10)])
    def test_rejects_non_positive(self, args):
        with pytest.raises(ValueError):
            heralding_rate_modulated(*args)
        with pytest.raises(ValueError):
            heralding_rate_pulsed(0, 0.1)

    def test_simulated_transmission_and_acceptance(self):
        tc, tu, tm, wf = 0.2, 8.0, 1.0, 0.5
        g = TimeGrid.symmetric(32.0, 1281)
        modded = apply_modulator(make_gaussian_joint(GaussianBiphotonParams(tc, tu), g, points_per_tc=4),
                                 gaussian_modulator(tm, g))
        sim = simulated_heralding_fraction(modded, SpectralFilter("gaussian", wf))
        assert sim.transmitted == pytest.approx(1 / math.sqrt(1 + (tu**2 + tc**2) / (4 * tm**2)), rel=1e-6)
        # idler spectrum of the modulated state is approximately Gaussian with rms width ~ 1/tc
        omegas, S = idler_power_spectrum(modded)
        assert np.sum(S) * (omegas[1] - omegas[0]) == pytest.approx(1.0, abs=1e-12)
        assert 0.5 * wf * tc < sim.filter_acceptance < 2 * wf * tc
        formula = heralding_rate_modulated(wf, tc, tm, tu).rate
        assert 0.5 < sim.rate / formula < 2.0


class TestRegime:
    def test_all_satisfied(self):
        rep = validate_regime(0.01, 1, 100, 0.01, 0.01)
        assert set(rep.verdicts.values()) == {SATISFIED}
        assert rep.ok

    def test_equal_spread_violates(self):
        rep = validate_regime(0.01, 1, 1, 0.01)
        assert rep.verdicts["spread (t_m<t_u)"] == VIOLATED
        assert not rep.ok

    def test_marginal_resolution(self):
        rep = validate_regime(0.01, 1, 100, omega_d=0.3)
        assert rep.verdicts["resolution (t_m*w_d<<1)"] == MARGINAL

    def test_threshold_edges(self):
        assert validate_regime(0.1, 1, 10).verdicts["correlation (t_c<<t_m)"] == SATISFIED
        assert validate_regime(0.2, 1, 10).verdicts["correlation (t_c<<t_m)"] == MARGINAL
        assert validate_regime(0.5, 1, 10).verdicts["correlation (t_c<<t_m)"] == VIOLATED

    def test_acceptance_flag(self):
        rep = validate_regime(0.1, 1, 10, omega_f=20)
        assert rep.verdicts["acceptance (w_f*t_c<=1)"] == MARGINAL
        assert rep.filter_acceptance == pytest.approx(2.0)

    def test_report_round_trip(self):
        rep = validate_regime(0.05, 1, 20, 0.05, 0.2)
        d = rep.as_dict()
        assert d["ratio_cm"] == pytest.approx(0.05)
        assert d["thresholds"]["satisfied"] == 0.1
        assert len(rep.lines()) == len(rep.verdicts)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.001, 1), st.floats(0.1, 10), st.floats(0.1, 100), st.floats(0.001, 5), st.floats(0, 5),
           st.floats(0.1, 0.99))
    def test_monotone(self, tc, tm, tu, wf, wd, shrink):
        rank = {SATISFIED: 0, MARGINAL: 1, VIOLATED: 2}
        base = validate_regime(tc, tm, tu, wf, wd).verdicts
        for better in (validate_regime(tc * shrink, tm, tu, wf, wd), validate_regime(tc, tm, tu / shrink, wf, wd),
                       validate_regime(tc, tm, tu, wf * shrink, wd), validate_regime(tc, tm, tu, wf, wd * shrink)):
            for k, v in better.verdicts.items():
                assert rank[v] <= rank[base[k]], (k, v, base[k])


def test_rms_width_of_gaussian():
    assert rms_width(gauss(0.7, 1.3)) == pytest.approx(1.3, rel=1e-9)

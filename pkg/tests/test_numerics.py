import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heraldshape.errors import FieldError, GridError
from heraldshape.numerics import (
    Field1D,
    Field2D,
    TimeGrid,
    auto_grid,
    convolve_1d,
    fourier_kernel_project,
    integrate_1d,
    spectral_norm2,
    spectrum,
    window_grid,
)


def field(grid, func):
    return Field1D.from_function(grid, func)


class TestTimeGrid:
    def test_samples_and_frequency_step(self):
        g = TimeGrid(-1.0, 0.25, 9)
        np.testing.assert_allclose(g.times, np.linspace(-1, 1, 9))
        assert g.omega_step == pytest.approx(2 * math.pi / (9 * 0.25))
        assert g.nyquist == pytest.approx(math.pi / 0.25)

    @pytest.mark.parametrize("kw", [dict(t_start=0, dt=0, n=16), dict(t_start=0, dt=-1, n=16),
                                    dict(t_start=0, dt=0.1, n=7), dict(t_start=math.nan, dt=0.1, n=16)])
    def test_rejects_bad_parameters(self, kw):
        with pytest.raises(GridError):
            TimeGrid(**kw)

    def test_symmetric_contains_endpoints(self):
        g = TimeGrid.symmetric(3.0, 61)
        assert g.t_start == -3.0
        assert g.t_end == pytest.approx(3.0)
        assert g.index_of(0.0) == 30

    def test_index_of_off_grid(self):
        with pytest.raises(GridError):
            TimeGrid.symmetric(1.0, 11).index_of(0.05)

    def test_auto_grid_resolution_and_span(self):
        g = auto_grid(0.1, 2.0, 1.0)
        assert g.dt <= 0.1 / 6
        assert g.covers(-8.0, 8.0)

    def test_auto_grid_limit(self):
        with pytest.raises(GridError):
            auto_grid(0.01, 100.0, 1.0, max_n=2048)

    def test_window_grid(self):
        g = window_grid(2.0, 101, 5.0, center=1.0)
        assert g.t_start == pytest.approx(-9.0)
        assert g.t_end == pytest.approx(11.0)


class TestIntegrate:
    def test_zero(self):
        assert integrate_1d(Field1D(TimeGrid(0, 0.1, 32), np.zeros(32))) == 0

    def test_gaussian(self):
        g = TimeGrid.symmetric(8.0, 512)
        assert integrate_1d(field(g, lambda t: np.exp(-t**2))) == pytest.approx(math.sqrt(math.pi), abs=1e-10)

    def test_constant_rectangle(self):
        g = TimeGrid.symmetric(0.5, 11, center=0.5)
        assert integrate_1d(field(g, np.ones_like)) == pytest.approx(1.0, abs=1e-12)

    def test_piecewise_linear_exact(self):
        g = TimeGrid(0.0, 0.5, 9)  # kink at t = 2 is a grid point
        f = field(g, lambda t: np.where(t < 2, t, 4 - t))
        assert integrate_1d(f) == pytest.approx(4.0, abs=1e-14)

    def test_non_finite(self):
        v = np.ones(16)
        v[3] = np.inf
        with pytest.raises(FieldError, match="non-finite field"):
            integrate_1d(Field1D(TimeGrid(0, 0.1, 16), v))

    @pytest.mark.parametrize("func,exact", [
        (lambda t: np.cos(3 * t), math.sin(3) / 3),
        (lambda t: t**3 + 1j * np.cos(3 * t), 0.25 + 1j * math.sin(3) / 3),
        (lambda t: np.exp(-(t - 0.3) ** 2), math.sqrt(math.pi) / 2 * (math.erf(0.7) + math.erf(0.3))),
    ])
    def test_second_order_convergence(self, func, exact):
        errors = []
        for n in (17, 33, 65, 129):
            g = TimeGrid(0.0, 1.0 / (n - 1), n)
            errors.append(abs(integrate_1d(field(g, func)) - exact))
        ratios = [a / b for a, b in zip(errors, errors[1:])]
        assert all(r >= 4.0 * (1 - 1e-12) for r in ratios), ratios


class TestFourierKernel:
    def test_gaussian_dc(self):
        g = TimeGrid.symmetric(12.0, 1024)
        f = field(g, lambda t: np.exp(-t**2 / 2))
        assert fourier_kernel_project(f, 0.0) == pytest.approx(math.sqrt(2 * math.pi), abs=1e-10)

    def test_gaussian_transform(self):
        g = TimeGrid.symmetric(12.0, 1024)
        f = field(g, lambda t: np.exp(-t**2 / 2))
        assert fourier_kernel_project(f, 1.0) == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-0.5), abs=1e-9)

    def test_kernel_sign(self):
        # a positive-frequency carrier exp(-i w0 t) is picked up at omega = +w0
        g = TimeGrid.symmetric(12.0, 1024)
        f = field(g, lambda t: np.exp(-t**2 / 2 - 2j * t))
        assert abs(fourier_kernel_project(f, 2.0)) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-9)

    def test_zero(self):
        f = Field1D(TimeGrid(0, 0.1, 16), np.zeros(16))
        assert fourier_kernel_project(f, 3.0) == 0

    def test_nyquist(self):
        g = TimeGrid(0, 0.1, 16)
        with pytest.raises(GridError, match="frequency exceeds grid resolution"):
            fourier_kernel_project(Field1D(g, np.ones(16)), 40.0)

    def test_dc_matches_integrate_bitwise(self):
        rng = np.random.default_rng(3)
        f = Field1D(TimeGrid(-1, 0.01, 201), rng.normal(size=201) + 1j * rng.normal(size=201))
        assert fourier_kernel_project(f, 0.0) == integrate_1d(f)


class TestConvolve:
    def test_impulse_identity(self):
        g = TimeGrid.symmetric(4.0, 161)
        f = field(g, lambda t: np.exp(-t**2) * (1 + 0.3j * t))
        imp_vals = np.zeros(8)
        imp_vals[0] = 1.0 / g.dt
        out = convolve_1d(f, Field1D(TimeGrid(0.0, g.dt, 8), imp_vals))
        np.testing.assert_allclose(out.values[:g.n], f.values, atol=1e-12)
        assert out.grid.t_start == pytest.approx(g.t_start)

    def test_gaussian_widths_add_in_quadrature(self):
        a, b = 0.7, 1.1
        g = TimeGrid.symmetric(10.0, 801)

        def unit(s):
            return lambda t: np.exp(-t**2 / (2 * s**2)) / (math.sqrt(2 * math.pi) * s)

        out = convolve_1d(field(g, unit(a)), field(g, unit(b)))
        expect = unit(math.hypot(a, b))(out.times)
        np.testing.assert_allclose(out.values.real, expect, atol=1e-6)

    def test_zero(self):
        g = TimeGrid(0, 0.1, 16)
        out = convolve_1d(Field1D(g, np.ones(16)), Field1D(g, np.zeros(16)))
        assert np.all(out.values == 0)

    def test_mismatched_steps(self):
        with pytest.raises(GridError):
            convolve_1d(Field1D(TimeGrid(0, 0.1, 16), np.ones(16)), Field1D(TimeGrid(0, 0.2, 16), np.ones(16)))


class TestSpectrum:
    def test_matches_kernel_projection(self):
        g = TimeGrid.symmetric(10.0, 256)
        f = field(g, lambda t: np.exp(-(t - 1)**2) * np.exp(0.5j * t))
        omegas, F = spectrum(f)
        for m in (0, 3, 17, 250):
            assert F[m] == pytest.approx(fourier_kernel_project(f, omegas[m]), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(8, 300), st.floats(0.01, 2.0), st.floats(-5, 5), st.integers(0, 2**32 - 1))
    def test_parseval(self, n, dt, t0, seed):
        rng = np.random.default_rng(seed)
        f = Field1D(TimeGrid(t0, dt, n), rng.normal(size=n) + 1j * rng.normal(size=n))
        assert spectral_norm2(f) == pytest.approx(f.norm2(), rel=1e-10)


def test_field2d_norm():
    gs, gi = TimeGrid(0, 0.5, 8), TimeGrid(1, 0.25, 10)
    f = Field2D(gs, gi, np.ones((8, 10)))
    assert f.norm2() == pytest.approx(80 * 0.5 * 0.25)
    with pytest.raises(FieldError):
        Field2D(gs, gi, np.ones((10, 8)))


def test_fields_are_immutable():
    f = Field1D(TimeGrid(0, 1, 8), np.ones(8))
    with pytest.raises(ValueError):
        f.values[0] = 2

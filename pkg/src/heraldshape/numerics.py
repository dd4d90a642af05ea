"""Uniform time grids, sampled complex fields, quadrature and Fourier kernels.

Sign conventions used everywhere in the package:

* angular frequencies (rad per time unit) are offsets from the optical carrier;
* the frequency projection kernel is ``exp(+1j * omega * t)``, so the spectrum
  of a sampled field is ``F(omega) = int f(t) exp(+1j omega t) dt``;
* a filter centred at ``omega`` has impulse response ``F(tau) exp(-1j omega tau)``,
  the conjugate kernel, so its passband sits at ``+omega`` in the same convention.

All times share one dimensionless unit chosen per scenario.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FieldError, GridError

MIN_SAMPLES = 8


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_k = t_start + k * dt`` for ``k in range(n)``."""

    t_start: float
    dt: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.dt)):
            raise GridError("grid parameters must be finite")
        if self.dt <= 0:
            raise GridError(f"grid step must be positive, got dt={self.dt}")
        if int(self.n) != self.n or self.n < MIN_SAMPLES:
            raise GridError(f"grid needs an integer n >= {MIN_SAMPLES}, got n={self.n}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def symmetric(cls, half_span: float, n: int, center: float = 0.0) -> "TimeGrid":
        """Grid of ``n`` samples covering ``[center - half_span, center + half_span]``."""
        if half_span <= 0:
            raise GridError("half_span must be positive")
        return cls(center - half_span, 2.0 * half_span / (n - 1), n)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)

    @property
    def t_end(self) -> float:
        return self.t_start + self.dt * (self.n - 1)

    @property
    def span(self) -> float:
        return self.dt * (self.n - 1)

    @property
    def omega_step(self) -> float:
        return 2.0 * math.pi / (self.n * self.dt)

    @property
    def nyquist(self) -> float:
        return math.pi / self.dt

    @property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w

    def index_of(self, t: float, rtol: float = 1e-6) -> int:
        """Index of the sample at time ``t``; raises if ``t`` is not a grid point."""
        k = int(round((t - self.t_start) / self.dt))
        if k < 0 or k >= self.n or abs(self.t_start + k * self.dt - t) > rtol * self.dt:
            raise GridError(f"t={t} is not a sample of the grid [{self.t_start}, {self.t_end}]")
        return k

    def covers(self, lo: float, hi: float) -> bool:
        slack = 1e-9 * self.dt
        return self.t_start <= lo + slack and self.t_end >= hi - slack

    def compatible(self, other: "TimeGrid", rtol: float = 1e-12) -> bool:
        return (
            self.n == other.n
            and math.isclose(self.dt, other.dt, rel_tol=rtol)
            and abs(self.t_start - other.t_start) <= rtol * max(1.0, abs(self.t_start)) + 1e-9 * self.dt
        )


def _frozen(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if shape is not None and arr.shape != shape:
        raise FieldError(f"expected samples of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Field1D:
    """Complex samples of a function of one time variable."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, (self.grid.n,)))

    @classmethod
    def from_function(cls, grid: TimeGrid, func) -> "Field1D":
        return cls(grid, func(grid.times))

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dt)

    def normalized(self) -> "Field1D":
        n2 = self.norm2()
        if not n2 > 0 or not math.isfinite(n2):
            raise FieldError("cannot normalize a field with zero or non-finite norm")
        return Field1D(self.grid, self.values / math.sqrt(n2))

    def inner(self, other: "Field1D") -> complex:
        """L2 inner product ``int conj(self) * other dt``."""
        if not self.grid.compatible(other.grid):
            raise GridError("inner product needs fields on the same grid")
        return complex(np.sum(np.conj(self.values) * other.values) * self.grid.dt)

    def scaled(self, factor: complex) -> "Field1D":
        return Field1D(self.grid, self.values * factor)


@dataclass(frozen=True)
class Field2D:
    """Complex samples ``values[j, k] = f(t_j, t'_k)``; rows follow the signal axis."""

    grid_s: TimeGrid
    grid_i: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen(self.values, (self.grid_s.n, self.grid_i.n))
        )

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid_s.dt * self.grid_i.dt)

    def scaled(self, factor: complex) -> "Field2D":
        return Field2D(self.grid_s, self.grid_i, self.values * factor)


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise FieldError("non-finite field")


def weighted_row_sum(values: np.ndarray, kernel: np.ndarray) -> np.ndarray | complex:
    """``sum_k values[..., k] * kernel[k]`` with one summation order for 1-D and 2-D input."""
    return (values * kernel).sum(axis=-1)


def projection_kernel(grid: TimeGrid, omega: float) -> np.ndarray:
    """Trapezoid weights times ``exp(+1j omega t)``; plain weights when ``omega == 0``."""
    if not abs(omega) < grid.nyquist:
        raise GridError(
            f"frequency exceeds grid resolution: |omega|={abs(omega):.6g} >= pi/dt={grid.nyquist:.6g}"
        )
    w = grid.trapezoid_weights
    if omega == 0:
        return w
    return w * np.exp(1j * omega * grid.times)


def integrate_1d(f: Field1D) -> complex:
    """Trapezoidal approximation of ``int f(t) dt`` over the grid."""
    _check_finite(f.values)
    return complex(weighted_row_sum(f.values, f.grid.trapezoid_weights))


def fourier_kernel_project(f: Field1D, omega: float) -> complex:
    """Trapezoidal approximation of ``int f(t) exp(+1j omega t) dt``.

    ``omega == 0`` goes through exactly the same arithmetic as :func:`integrate_1d`.
    """
    _check_finite(f.values)
    return complex(weighted_row_sum(f.values, projection_kernel(f.grid, omega)))


def convolve_1d(f: Field1D, g: Field1D) -> Field1D:
    """Linear convolution ``(f * g)(t) = int f(s) g(t - s) ds`` sampled on the full support."""
    if not math.isclose(f.grid.dt, g.grid.dt, rel_tol=1e-12):
        raise GridError(f"convolution needs equal steps, got dt={f.grid.dt} and dt={g.grid.dt}")
    _check_finite(f.values)
    _check_finite(g.values)
    out = np.convolve(f.values, g.values) * f.grid.dt
    grid = TimeGrid(f.grid.t_start + g.grid.t_start, f.grid.dt, len(out))
    return Field1D(grid, out)


def spectrum(f: Field1D, pad_to: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sampled spectrum ``F(omega_m) = dt * sum_k f_k exp(+1j omega_m t_k)``.

    Returns ``(omegas, F)`` in FFT order. Zero padding to ``pad_to`` samples refines
    the frequency step without changing the transform. With this convention
    ``sum |f_k|^2 dt == sum |F_m|^2 domega / (2 pi)`` for the unpadded transform.
    """
    n = f.grid.n if pad_to is None else int(pad_to)
    if n < f.grid.n:
        raise GridError("pad_to must not truncate the field")
    omegas = 2.0 * math.pi * np.fft.fftfreq(n, f.grid.dt)
    # exp(+i w t) sums are n * ifft; the grid origin adds a constant phase per frequency
    F = f.grid.dt * n * np.fft.ifft(f.values, n) * np.exp(1j * omegas * f.grid.t_start)
    return omegas, F


def spectral_norm2(f: Field1D) -> float:
    omegas, F = spectrum(f)
    domega = 2.0 * math.pi / (f.grid.n * f.grid.dt)
    return float(np.sum(np.abs(F) ** 2) * domega / (2.0 * math.pi))


def auto_grid(
    t_c: float,
    t_u: float,
    t_m: float,
    omega_f: float | None = None,
    points_per_tc: float = 6.0,
    max_n: int | None = None,
) -> TimeGrid:
    """Grid spanning ``+-4 max(t_u, t_m, 1/omega_f)`` with ``dt <= t_c / points_per_tc``."""
    scales = [t_u, t_m] + ([1.0 / omega_f] if omega_f else [])
    half_span = 4.0 * max(scales)
    n = max(MIN_SAMPLES, int(math.ceil(2.0 * half_span * points_per_tc / t_c)) + 1)
    if max_n is not None and n > max_n:
        raise GridError(
            f"resolving t_c={t_c:g} over +-{half_span:g} needs n={n} samples (limit {max_n}); "
            "use a modulator window grid instead"
        )
    return TimeGrid.symmetric(half_span, n)


def window_grid(t_m: float, n: int, half_span_factor: float = 5.0, center: float = 0.0) -> TimeGrid:
    """Grid confined to the modulation window, ``center +- half_span_factor * t_m``.

    Enough for heralded shapes whenever the modulator confines the idler: the
    joint amplitude outside the window never reaches the detector.
    """
    return TimeGrid.symmetric(half_span_factor * t_m, n, center)

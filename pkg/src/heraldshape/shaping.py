"""Idler-arm temporal modulators and their action Psi(t, t') -> A(t') Psi(t, t')."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, ModulatorError
from .numerics import Field1D, Field2D, TimeGrid
from .states import JointAmplitude

UNITY_TOL = 1e-12
GAUSSIAN_CUTOFF = 4.0  # in units of t_m; exp(-8) at the edge


@dataclass(frozen=True)
class Modulator:
    """Complex transmission ``A(t')`` sampled on the idler grid.

    ``support_width`` is the characteristic duration ``t_m``: the Gaussian
    parameter for Gaussian modulators, the window length for rectangular ones
    and the 99.9 % energy width for tabulated ones.
    """

    transmission: Field1D
    support_width: float
    label: str = ""

    def __post_init__(self):
        mod = np.abs(self.transmission.values)
        bad = np.flatnonzero(mod > 1.0 + UNITY_TOL)
        if bad.size:
            shown = ", ".join(str(i) for i in bad[:20])
            more = f" (+{bad.size - 20} more)" if bad.size > 20 else ""
            raise ModulatorError(f"transmission exceeds unity at sample indices {shown}{more}")
        if not np.all(np.isfinite(self.transmission.values)):
            raise ModulatorError("transmission has non-finite samples")

    @property
    def grid(self) -> TimeGrid:
        return self.transmission.grid

    @property
    def values(self) -> np.ndarray:
        return self.transmission.values

    @property
    def energy_width(self) -> float:
        return energy_width(self.transmission)

    def window(self) -> tuple[float, float]:
        """First and last grid time with nonzero transmission."""
        nz = np.flatnonzero(np.abs(self.values) > 0)
        if nz.size == 0:
            return (math.nan, math.nan)
        t = self.grid.times
        return float(t[nz[0]]), float(t[nz[-1]])

    def target(self, omega: float = 0.0) -> Field1D:
        """Ideal heralded shape ``A(t) exp(+1j omega t)`` on the modulator grid."""
        return Field1D(self.grid, self.values * np.exp(1j * omega * self.grid.times))

    def __mul__(self, other: "Modulator") -> "Modulator":
        if not self.grid.compatible(other.grid):
            raise GridError("modulators live on different grids")
        prod = Field1D(self.grid, self.values * other.values)
        return Modulator(prod, energy_width(prod), f"({self.label})*({other.label})")


def energy_width(f: Field1D, fraction: float = 0.999) -> float:
    """Length of the shortest window holding ``fraction`` of ``sum |f|^2``.

    Measured as (number of samples) * dt, capped at the grid span.
    """
    p = np.abs(f.values) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    c = np.concatenate(([0.0], np.cumsum(p)))
    need = fraction * total
    # for each start i, first end j with c[j] - c[i] >= need
    ends = np.searchsorted(c, c[:-1] + need * (1 - 1e-12), side="left")
    ok = ends <= f.grid.n
    counts = (ends - np.arange(f.grid.n))[ok]
    return float(min(counts.min() * f.grid.dt, f.grid.span))


def gaussian_modulator(t_m: float, grid: TimeGrid, center: float = 0.0) -> Modulator:
    """``A(t) = exp(-(t - center)^2 / (2 t_m^2))``, set to zero beyond ``4 t_m``."""
    if t_m < 3 * grid.dt:
        raise GridError(f"modulation unresolved: t_m={t_m:g} < 3 dt={3 * grid.dt:g}")
    half = GAUSSIAN_CUTOFF * t_m
    if not grid.covers(center - half, center + half):
        raise GridError(f"grid must span +-{GAUSSIAN_CUTOFF:g} t_m around {center:g}")
    x = grid.times - center
    vals = np.where(np.abs(x) <= half * (1 + 1e-12), np.exp(-(x**2) / (2 * t_m**2)), 0.0)
    return Modulator(Field1D(grid, vals), t_m, f"gaussian(t_m={t_m:g}, center={center:g})")


def rect_modulator(t_on: float, t_off: float, amplitude: complex, grid: TimeGrid) -> Modulator:
    if abs(amplitude) > 1.0 + UNITY_TOL:
        raise ModulatorError(f"transmission exceeds unity: |amplitude|={abs(amplitude):g}")
    if not t_on < t_off:
        raise ModulatorError("rect modulator needs t_on < t_off")
    if t_off < grid.t_start or t_on > grid.t_end:
        raise GridError("rect window lies outside the grid")
    t = grid.times
    slack = 1e-9 * grid.dt
    vals = np.where((t >= t_on - slack) & (t <= t_off + slack), complex(amplitude), 0.0)
    return Modulator(Field1D(grid, vals), t_off - t_on, f"rect([{t_on:g}, {t_off:g}], {amplitude})")


def tabulated_modulator(values: Field1D, label: str = "tabulated") -> Modulator:
    return Modulator(values, energy_width(values), label)


@dataclass(frozen=True)
class ModulatedState:
    """Unnormalized modulated amplitude.

    ``reference_norm2`` is the norm of the state before any modulator, so
    ``transmitted`` accumulates over successive modulators.
    """

    field: Field2D
    reference_norm2: float = 1.0
    label: str = ""

    @property
    def transmitted(self) -> float:
        """Fraction of pairs passing the modulators, ``norm^2(A Psi) / norm^2(Psi)``."""
        return self.field.norm2() / self.reference_norm2

    @property
    def grid_s(self) -> TimeGrid:
        return self.field.grid_s

    @property
    def grid_i(self) -> TimeGrid:
        return self.field.grid_i

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def apply_modulator(state: JointAmplitude | ModulatedState, mod: Modulator) -> ModulatedState:
    """Multiply every idler column ``t'_k`` of the joint amplitude by ``A(t'_k)``."""
    if not state.grid_i.compatible(mod.grid):
        raise GridError("modulator grid does not match the idler grid of the state")
    if isinstance(state, ModulatedState):
        ref = state.reference_norm2
    else:
        ref = state.amplitude.norm2()
    out = Field2D(state.grid_s, state.grid_i, state.values * mod.values[np.newaxis, :])
    return ModulatedState(out, ref, f"{state.label} | {mod.label}")

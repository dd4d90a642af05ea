"""Biphoton joint amplitudes Psi(t, t') (t: signal, t': idler)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FieldError, GridError
from .numerics import Field1D, Field2D, TimeGrid

NORM_TOL = 1e-6


@dataclass(frozen=True)
class JointAmplitude:
    """Unit-norm joint amplitude of a photon pair.

    ``norm_correction`` is the factor applied to the sampled values to reach
    unit norm (1.0 when the samples were already normalized).
    """

    amplitude: Field2D
    label: str = ""
    norm_correction: float = 1.0

    def __post_init__(self):
        n2 = self.amplitude.norm2()
        if abs(n2 - 1.0) > NORM_TOL:
            raise FieldError(f"joint amplitude must be unit-norm, got norm^2={n2:.9g}")

    @property
    def grid_s(self) -> TimeGrid:
        return self.amplitude.grid_s

    @property
    def grid_i(self) -> TimeGrid:
        return self.amplitude.grid_i

    @property
    def values(self) -> np.ndarray:
        return self.amplitude.values


@dataclass(frozen=True)
class GaussianBiphotonParams:
    t_c: float
    t_u: float

    def __post_init__(self):
        if not (self.t_c > 0 and self.t_u > 0):
            raise ValueError("t_c and t_u must be positive")
        if self.t_c > self.t_u:
            raise ValueError(f"correlation time t_c={self.t_c} exceeds unconditional width t_u={self.t_u}")


@dataclass(frozen=True)
class ClassicalMixture:
    """Classically correlated pairs: an incoherent list of pure joint amplitudes."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), a) for w, a in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        weights = np.array([w for w, _ in comps])
        if np.any(weights < 0):
            raise ValueError("mixture weights must be non-negative")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"mixture weights must sum to 1, got {weights.sum():.12g}")
        object.__setattr__(self, "components", comps)


def _normalized(values: np.ndarray, grid_s: TimeGrid, grid_i: TimeGrid, label: str) -> JointAmplitude:
    if not np.all(np.isfinite(values)):
        raise FieldError("non-finite field")
    raw = Field2D(grid_s, grid_i, values)
    n2 = raw.norm2()
    if not n2 > 0:
        raise FieldError("joint amplitude has zero norm")
    corr = 1.0 / math.sqrt(n2)
    return JointAmplitude(raw.scaled(corr), label, corr)


def gaussian_joint_values(params: GaussianBiphotonParams, t: np.ndarray, tp: np.ndarray) -> np.ndarray:
    """Analytic Gaussian model, including its unit-norm prefactor ``sqrt(2 / (pi t_c t_u))``."""
    tc, tu = params.t_c, params.t_u
    T, Tp = np.meshgrid(t, tp, indexing="ij")
    return np.exp(-((T - Tp) ** 2) / (2 * tc**2) - (T + Tp) ** 2 / (2 * tu**2)) * math.sqrt(
        2.0 / (math.pi * tc * tu)
    )


def make_gaussian_joint(
    params: GaussianBiphotonParams,
    grid_s: TimeGrid,
    grid_i: TimeGrid | None = None,
    *,
    points_per_tc: float = 6.0,
    truncate: bool = False,
) -> JointAmplitude:
    """Sample the Gaussian time-energy entangled amplitude and renormalize.

    ``truncate=True`` accepts grids narrower than ``+-4 t_u``; the result is the
    renormalized restriction of the state to the grid, which leaves every heralded
    shape unchanged as long as the modulator closes inside the idler grid.
    Lowering ``points_per_tc`` relaxes the resolution check; Gaussian ridges are
    integrated to near machine precision by the trapezoid rule down to about one
    sample per ``t_c``.
    """
    grid_i = grid_s if grid_i is None else grid_i
    for g in (grid_s, grid_i):
        if g.dt > params.t_c / points_per_tc * (1 + 1e-12):
            raise GridError(
                f"correlation time unresolved: dt={g.dt:.4g} > t_c/{points_per_tc:g}={params.t_c / points_per_tc:.4g}"
            )
        if not truncate and not g.covers(-4 * params.t_u, 4 * params.t_u):
            raise GridError(f"grid must span +-4 t_u = +-{4 * params.t_u:g}; pass truncate=True for a window")
    values = gaussian_joint_values(params, grid_s.times, grid_i.times)
    label = f"gaussian(t_c={params.t_c:g}, t_u={params.t_u:g}{', truncated' if truncate else ''})"
    return _normalized(values, grid_s, grid_i, label)


def make_separable(f_signal: Field1D, g_idler: Field1D, label: str = "separable") -> JointAmplitude:
    if f_signal.norm2() == 0 or g_idler.norm2() == 0:
        raise FieldError("separable state needs nonzero factors")
    values = np.outer(f_signal.values, g_idler.values)
    return _normalized(values, f_signal.grid, g_idler.grid, label)


def make_tabulated(values: Field2D, label: str = "tabulated") -> JointAmplitude:
    return _normalized(np.asarray(values.values), values.grid_s, values.grid_i, label)


def entanglement_proxy(state: JointAmplitude) -> float:
    """Purity of the reduced signal state, ``sum s^4 / (sum s^2)^2`` over Schmidt coefficients.

    Equals 1 exactly for product states and decreases with entanglement.
    """
    a = state.values * math.sqrt(state.grid_s.dt * state.grid_i.dt)
    s2 = np.linalg.svd(a, compute_uv=False) ** 2
    return float(np.sum(s2**2) / np.sum(s2) ** 2)


def gaussian_schmidt_purity(params: GaussianBiphotonParams) -> float:
    """Closed-form reduced-state purity of the Gaussian amplitude, ``2 t_c t_u / (t_c^2 + t_u^2)``."""
    tc, tu = params.t_c, params.t_u
    return 2.0 * tc * tu / (tc**2 + tu**2)


def correlated_mixture(
    params: GaussianBiphotonParams,
    grid_s: TimeGrid,
    grid_i: TimeGrid | None = None,
    n_components: int = 41,
    span: float | None = None,
) -> ClassicalMixture:
    """Classically correlated look-alike of the Gaussian state.

    Components are time-shifted product pulses ``a(t - s) a(t' - s)`` with
    ``a(x) = exp(-x^2 / t_c^2)``; shift weights ``p(s) ~ exp(-4 s^2 / (t_u^2 - t_c^2))``.
    Both factors reproduce the two Gaussian widths of ``|Psi|^2`` in the
    continuum limit while carrying no coherence between different shifts.
    """
    grid_i = grid_s if grid_i is None else grid_i
    tc, tu = params.t_c, params.t_u
    if span is None:
        span = min(grid_i.t_end, -grid_i.t_start)
    shifts = np.linspace(-span, span, n_components)
    var_s = max(tu**2 - tc**2, 1e-300) / 8.0
    p = np.exp(-(shifts**2) / (2 * var_s))
    p /= p.sum()
    comps = []
    for w, s in zip(p, shifts):
        if w < 1e-15:
            continue
        f = Field1D(grid_s, np.exp(-((grid_s.times - s) ** 2) / tc**2))
        g = Field1D(grid_i, np.exp(-((grid_i.times - s) ** 2) / tc**2))
        comps.append((w, make_separable(f, g, f"shift {s:+.4g}")))
    total = sum(w for w, _ in comps)
    return ClassicalMixture(tuple((w / total, a) for w, a in comps))

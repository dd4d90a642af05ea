"""Idler detection models and the conditional (heralded) signal states they produce.

Every heralding function accepts a :class:`~heraldshape.shaping.ModulatedState`,
a :class:`~heraldshape.states.JointAmplitude` (no modulator) or a bare
:class:`~heraldshape.numerics.Field2D`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AcausalClickError, GridError, InvariantError, ZeroHeraldError
from .numerics import (
    Field1D,
    Field2D,
    TimeGrid,
    projection_kernel,
    weighted_row_sum,
)
from .shaping import Modulator, ModulatedState, apply_modulator
from .states import ClassicalMixture

ZERO_WEIGHT = 1e-300
MIN_NODES = 33
NODE_HALF_SPAN = 5.0  # detector quadrature covers omega0 +- 5 omega_d


@dataclass(frozen=True)
class HeraldedShape:
    """Unit-norm conditional amplitude of the signal photon.

    ``weight`` is the norm^2 before normalization and is proportional to the
    probability density of the heralding outcome described by ``herald``.
    """

    amplitude: Field1D
    weight: float
    herald: dict = field(default_factory=dict)

    @property
    def grid(self) -> TimeGrid:
        return self.amplitude.grid

    @property
    def values(self) -> np.ndarray:
        return self.amplitude.values


@dataclass(frozen=True)
class SpectralFilter:
    """Frequency-selecting element in front of a time-resolving click detector.

    ``single_pole`` is a causal cavity-like response ``exp(-omega_f tau)``,
    ``gaussian`` the symmetric ``exp(-omega_f^2 tau^2 / 2)``. Both are unit-peak
    and carry the centre frequency as ``exp(-1j center tau)``.
    """

    kind: str
    bandwidth: float
    center: float = 0.0

    def __post_init__(self):
        if self.kind not in ("single_pole", "gaussian"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if not self.bandwidth > 0:
            raise ValueError("filter bandwidth must be positive")

    @property
    def causal(self) -> bool:
        return self.kind == "single_pole"

    def envelope(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        if self.kind == "single_pole":
            return np.where(tau >= 0, np.exp(-self.bandwidth * np.clip(tau, 0, None)), 0.0)
        return np.exp(-0.5 * (self.bandwidth * tau) ** 2)

    def impulse_response(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        return self.envelope(tau) * np.exp(-1j * self.center * tau)

    def power_transmission(self, omega) -> np.ndarray:
        """``|F(omega)|^2`` normalized to 1 at the centre frequency."""
        x = (np.asarray(omega, dtype=float) - self.center) / self.bandwidth
        if self.kind == "single_pole":
            return 1.0 / (1.0 + x**2)
        return np.exp(-(x**2))


@dataclass(frozen=True)
class DetectorSpectralResponse:
    """Gaussian distribution of frequency outcomes, ``exp(-w^2/w_d^2) / (sqrt(pi) w_d)``."""

    uncertainty: float = 0.0

    def __post_init__(self):
        if not self.uncertainty >= 0:
            raise ValueError("detector uncertainty must be non-negative")

    def density(self, omega) -> np.ndarray:
        wd = self.uncertainty
        omega = np.asarray(omega, dtype=float)
        return np.exp(-((omega / wd) ** 2)) / (math.sqrt(math.pi) * wd)

    def nodes(self, center: float, n_nodes: int | None = None, signal_span: float = 0.0):
        """Quadrature nodes and weights for ``int dw gamma(w - center) g(w)``.

        The default node count keeps the trapezoid rule free of aliasing for
        integrands oscillating as ``exp(1j w (t1 - t2))`` with ``|t1 - t2| <= signal_span``.
        """
        wd = self.uncertainty
        if wd == 0:
            return np.array([float(center)]), np.array([1.0])
        if n_nodes is None:
            half = NODE_HALF_SPAN * wd
            # step h keeps the aliased copy of the Gaussian at 2 pi / h beyond ~6 widths
            h = 2.0 * math.pi / (signal_span + 12.0 / wd)
            n_nodes = max(MIN_NODES, int(math.ceil(2 * half / h)) + 1)
        if n_nodes % 2 == 0:
            n_nodes += 1
        offsets = np.linspace(-NODE_HALF_SPAN * wd, NODE_HALF_SPAN * wd, n_nodes)
        h = offsets[1] - offsets[0]
        w = np.full(n_nodes, h)
        w[0] = w[-1] = 0.5 * h
        return center + offsets, w * self.density(offsets)


@dataclass(frozen=True)
class SignalDensityMatrix:
    """Heralded signal state ``rho(t1, t2)``, both axes on the signal grid, trace 1.

    ``total_weight`` is the trace before normalization (unnormalized heralding
    probability density of the conditioning outcome).
    """

    matrix: Field2D
    total_weight: float = 1.0

    @property
    def grid(self) -> TimeGrid:
        return self.matrix.grid_s

    @property
    def values(self) -> np.ndarray:
        return self.matrix.values

    def operator(self) -> np.ndarray:
        """Matrix of the operator in the orthonormal sample basis (``rho * dt``)."""
        return self.values * self.grid.dt

    def trace(self) -> float:
        return float(np.real(np.trace(self.values)) * self.grid.dt)

    def eigenvalues(self) -> np.ndarray:
        op = self.operator()
        return np.linalg.eigvalsh(0.5 * (op + op.conj().T))

    def check(self, herm_tol: float = 1e-9, trace_tol: float = 1e-9, psd_tol: float = 1e-8) -> None:
        """Raise :class:`InvariantError` unless Hermitian, unit-trace and positive semidefinite."""
        r = self.values
        herm = float(np.max(np.abs(r - r.conj().T)))
        if herm > herm_tol:
            raise InvariantError(f"density matrix not Hermitian (max deviation {herm:.3g})")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise InvariantError(f"density matrix trace {tr:.12g} != 1")
        ev = self.eigenvalues()
        if ev[0] < -psd_tol * ev[-1]:
            raise InvariantError(f"density matrix not PSD (min eigenvalue {ev[0]:.3g}, max {ev[-1]:.3g})")


def _field(modulated) -> Field2D:
    if isinstance(modulated, Field2D):
        return modulated
    if isinstance(modulated, ModulatedState):
        return modulated.field
    return modulated.amplitude


def _shape(values: np.ndarray, grid: TimeGrid, herald: dict) -> HeraldedShape:
    weight = float(np.sum(np.abs(values) ** 2) * grid.dt)
    if not weight > ZERO_WEIGHT:
        raise ZeroHeraldError(f"herald impossible: zero amplitude for {herald}")
    return HeraldedShape(Field1D(grid, values / math.sqrt(weight)), weight, herald)


def herald_frequency_resolved(modulated, omega: float) -> HeraldedShape:
    """Idler detected with frequency offset ``omega``: ``psi(t) ~ int dt' M(t, t') exp(1j omega t')``."""
    f = _field(modulated)
    kernel = projection_kernel(f.grid_i, omega)
    psi = weighted_row_sum(f.values, kernel)
    return _shape(psi, f.grid_s, {"detection": "frequency", "omega": float(omega)})


def herald_time_resolved(modulated, t_click: float) -> HeraldedShape:
    """Idler detected at time ``t_click`` with no frequency information: a column slice."""
    f = _field(modulated)
    k = f.grid_i.index_of(t_click)
    return _shape(np.array(f.values[:, k]), f.grid_s, {"detection": "time", "t_click": float(t_click)})


def herald_filtered(modulated, filt: SpectralFilter, t_click: float) -> HeraldedShape:
    """Spectral filter followed by a click at ``t_click``.

    ``psi(t) ~ int dtau F(t_click - tau) exp(-1j w (t_click - tau)) M(t, tau)``,
    i.e. the idler rows convolved with the impulse response and read out at the
    click time. The click time need not be a grid sample; the modulated field
    vanishes outside the idler grid.
    """
    f = _field(modulated)
    g = f.grid_i
    if 1.0 / filt.bandwidth < 3 * g.dt * (1 - 1e-12):
        raise GridError(f"filter response unresolved: 1/omega_f={1 / filt.bandwidth:g} < 3 dt={3 * g.dt:g}")
    herald = {"detection": "filtered", "filter": filt.kind, "omega_f": filt.bandwidth,
              "omega": filt.center, "t_click": float(t_click)}
    if filt.causal:
        support = np.flatnonzero(np.any(f.values != 0, axis=0))
        if support.size and t_click < g.times[support[0]]:
            raise AcausalClickError(f"acausal click: t_click={t_click:g} precedes the transmitted light")
    kernel = filt.impulse_response(t_click - g.times) * g.trapezoid_weights
    psi = weighted_row_sum(f.values, kernel)
    return _shape(psi, f.grid_s, herald)


def _density_from_columns(P: np.ndarray, q: np.ndarray, grid: TimeGrid) -> SignalDensityMatrix:
    acc = (P * q) @ P.conj().T
    trace = float(np.real(np.trace(acc)) * grid.dt)
    if not trace > ZERO_WEIGHT:
        raise ZeroHeraldError("herald impossible: all quadrature weights vanish")
    rho = acc / trace
    rho = 0.5 * (rho + rho.conj().T)
    return SignalDensityMatrix(Field2D(grid, grid, rho), trace)


def frequency_projections(modulated, omegas) -> np.ndarray:
    """Unnormalized ``psi(t | w)`` for every frequency in ``omegas``, one column each."""
    f = _field(modulated)
    g = f.grid_i
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(np.abs(omegas) >= g.nyquist):
        raise GridError(f"frequency exceeds grid resolution: pi/dt={g.nyquist:.6g}")
    kernels = g.trapezoid_weights[:, None] * np.exp(1j * np.outer(g.times, omegas))
    return f.values @ kernels


def heralded_density_matrix(
    modulated,
    omega0: float,
    detector: DetectorSpectralResponse,
    n_nodes: int | None = None,
) -> SignalDensityMatrix:
    """Signal state for a detector reading ``omega0`` with outcome spread ``detector``.

    ``rho(t1, t2) ~ int dw gamma(w - omega0) psi(t1|w) psi*(t2|w)`` with the
    unnormalized ``psi`` of :func:`herald_frequency_resolved`, so outcomes with
    larger heralding probability contribute more. Trace-normalized on return.
    """
    f = _field(modulated)
    if detector.uncertainty == 0:
        psi = herald_frequency_resolved(f, omega0)
        P = (psi.values * math.sqrt(psi.weight))[:, None]
        return _density_from_columns(P, np.array([1.0]), f.grid_s)
    omegas, q = detector.nodes(omega0, n_nodes, signal_span=f.grid_s.span)
    P = frequency_projections(f, omegas)
    return _density_from_columns(P, q, f.grid_s)


def herald_mixture(
    mixture: ClassicalMixture,
    mod: Modulator,
    omega: float,
    detector: DetectorSpectralResponse | None = None,
) -> SignalDensityMatrix:
    """Heralded signal state for classically correlated pairs.

    Each pure component is modulated and heralded on its own; the resulting
    unnormalized states are added with the mixture weights.
    """
    detector = detector or DetectorSpectralResponse(0.0)
    acc = None
    grid = None
    for p, comp in mixture.components:
        if p == 0:
            continue
        modded = apply_modulator(comp, mod)
        try:
            rho = heralded_density_matrix(modded, omega, detector)
        except ZeroHeraldError:
            continue
        term = p * rho.total_weight * rho.values
        acc = term if acc is None else acc + term
        grid = rho.grid
    if acc is None:
        raise ZeroHeraldError("herald impossible: every mixture component has zero weight")
    trace = float(np.real(np.trace(acc)) * grid.dt)
    if not trace > ZERO_WEIGHT:
        raise ZeroHeraldError("herald impossible: zero total weight")
    rho = acc / trace
    return SignalDensityMatrix(Field2D(grid, grid, 0.5 * (rho + rho.conj().T)), trace)

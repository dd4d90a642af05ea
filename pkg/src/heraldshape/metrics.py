"""Figures of merit: purity, shape fidelity, heralding-rate estimates, regime checks."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import FieldError, GridError
from .heralding import HeraldedShape, SignalDensityMatrix, SpectralFilter
from .numerics import Field1D, spectrum

SATISFIED = "satisfied"
MARGINAL = "marginal"
VIOLATED = "violated"

# a << b is read as a/b <= 1/10; up to 1/3 is flagged as marginal
MUCH_LESS = 0.1
LESS = 1.0 / 3.0


class RegimeWarning(UserWarning):
    pass


def purity(rho: SignalDensityMatrix) -> float:
    """``Tr rho^2`` evaluated as ``sum |rho_jk|^2 dt^2``."""
    rho.check()
    dt = rho.grid.dt
    return float(np.sum(np.abs(rho.values) ** 2) * dt * dt)


def fidelity(psi: HeraldedShape | Field1D, target: Field1D) -> float:
    """``|<target, psi>|^2`` of the two fields after normalizing both."""
    a = psi.amplitude if isinstance(psi, HeraldedShape) else psi
    if not a.grid.compatible(target.grid):
        raise GridError("fidelity needs the shape and the target on one grid")
    nt, na = target.norm2(), a.norm2()
    if not nt > 0:
        raise FieldError("fidelity target has zero norm")
    if not na > 0:
        raise FieldError("fidelity input has zero norm")
    ov = target.inner(a)
    return float(min(abs(ov) ** 2 / (nt * na), 1.0))


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{k} must be positive and finite, got {v}")


@dataclass(frozen=True)
class RateEstimate:
    """Order-of-magnitude heralding probability per pair.

    ``rate`` is the literal product ``filter_fraction * modulator_fraction``;
    ``filter_acceptance`` is the same filter factor clamped to 1 for reporting.
    """

    rate: float
    modulator_fraction: float
    filter_fraction: float
    filter_acceptance: float
    acceptance_clamped: bool


def heralding_rate_modulated(omega_f: float, t_c: float, t_m: float, t_u: float) -> RateEstimate:
    """``R ~ omega_f t_c t_m / t_u``: pairs passing both the modulator and the filter."""
    _positive(omega_f=omega_f, t_c=t_c, t_m=t_m, t_u=t_u)
    if not (t_c < t_m < t_u):
        warnings.warn(f"rate estimate outside t_c << t_m < t_u (t_c={t_c}, t_m={t_m}, t_u={t_u})",
                      RegimeWarning, stacklevel=2)
    filt = omega_f * t_c
    return RateEstimate(filt * (t_m / t_u), t_m / t_u, filt, min(filt, 1.0), filt > 1.0)


def heralding_rate_pulsed(omega_f: float, t_c: float) -> float:
    """Pump pulses shaped like the modulator: every pair is in the window, ``R ~ omega_f t_c``."""
    _positive(omega_f=omega_f, t_c=t_c)
    return omega_f * t_c


@dataclass(frozen=True)
class SimulatedRate:
    transmitted: float
    filter_acceptance: float

    @property
    def rate(self) -> float:
        return self.transmitted * self.filter_acceptance


def idler_power_spectrum(modulated, pad_factor: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Idler spectral density summed over signal times, normalized to unit area."""
    f = modulated.field if hasattr(modulated, "field") else modulated
    g = f.grid_i
    n = g.n * pad_factor
    omegas = 2.0 * math.pi * np.fft.fftfreq(n, g.dt)
    # rows are signal times; transform each idler row and add powers
    F = g.dt * n * np.fft.ifft(f.values, n, axis=1)
    S = np.sum(np.abs(F) ** 2, axis=0) * f.grid_s.dt
    domega = 2.0 * math.pi / (n * g.dt)
    S = S / (S.sum() * domega)
    order = np.argsort(omegas)
    return omegas[order], S[order]


def simulated_heralding_fraction(modulated, filt: SpectralFilter, pad_factor: int = 4) -> SimulatedRate:
    """Transmitted fraction from the modulated state and filter acceptance from its idler spectrum."""
    omegas, S = idler_power_spectrum(modulated, pad_factor)
    domega = omegas[1] - omegas[0]
    acc = float(np.sum(S * filt.power_transmission(omegas)) * domega)
    return SimulatedRate(float(modulated.transmitted), acc)


@dataclass(frozen=True)
class RegimeReport:
    ratio_cm: float
    ratio_mu: float
    ratio_mf: float | None
    ratio_md: float
    filter_acceptance: float | None
    verdicts: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return VIOLATED not in self.verdicts.values()

    def as_dict(self) -> dict:
        return asdict(self)

    def lines(self) -> list[str]:
        out = []
        for name, verdict in self.verdicts.items():
            out.append(f"{name:<24s} {verdict}")
        return out


def _much_less(ratio: float) -> str:
    eps = 1e-12
    if ratio <= MUCH_LESS * (1 + eps):
        return SATISFIED
    if ratio <= LESS * (1 + eps):
        return MARGINAL
    return VIOLATED


def validate_regime(t_c: float, t_m: float, t_u: float, omega_f: float | None = None,
                    omega_d: float = 0.0) -> RegimeReport:
    """Check the shaping conditions ``t_c << t_m < t_u``, ``t_m << 1/omega_f`` and ``t_m omega_d << 1``.

    ``filter_acceptance`` (``omega_f t_c``) above 1 is flagged marginal: the
    rate estimate then no longer describes a fraction.
    """
    _positive(t_c=t_c, t_m=t_m, t_u=t_u)
    if omega_d < 0:
        raise ValueError("omega_d must be non-negative")
    verdicts = {
        "correlation (t_c<<t_m)": _much_less(t_c / t_m),
        "spread (t_m<t_u)": SATISFIED if t_m < t_u else VIOLATED,
    }
    ratio_mf = acceptance = None
    if omega_f is not None:
        _positive(omega_f=omega_f)
        ratio_mf = t_m * omega_f
        acceptance = omega_f * t_c
        verdicts["filter (t_m<<1/w_f)"] = _much_less(ratio_mf)
        verdicts["acceptance (w_f*t_c<=1)"] = SATISFIED if acceptance <= 1.0 else MARGINAL
    verdicts["resolution (t_m*w_d<<1)"] = _much_less(t_m * omega_d)
    return RegimeReport(
        ratio_cm=t_c / t_m,
        ratio_mu=t_m / t_u,
        ratio_mf=ratio_mf,
        ratio_md=t_m * omega_d,
        filter_acceptance=acceptance,
        verdicts=verdicts,
        thresholds={"satisfied": MUCH_LESS, "marginal": LESS, "strict": "t_m < t_u"},
    )


def phase_slope(psi: HeraldedShape | Field1D, rel_threshold: float = 0.1) -> float:
    """Least-squares slope of the unwrapped phase where ``|psi| >= rel_threshold * max|psi|``."""
    a = psi.amplitude if isinstance(psi, HeraldedShape) else psi
    mag = np.abs(a.values)
    sel = mag >= rel_threshold * mag.max()
    t = a.times[sel]
    phase = np.unwrap(np.angle(a.values[sel]))
    slope, _ = np.polyfit(t, phase, 1, w=mag[sel])
    return float(slope)


def rms_width(psi: HeraldedShape | Field1D) -> float:
    """Gaussian parameter ``W`` of a shape ``|psi| ~ exp(-t^2 / (2 W^2))`` from its second moment."""
    a = psi.amplitude if isinstance(psi, HeraldedShape) else psi
    p = np.abs(a.values) ** 2
    t = a.times
    mean = np.sum(t * p) / np.sum(p)
    var = np.sum((t - mean) ** 2 * p) / np.sum(p)
    return float(math.sqrt(2.0 * var))

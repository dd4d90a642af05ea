"""Closed forms for the all-Gaussian model (Gaussian pair, modulator and detector).

These are written independently of the quadrature in :mod:`heraldshape.heralding`
and serve as its oracle. All expressions are evaluated on times scaled by t_m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class GaussianScenario:
    t_c: float
    t_u: float
    t_m: float
    omega_d: float = 0.0

    def __post_init__(self):
        for name in ("t_c", "t_u", "t_m"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if not (self.omega_d >= 0 and math.isfinite(self.omega_d)):
            raise ValueError(f"omega_d must be non-negative and finite, got {self.omega_d}")

    def scaled(self) -> tuple[float, float, float]:
        """``(t_c/t_m, t_u/t_m, t_m*omega_d)``."""
        return self.t_c / self.t_m, self.t_u / self.t_m, self.t_m * self.omega_d


def purity_closed_form(s: GaussianScenario) -> float:
    """Purity of the heralded signal for Gaussian pair, modulator and detector response.

    With ``x = t_c/t_m``, ``y = t_u/t_m``, ``z = t_m omega_d`` the full
    expression is divided through by ``y^4`` so that ``y -> inf`` stays finite.
    Equal ``t_c`` and ``t_u`` (a factorizing pair) give 1 for any ``omega_d``.
    """
    x, y, z = s.scaled()
    x2, iy2, z2 = x * x, 1.0 / (y * y), z * z
    den = (1.0 + x2 * (1.0 + iy2)) * (1.0 + (x2 + 4.0) * iy2 + z2 * (1.0 + x2 * iy2))
    # den - num = z^2 (1 - x^2/y^2)^2, which keeps the result <= 1 in floating point
    return math.sqrt(1.0 - z2 * (1.0 - x2 * iy2) ** 2 / den)


def purity_limit(t_m: float, omega_d: float) -> float:
    """Strong-correlation limit ``1 / sqrt(1 + t_m^2 omega_d^2)``."""
    if not t_m > 0 or omega_d < 0:
        raise ValueError("need t_m > 0 and omega_d >= 0")
    return 1.0 / math.sqrt(1.0 + (t_m * omega_d) ** 2)


@dataclass(frozen=True)
class HeraldedWidth:
    """Heralded shape ``|psi(t|w)| ~ exp(-t^2 / (2 width^2))`` with phase ``exp(1j * phase_factor * w * t)``."""

    width: float
    phase_factor: float


def gaussian_heralded_width(s: GaussianScenario) -> HeraldedWidth:
    """Gaussian parameter of the ideally heralded shape, in the same convention as t_m.

    Completing the square in the t' integral with ``a = 1/t_m^2 + 1/t_c^2 + 1/t_u^2``,
    ``b = 1/t_c^2 - 1/t_u^2``, ``c = 1/t_c^2 + 1/t_u^2`` leaves
    ``exp(-t^2 (c - b^2/a) / 2)``, and ``a c - b^2 = c / t_m^2 + 4 / (t_c t_u)^2``.
    A detected frequency offset only adds the phase ramp ``exp(1j w t b / a)``.
    """
    x, y, _ = s.scaled()
    a = 1.0 + 1.0 / x**2 + 1.0 / y**2
    b = 1.0 / x**2 - 1.0 / y**2
    c = 1.0 / x**2 + 1.0 / y**2
    w2 = a / (c + 4.0 / (x * y) ** 2)
    return HeraldedWidth(math.sqrt(w2) * s.t_m, b / a)

"""Scenario files: YAML (or JSON) documents validated into typed models.

Dialect ``heraldshape-config/1``. Example::

    version: 1
    state:     {kind: gaussian, t_c: 0.01, t_u: 100}
    modulator: {kind: gaussian, t_m: 1}
    detection: {kind: ideal, omega: 0}
    grid:      {mode: window, n: 1024, half_span: 4.5}

Unknown keys are rejected. Relative file paths resolve against the config file.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import GridError, HeraldShapeError
from .numerics import TimeGrid, auto_grid, window_grid

CONFIG_DIALECT = "heraldshape-config/1"


class ConfigError(HeraldShapeError):
    pass


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


Positive = Annotated[float, Field(gt=0, allow_inf_nan=False)]
NonNegative = Annotated[float, Field(ge=0, allow_inf_nan=False)]
Finite = Annotated[float, Field(allow_inf_nan=False)]


class GaussianState(_Spec):
    kind: Literal["gaussian"]
    t_c: Positive
    t_u: Positive

    @model_validator(mode="after")
    def _ordering(self):
        if self.t_c > self.t_u:
            raise ValueError("t_c must not exceed t_u")
        return self


class SeparableState(_Spec):
    kind: Literal["separable"]
    signal_file: str
    idler_file: str


class TabulatedState(_Spec):
    kind: Literal["tabulated"]
    file: str


class CorrelatedMixtureState(_Spec):
    """Classically correlated look-alike of a Gaussian pair."""

    kind: Literal["correlated_mixture"]
    t_c: Positive
    t_u: Positive
    n_components: Annotated[int, Field(ge=1, le=2000)] = 41


PureState = Annotated[Union[GaussianState, SeparableState, TabulatedState], Field(discriminator="kind")]


class MixtureComponent(_Spec):
    weight: NonNegative
    state: PureState


class MixtureState(_Spec):
    kind: Literal["mixture"]
    components: list[MixtureComponent] = Field(min_length=1)

    @model_validator(mode="after")
    def _weights(self):
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"mixture weights must sum to 1, got {total!r}")
        return self


StateSpec = Annotated[
    Union[GaussianState, SeparableState, TabulatedState, MixtureState, CorrelatedMixtureState],
    Field(discriminator="kind"),
]


class GaussianMod(_Spec):
    kind: Literal["gaussian"]
    t_m: Positive
    center: Finite = 0.0


class RectMod(_Spec):
    kind: Literal["rect"]
    t_on: Finite
    t_off: Finite
    amplitude: tuple[Finite, Finite] = (1.0, 0.0)  # (re, im)

    @model_validator(mode="after")
    def _window(self):
        if not self.t_on < self.t_off:
            raise ValueError("t_on must be before t_off")
        if math.hypot(*self.amplitude) > 1.0 + 1e-12:
            raise ValueError("transmission exceeds unity")
        return self


class TabulatedMod(_Spec):
    kind: Literal["tabulated"]
    file: str


ModulatorSpec = Annotated[Union[GaussianMod, RectMod, TabulatedMod], Field(discriminator="kind")]


class IdealDetection(_Spec):
    kind: Literal["ideal"]
    omega: Finite = 0.0


class FilteredDetection(_Spec):
    kind: Literal["filtered"]
    filter: Literal["single_pole", "gaussian"] = "single_pole"
    omega_f: Positive
    omega: Finite = 0.0
    t_click: Optional[Finite] = None  # default: modulation end + 2 / omega_f


class TimeResolvedDetection(_Spec):
    kind: Literal["time_resolved"]
    t_click: Finite = 0.0


class DensityDetection(_Spec):
    kind: Literal["density"]
    omega0: Finite = 0.0
    omega_d: NonNegative
    n_nodes: Optional[Annotated[int, Field(ge=3)]] = None


DetectionSpec = Annotated[
    Union[IdealDetection, FilteredDetection, TimeResolvedDetection, DensityDetection],
    Field(discriminator="kind"),
]


class GridSpec(_Spec):
    """How to sample both time axes.

    ``auto`` uses a full grid (``+-4 max(t_u, t_m)``, six samples per t_c) when it
    fits in ``max_n`` samples and otherwise a window of ``max_n`` samples around
    the modulator. States read from files always use their own grids.
    """

    mode: Literal["auto", "window", "explicit"] = "auto"
    n: Optional[Annotated[int, Field(ge=8)]] = None
    half_span: Optional[Positive] = None
    t_start: Optional[Finite] = None
    dt: Optional[Positive] = None
    max_n: Annotated[int, Field(ge=8)] = 1024
    min_points_per_tc: Positive = 1.0

    @model_validator(mode="after")
    def _explicit(self):
        if self.mode == "explicit" and None in (self.t_start, self.dt, self.n):
            raise ValueError("explicit grid needs t_start, dt and n")
        return self


class PurityMapSpec(_Spec):
    t_c: list[Positive] = Field(min_length=1)
    t_u: list[Positive] = Field(min_length=1)
    t_m: list[Positive] = Field(default=[1.0], min_length=1)
    omega_d: list[NonNegative] = Field(min_length=1)
    omega0: Finite = 0.0
    n: Annotated[int, Field(ge=8)] = 512
    half_span_factor: Positive = 5.0

    @model_validator(mode="after")
    def _size(self):
        size = len(self.t_c) * len(self.t_u) * len(self.t_m) * len(self.omega_d)
        if size > 10_000:
            raise ValueError(f"purity map has {size} points; the limit is 10000")
        return self


class RateSpec(_Spec):
    omega_f: Optional[Positive] = None  # default: from filtered detection
    filter: Optional[Literal["single_pole", "gaussian"]] = None
    pulsed: bool = False
    points_per_tc: Positive = 3.0
    max_n: Annotated[int, Field(ge=8)] = 2500


class Scenario(_Spec):
    version: Literal[1] = 1
    name: str = ""
    state: StateSpec
    modulator: ModulatorSpec
    detection: DetectionSpec = IdealDetection(kind="ideal")
    grid: GridSpec = GridSpec()
    outputs: list[Literal["shape", "manifest", "density"]] = ["shape", "manifest"]
    sweep: Optional[dict[str, list]] = None
    purity_map: Optional[PurityMapSpec] = None
    rate: Optional[RateSpec] = None

    @field_validator("sweep")
    @classmethod
    def _sweep(cls, v):
        if v is None:
            return v
        size = 1
        for key, values in v.items():
            if not values:
                raise ValueError(f"sweep axis {key!r} is empty")
            size *= len(values)
        if size > 10_000:
            raise ValueError(f"sweep has {size} points; the limit is 10000")
        return v


def format_validation_error(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"  {loc}: {e['msg']}")
    return "invalid scenario:\n" + "\n".join(lines)


def _resolve_paths(data, base: Path):
    if isinstance(data, dict):
        out = {}
        for k, v in data.items():
            if k in ("file", "signal_file", "idler_file") and isinstance(v, str):
                p = Path(v)
                out[k] = str(p if p.is_absolute() else (base / p).resolve())
            else:
                out[k] = _resolve_paths(v, base)
        return out
    if isinstance(data, list):
        return [_resolve_paths(v, base) for v in data]
    return data


def parse_scenario(data: dict, base_dir: Path | str = ".") -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping at the top level")
    try:
        return Scenario.model_validate(_resolve_paths(data, Path(base_dir)))
    except ValidationError as err:
        raise ConfigError(format_validation_error(err)) from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{path}: YAML syntax error{where}: {getattr(exc, 'problem', exc)}") from None
    return parse_scenario(data, path.parent)


def with_overrides(scenario: Scenario, overrides: dict) -> Scenario:
    """Copy of ``scenario`` with dotted-key overrides such as ``{"modulator.t_m": 2.0}``."""
    data = scenario.model_dump(mode="json")
    for key, value in overrides.items():
        node = data
        parts = key.split(".")
        for p in parts[:-1]:
            if not isinstance(node, dict) or p not in node or node[p] is None:
                raise ConfigError(f"sweep key {key!r} does not name a scenario field")
            node = node[p]
        node[parts[-1]] = value
    try:
        return Scenario.model_validate(data)
    except ValidationError as err:
        raise ConfigError(format_validation_error(err)) from None


def time_scales(s: Scenario) -> dict:
    """Characteristic times and bandwidths named by the scenario (``None`` when absent)."""
    st, mod, det = s.state, s.modulator, s.detection
    out = {"t_c": None, "t_u": None, "t_m": None, "omega_f": None, "omega_d": None}
    if isinstance(st, (GaussianState, CorrelatedMixtureState)):
        out["t_c"], out["t_u"] = st.t_c, st.t_u
    if isinstance(mod, GaussianMod):
        out["t_m"] = mod.t_m
    elif isinstance(mod, RectMod):
        out["t_m"] = mod.t_off - mod.t_on
    if isinstance(det, FilteredDetection):
        out["omega_f"] = det.omega_f
    if isinstance(det, DensityDetection):
        out["omega_d"] = det.omega_d
    if s.rate is not None and s.rate.omega_f is not None:
        out["omega_f"] = s.rate.omega_f
    return out


def modulator_window(mod) -> tuple[float, float] | None:
    if isinstance(mod, GaussianMod):
        return mod.center - 4 * mod.t_m, mod.center + 4 * mod.t_m
    if isinstance(mod, RectMod):
        return mod.t_on, mod.t_off
    return None


def resolve_grid(s: Scenario) -> tuple[TimeGrid, str]:
    """Grid for analytic states and the mode actually used (``full``, ``window`` or ``explicit``)."""
    g = s.grid
    if g.mode == "explicit":
        return TimeGrid(g.t_start, g.dt, g.n), "explicit"
    sc = time_scales(s)
    if sc["t_c"] is None:
        raise ConfigError("grid.mode auto/window needs an analytic state (gaussian or correlated_mixture)")
    win = modulator_window(s.modulator)
    t_m = sc["t_m"]
    if g.mode == "auto" and g.half_span is None:
        try:
            full = auto_grid(sc["t_c"], sc["t_u"], t_m or sc["t_u"], max_n=g.max_n)
        except GridError:
            pass
        else:
            if g.n is not None:
                full = TimeGrid.symmetric(-full.t_start, g.n)
            return full, "full"
    if win is None:
        raise ConfigError("window grids need a gaussian or rect modulator; use grid.mode: explicit")
    center = 0.5 * (win[0] + win[1])
    half = g.half_span if g.half_span is not None else 1.25 * 0.5 * (win[1] - win[0])
    n = g.n if g.n is not None else g.max_n
    return window_grid(1.0, n, half, center), "window"

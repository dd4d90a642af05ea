"""Turn a validated :class:`~heraldshape.config.Scenario` into numbers."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import config as C
from .analytic import GaussianScenario, purity_closed_form
from .errors import GridError
from .heralding import (
    DetectorSpectralResponse,
    HeraldedShape,
    SignalDensityMatrix,
    SpectralFilter,
    herald_filtered,
    herald_frequency_resolved,
    herald_mixture,
    herald_time_resolved,
    heralded_density_matrix,
)
from .metrics import fidelity, purity, validate_regime
from .numerics import TimeGrid, window_grid
from .shaping import Modulator, apply_modulator, gaussian_modulator, rect_modulator, tabulated_modulator
from .states import (
    ClassicalMixture,
    GaussianBiphotonParams,
    correlated_mixture,
    make_gaussian_joint,
    make_separable,
    make_tabulated,
)
from .tables import read_field1d, read_field2d


@dataclass
class Built:
    state: object  # JointAmplitude or ClassicalMixture
    modulator: Modulator
    grid_mode: str
    grid_s: TimeGrid
    grid_i: TimeGrid


@dataclass
class Outcome:
    shape: HeraldedShape | None = None
    density: SignalDensityMatrix | None = None
    transmitted: float | None = None
    results: dict = field(default_factory=dict)


def _pure_state(spec, grid: TimeGrid | None, min_ppt: float, truncate: bool):
    if isinstance(spec, C.GaussianState):
        return make_gaussian_joint(GaussianBiphotonParams(spec.t_c, spec.t_u), grid,
                                   points_per_tc=min_ppt, truncate=truncate)
    if isinstance(spec, C.SeparableState):
        return make_separable(read_field1d(spec.signal_file), read_field1d(spec.idler_file))
    return make_tabulated(read_field2d(spec.file))


def build(s: C.Scenario) -> Built:
    st = s.state
    analytic = isinstance(st, (C.GaussianState, C.CorrelatedMixtureState)) or (
        isinstance(st, C.MixtureState) and all(isinstance(c.state, C.GaussianState) for c in st.components)
    )
    mod_table = read_field1d(s.modulator.file) if isinstance(s.modulator, C.TabulatedMod) else None
    if analytic:
        if mod_table is not None and s.grid.mode == "auto":
            grid, mode = mod_table.grid, "modulator"
        else:
            if isinstance(st, C.MixtureState):
                first = st.components[0].state
                s_for_grid = s.model_copy(update={"state": first})
                grid, mode = C.resolve_grid(s_for_grid)
            else:
                grid, mode = C.resolve_grid(s)
        truncate = mode != "full"
        ppt = s.grid.min_points_per_tc
        if isinstance(st, C.CorrelatedMixtureState):
            state = correlated_mixture(GaussianBiphotonParams(st.t_c, st.t_u), grid, n_components=st.n_components)
        elif isinstance(st, C.MixtureState):
            state = ClassicalMixture(tuple((c.weight, _pure_state(c.state, grid, ppt, truncate))
                                           for c in st.components))
        else:
            state = _pure_state(st, grid, ppt, truncate)
    else:
        if isinstance(st, C.MixtureState):
            state = ClassicalMixture(tuple((c.weight, _pure_state(c.state, None, 0, False))
                                           for c in st.components))
        else:
            state = _pure_state(st, None, 0, False)
        mode = "file"
    first = state.components[0][1] if isinstance(state, ClassicalMixture) else state
    grid_s, grid_i = first.grid_s, first.grid_i
    m = s.modulator
    if isinstance(m, C.GaussianMod):
        mod = gaussian_modulator(m.t_m, grid_i, m.center)
    elif isinstance(m, C.RectMod):
        mod = rect_modulator(m.t_on, m.t_off, complex(*m.amplitude), grid_i)
    else:
        mod = tabulated_modulator(mod_table, f"tabulated({m.file})")
    if not mod.grid.compatible(grid_i):
        raise GridError("modulator grid does not match the idler grid of the state")
    return Built(state, mod, mode, grid_s, grid_i)


def default_click(mod: Modulator, omega_f: float) -> float:
    return mod.window()[1] + 2.0 / omega_f


def detect(built: Built, det) -> Outcome:
    """Run the detection model on the built state; mixtures always give a density matrix."""
    out = Outcome()
    mod = built.modulator
    omega_target = 0.0
    if isinstance(built.state, ClassicalMixture):
        omega = det.omega0 if isinstance(det, C.DensityDetection) else getattr(det, "omega", 0.0)
        wd = det.omega_d if isinstance(det, C.DensityDetection) else 0.0
        if isinstance(det, (C.FilteredDetection, C.TimeResolvedDetection)):
            raise C.ConfigError("detection: mixtures support ideal and density detection only")
        out.density = herald_mixture(built.state, mod, omega, DetectorSpectralResponse(wd))
        omega_target = omega
    else:
        modded = apply_modulator(built.state, mod)
        out.transmitted = modded.transmitted
        if isinstance(det, C.IdealDetection):
            out.shape = herald_frequency_resolved(modded, det.omega)
            omega_target = det.omega
        elif isinstance(det, C.TimeResolvedDetection):
            out.shape = herald_time_resolved(modded, det.t_click)
        elif isinstance(det, C.FilteredDetection):
            t_click = det.t_click if det.t_click is not None else default_click(mod, det.omega_f)
            out.shape = herald_filtered(modded, SpectralFilter(det.filter, det.omega_f, det.omega), t_click)
            omega_target = det.omega
        else:
            out.density = heralded_density_matrix(modded, det.omega0, DetectorSpectralResponse(det.omega_d),
                                                  det.n_nodes)
            omega_target = det.omega0
    r = out.results
    r["grid_mode"] = built.grid_mode
    if out.transmitted is not None:
        # on window grids the state was renormalized inside the window
        r["transmitted_fraction"] = out.transmitted
        r["state_truncated_to_grid"] = built.grid_mode not in ("full", "file")
    if out.shape is not None:
        r["weight"] = out.shape.weight
        r["herald"] = dict(out.shape.herald)
        if mod.grid.compatible(out.shape.grid):
            r["fidelity_to_modulator"] = fidelity(out.shape, mod.target(omega_target))
    if out.density is not None:
        r["weight"] = out.density.total_weight
        r["purity"] = purity(out.density)
    return out


def regime_for(s: C.Scenario):
    sc = C.time_scales(s)
    if None in (sc["t_c"], sc["t_u"], sc["t_m"]):
        return None
    return validate_regime(sc["t_c"], sc["t_m"], sc["t_u"], sc["omega_f"], sc["omega_d"] or 0.0)


def purity_point(t_c: float, t_u: float, t_m: float, omega_d: float, omega0: float = 0.0,
                 n: int = 512, half_span_factor: float = 5.0, min_points_per_tc: float = 1.0) -> dict:
    """Numerical heralded purity on a modulator-window grid next to the closed form."""
    grid = window_grid(t_m, n, half_span_factor)
    state = make_gaussian_joint(GaussianBiphotonParams(t_c, t_u), grid,
                                points_per_tc=min_points_per_tc, truncate=True)
    mod = gaussian_modulator(t_m, grid)
    rho = heralded_density_matrix(apply_modulator(state, mod), omega0, DetectorSpectralResponse(omega_d))
    num = purity(rho)
    exact = purity_closed_form(GaussianScenario(t_c, t_u, t_m, omega_d))
    return {"purity_numeric": num, "purity_closed_form": exact, "abs_delta": abs(num - exact)}


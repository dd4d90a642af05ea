"""Command-line front end.

Subcommands: ``shape``, ``purity-map``, ``rate``, ``validate``, ``sweep``.
Exit codes: 0 success, 2 configuration error, 3 zero-weight herald,
4 numerical-invariant failure (and 1 from ``validate`` when a condition is violated).
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from . import config as C
from .errors import FieldError, GridError, InvariantError, ModulatorError, ZeroHeraldError
from .heralding import SpectralFilter
from .metrics import heralding_rate_modulated, heralding_rate_pulsed, simulated_heralding_fraction
from .numerics import auto_grid
from .runner import build, detect, purity_point, regime_for
from .shaping import apply_modulator, gaussian_modulator, rect_modulator
from .states import GaussianBiphotonParams, make_gaussian_joint
from .tables import write_field2d, write_shape_csv

EXIT_OK, EXIT_VIOLATED, EXIT_CONFIG, EXIT_ZERO, EXIT_INVARIANT = 0, 1, 2, 3, 4
OUT_DIR_ENV = "HERALDSHAPE_OUT_DIR"
MANIFEST_FORMAT = "heraldshape-manifest/1"


def _g(x):
    """Full-precision number formatting for CSV cells."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _dump_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _apply_grid_flags(s: C.Scenario, args) -> C.Scenario:
    upd = {}
    if args.grid_n is not None:
        upd["n"] = args.grid_n
        upd["max_n"] = max(args.grid_n, s.grid.max_n)
    if args.grid_span is not None:
        upd["half_span"] = args.grid_span
        if s.grid.mode == "auto":
            upd["mode"] = "window"
    if not upd:
        return s
    try:
        grid = C.GridSpec.model_validate({**s.grid.model_dump(), **upd})
    except Exception as exc:
        raise C.ConfigError(f"grid flags: {exc}") from None
    return s.model_copy(update={"grid": grid})


def _manifest(s: C.Scenario, built, results: dict, files: list[str], extra: dict | None = None) -> dict:
    regime = regime_for(s)
    data = {
        "format": MANIFEST_FORMAT,
        "config_dialect": C.CONFIG_DIALECT,
        "software_version": __version__,
        "scenario": s.model_dump(mode="json"),
        "results": results,
        "regime": regime.as_dict() if regime else None,
        "files": files,
    }
    if built is not None:
        data["grid"] = {
            "mode": built.grid_mode,
            "signal": {"t_start": built.grid_s.t_start, "dt": built.grid_s.dt, "n": built.grid_s.n},
            "idler": {"t_start": built.grid_i.t_start, "dt": built.grid_i.dt, "n": built.grid_i.n},
        }
        data["modulator"] = {"label": built.modulator.label, "support_width": built.modulator.support_width,
                             "energy_width": built.modulator.energy_width}
    if extra:
        data.update(extra)
    return data


def cmd_shape(s: C.Scenario, out: Path, args) -> int:
    built = build(s)
    outcome = detect(built, s.detection)
    files = []
    stem = args.prefix
    if outcome.shape is not None and "shape" in s.outputs:
        write_shape_csv(out / f"{stem}shape.csv", outcome.shape)
        files.append(f"{stem}shape.csv")
    if outcome.density is not None and ("density" in s.outputs or "shape" in s.outputs):
        write_field2d(out / f"{stem}density.csv", outcome.density.matrix)
        files.append(f"{stem}density.csv")
    if "manifest" in s.outputs:
        _dump_json(out / f"{stem}manifest.json", _manifest(s, built, outcome.results, files))
        files.append(f"{stem}manifest.json")
    for k in sorted(outcome.results):
        v = outcome.results[k]
        print(f"{k}: {v}")
    print("wrote " + ", ".join(str(out / f) for f in files))
    return EXIT_OK


def _map_points(pm: C.PurityMapSpec):
    return list(itertools.product(pm.t_c, pm.t_u, pm.t_m, pm.omega_d))


def cmd_purity_map(s: C.Scenario, out: Path, args) -> int:
    pm = s.purity_map
    if pm is None:
        raise C.ConfigError("purity_map: section required for the purity-map subcommand")
    n = args.grid_n or pm.n
    ppt = s.grid.min_points_per_tc

    def one(p):
        t_c, t_u, t_m, wd = p
        try:
            return purity_point(t_c, t_u, t_m, wd, pm.omega0, n, pm.half_span_factor, ppt), ""
        except (GridError, FieldError, ModulatorError, ZeroHeraldError, InvariantError, ValueError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    points = _map_points(pm)
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        rows = list(pool.map(one, points))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_c", "t_u", "t_m", "omega_d", "purity_numeric", "purity_closed_form", "abs_delta", "error"])
    deltas = []
    for p, (res, err) in zip(points, rows):
        if res is None:
            w.writerow([_g(v) for v in p] + ["", "", "", err])
        else:
            deltas.append(res["abs_delta"])
            w.writerow([_g(v) for v in p] + [_g(res["purity_numeric"]), _g(res["purity_closed_form"]),
                                             _g(res["abs_delta"]), ""])
    max_delta = max(deltas) if deltas else float("nan")
    n_err = len(points) - len(deltas)
    summary = f"# points={len(points)} errors={n_err} max_abs_delta={_g(max_delta)}"
    (out / f"{args.prefix}purity_map.csv").write_text(buf.getvalue() + summary + "\n")
    _dump_json(out / f"{args.prefix}purity_map_manifest.json",
               _manifest(s, None, {"max_abs_delta": max_delta, "points": len(points), "errors": n_err},
                         [f"{args.prefix}purity_map.csv"], {"grid_n": n}))
    print(summary.lstrip("# "))
    return EXIT_OK


def cmd_rate(s: C.Scenario, out: Path, args) -> int:
    sc = C.time_scales(s)
    rs = s.rate or C.RateSpec()
    omega_f = sc["omega_f"]
    kind = rs.filter or (s.detection.filter if isinstance(s.detection, C.FilteredDetection) else "gaussian")
    if None in (sc["t_c"], sc["t_u"], sc["t_m"]) or omega_f is None:
        raise C.ConfigError("rate needs a gaussian state, a gaussian/rect modulator and omega_f "
                            "(from filtered detection or the rate section)")
    pulsed = rs.pulsed or args.pulsed
    lines = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = heralding_rate_modulated(omega_f, sc["t_c"], sc["t_m"], sc["t_u"])
    report = {
        "omega_f": omega_f, "t_c": sc["t_c"], "t_m": sc["t_m"], "t_u": sc["t_u"], "filter": kind,
        "formula_rate": est.rate, "formula_modulator_fraction": est.modulator_fraction,
        "formula_filter_acceptance": est.filter_acceptance, "acceptance_clamped": est.acceptance_clamped,
        "pulsed": pulsed, "warnings": [str(c.message) for c in caught],
    }
    if pulsed:
        report["pulsed_rate"] = heralding_rate_pulsed(omega_f, sc["t_c"])
    try:
        grid = auto_grid(sc["t_c"], sc["t_u"], sc["t_m"], points_per_tc=rs.points_per_tc, max_n=rs.max_n)
    except GridError as exc:
        report["simulation"] = None
        report["warnings"].append(f"simulation skipped: {exc}")
    else:
        state = make_gaussian_joint(GaussianBiphotonParams(sc["t_c"], sc["t_u"]), grid,
                                    points_per_tc=rs.points_per_tc)
        m = s.modulator
        mod = (gaussian_modulator(m.t_m, grid, m.center) if isinstance(m, C.GaussianMod)
               else rect_modulator(m.t_on, m.t_off, complex(*m.amplitude), grid))
        sim = simulated_heralding_fraction(apply_modulator(state, mod), SpectralFilter(kind, omega_f))
        report["simulation"] = {
            "grid_n": grid.n, "transmitted_fraction": sim.transmitted,
            "filter_acceptance": sim.filter_acceptance, "rate": sim.rate,
            "ratio_simulated_to_formula": sim.rate / est.rate,
        }
    regime = regime_for(s)
    report["regime"] = regime.as_dict() if regime else None
    _dump_json(out / f"{args.prefix}rate.json", report)
    lines.append(f"formula rate        {est.rate:.6g}")
    if pulsed:
        lines.append(f"pulsed rate         {report['pulsed_rate']:.6g}")
    if report["simulation"]:
        sim = report["simulation"]
        lines.append(f"transmitted         {sim['transmitted_fraction']:.6g}")
        lines.append(f"filter acceptance   {sim['filter_acceptance']:.6g}")
        lines.append(f"simulated/formula   {sim['ratio_simulated_to_formula']:.6g}")
    for wmsg in report["warnings"]:
        lines.append(f"warning: {wmsg}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_validate(s: C.Scenario, out: Path, args) -> int:
    regime = regime_for(s)
    if regime is None:
        raise C.ConfigError("validate needs t_c, t_u (gaussian state) and t_m (gaussian or rect modulator)")
    for line in regime.lines():
        print(line)
    _dump_json(out / f"{args.prefix}regime.json", regime.as_dict())
    return EXIT_OK if regime.ok else EXIT_VIOLATED


SWEEP_RESULTS = ("weight", "transmitted_fraction", "fidelity_to_modulator", "purity")


def cmd_sweep(s: C.Scenario, out: Path, args) -> int:
    if not s.sweep:
        raise C.ConfigError("sweep: section required for the sweep subcommand")
    keys = list(s.sweep)
    points = list(itertools.product(*(s.sweep[k] for k in keys)))
    scenarios = [C.with_overrides(s, dict(zip(keys, p))) for p in points]

    def one(sc):
        try:
            return detect(build(sc), sc.detection).results, ""
        except (GridError, FieldError, ModulatorError, ZeroHeraldError, InvariantError, C.ConfigError) as exc:
            return {}, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        rows = list(pool.map(one, scenarios))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys + list(SWEEP_RESULTS) + ["error"])
    for p, (res, err) in zip(points, rows):
        w.writerow([v if isinstance(v, str) else _g(v) for v in p] + [_g(res.get(k)) for k in SWEEP_RESULTS] + [err])
    (out / f"{args.prefix}sweep.csv").write_text(buf.getvalue())
    _dump_json(out / f"{args.prefix}sweep_manifest.json",
               _manifest(s, None, {"points": len(points), "errors": sum(1 for _, e in rows if e)},
                         [f"{args.prefix}sweep.csv"]))
    print(f"{len(points)} sweep points written to {out / (args.prefix + 'sweep.csv')}")
    return EXIT_OK


COMMANDS = {
    "shape": cmd_shape,
    "purity-map": cmd_purity_map,
    "rate": cmd_rate,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heraldshape", description="Heralded temporal shaping of single photons.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="scenario file (YAML or JSON)")
        p.add_argument("--grid-n", type=int, default=None, help="samples per time axis")
        p.add_argument("--grid-span", type=float, default=None, help="half span of a window grid")
        p.add_argument("--out-dir", default=os.environ.get(OUT_DIR_ENV, "."),
                       help=f"output directory (default ${OUT_DIR_ENV} or .)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        p.add_argument("--prefix", default="", help="prefix for output file names")
        if name == "rate":
            p.add_argument("--pulsed", action="store_true", help="also report the pulsed-pump rate")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        s = _apply_grid_flags(C.load_scenario(args.config), args)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](s, out, args)
    except C.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZeroHeraldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZERO
    except InvariantError as exc:
        print(f"numerical invariant failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (GridError, FieldError, ModulatorError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())

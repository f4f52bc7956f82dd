"""Command-line front end.

Subcommands ``simulate``, ``sweep``, ``optimize`` and ``check``.  Options
come from a flat TOML document (``--config``) overlaid by command-line
flags.  With ``physical_units = true`` frequencies are read as cyclic MHz
and times as ns; everything is converted to the dimensionless form
(``delta_anh = 1``) here and nowhere else.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import checks, experiments, plotting
from .dynamics import EvolutionGrid, evolve
from .errors import ConfigError, StirapError
from .experiments import REFERENCE_GAMMA_TILDES, SweepSpec, default_grid

MODES = ("simulate", "sweep", "optimize", "check")

SWEEP_COLUMNS = ("omega_over_delta", "gamma_tilde", "cross", "a_param", "p0", "p1", "p2",
                 "p1_max", "trace_drift")
OPTIMUM_COLUMNS = ("gamma_tilde", "omega_star_over_delta", "p2_star", "sigma_star_times_delta",
                   "boundary_flag", "multimodal_flag")
TRAJECTORY_COLUMNS = ("t_times_delta", "p0", "p1", "p2", "re_rho02", "im_rho02")
CHECK_COLUMNS = ("check", "omega_over_delta", "gamma_tilde", "cross", "value", "tolerance", "passed")

COMMON_KEYS = {
    "mode", "physical_units", "a_param", "t_s_over_sigma", "window_mult", "dt_policy",
    "dissipator", "cross", "cross_variants", "workers", "output_path", "emit_trajectory",
    "trajectory_path", "sample_stride", "plot", "tol", "n_scan", "gamma_tilde", "gamma_tilde_list",
}
DIMENSIONLESS_KEYS = {
    "delta_anh", "delta01", "delta12", "omega_over_delta",
    "omega_over_delta_grid", "grid_min", "grid_max", "grid_points", "bracket_lo", "bracket_hi",
}
PHYSICAL_KEYS = {
    "delta_mhz", "delta01_mhz", "delta12_mhz", "omega_mhz", "sigma_ns", "gamma_mhz",
    "gamma_mhz_list", "omega_mhz_grid", "omega_mhz_min", "omega_mhz_max", "grid_points",
    "bracket_lo_mhz", "bracket_hi_mhz",
}


def _canon(x):
    # ratios of rescaled physical inputs can differ in the last bit; 12 significant
    # digits makes the dimensionless inputs, and hence the output, bit-identical
    return float(f"{x:.12g}")


@dataclass
class RunConfig:
    mode: str
    physical_units: bool = False
    delta_mhz: float = None
    spec: SweepSpec = field(default_factory=SweepSpec)
    omega_over_delta: float = 0.5
    gamma_tildes: tuple = (0.0,)
    cross: bool = True
    bracket: tuple = (0.02, 1.0)
    tol: float = 1e-3
    n_scan: int = 25
    output_path: str = None
    emit_trajectory: bool = False
    trajectory_path: str = None
    sample_stride: int = 10
    plot: bool = False
    workers: int = 1


def _number(doc, key, lo=None, hi=None, strict_lo=False, integer=False):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    v = int(v) if integer else float(v)
    if lo is not None and (v <= lo if strict_lo else v < lo):
        raise ConfigError(f"{key}: must be {'>' if strict_lo else '>='} {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{key}: must be <= {hi}, got {v}")
    return v


def _bool(doc, key):
    v = doc[key]
    if isinstance(v, str) and v.lower() in ("on", "off", "true", "false"):
        return v.lower() in ("on", "true")
    if not isinstance(v, bool):
        raise ConfigError(f"{key}: expected a boolean, got {v!r}")
    return v


def _list(doc, key, lo=None, strict_lo=False):
    v = doc[key]
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{key}: expected a non-empty list")
    return [_number({key: x}, key, lo=lo, strict_lo=strict_lo) for x in v]


def parse_config(text="", mode=None, overrides=None):
    """Validate a flat TOML document into a :class:`RunConfig`.

    ``overrides`` (from command-line flags) take precedence over the
    document.  Missing values get the defaults: a = 3*pi,
    t_s/sigma = -1.5, zero detunings, window_mult = 5, cross on.

    Raises
    ------
    ConfigError
        Unknown keys, wrong types or out-of-range values.
    """
    try:
        doc = tomllib.loads(text) if text else {}
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    for k, v in doc.items():
        if isinstance(v, dict):
            raise ConfigError(f"{k}: nested tables are not supported")
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})

    mode = mode or doc.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    physical = _bool(doc, "physical_units") if "physical_units" in doc else False
    allowed = COMMON_KEYS | (PHYSICAL_KEYS if physical else DIMENSIONLESS_KEYS)
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    cfg = RunConfig(mode=mode, physical_units=physical)
    spec_kw = {}
    if "a_param" in doc:
        spec_kw["a_param"] = _number(doc, "a_param", lo=0, strict_lo=True)
    if "t_s_over_sigma" in doc:
        spec_kw["t_s_over_sigma"] = _number(doc, "t_s_over_sigma")
    if "window_mult" in doc:
        spec_kw["window_mult"] = _number(doc, "window_mult", lo=3)
    if "dt_policy" in doc:
        spec_kw["dt_policy"] = _number(doc, "dt_policy", lo=1)
    if "dissipator" in doc:
        if doc["dissipator"] not in ("cascade", "lindblad"):
            raise ConfigError(f"dissipator: expected 'cascade' or 'lindblad', got {doc['dissipator']!r}")
        spec_kw["dissipator"] = doc["dissipator"]
    if "cross" in doc:
        cfg.cross = _bool(doc, "cross")
    if "cross_variants" in doc:
        v = doc["cross_variants"]
        if not isinstance(v, list) or not v:
            raise ConfigError("cross_variants: expected a non-empty list")
        spec_kw["cross_variants"] = tuple(_bool({"cross_variants": x}, "cross_variants") for x in v)
    elif "cross" in doc and mode == "sweep":
        spec_kw["cross_variants"] = (cfg.cross,)
    if "tol" in doc:
        cfg.tol = _number(doc, "tol", lo=1e-4)
    if "n_scan" in doc:
        cfg.n_scan = _number(doc, "n_scan", lo=25, integer=True)
    if "workers" in doc:
        cfg.workers = _number(doc, "workers", lo=1, integer=True)
    if "sample_stride" in doc:
        cfg.sample_stride = _number(doc, "sample_stride", lo=1, integer=True)
    if "emit_trajectory" in doc:
        cfg.emit_trajectory = _bool(doc, "emit_trajectory")
    if "plot" in doc:
        cfg.plot = _bool(doc, "plot")
    for key in ("output_path", "trajectory_path"):
        if key in doc:
            if not isinstance(doc[key], str):
                raise ConfigError(f"{key}: expected a string")
            setattr(cfg, key, doc[key])

    grid_points = _number(doc, "grid_points", lo=1, integer=True) if "grid_points" in doc else 60
    if physical:
        gammas = _physical_inputs(doc, cfg, spec_kw, grid_points)
    else:
        _dimensionless_inputs(doc, cfg, spec_kw, grid_points)
        gammas = None
    dimless = [k for k in ("gamma_tilde", "gamma_tilde_list") if k in doc]
    if gammas is not None and dimless:
        raise ConfigError(f"{dimless[0]}: conflicts with the MHz decay rate")
    if "gamma_tilde_list" in doc:
        gammas = tuple(_list(doc, "gamma_tilde_list", lo=0))
    elif "gamma_tilde" in doc:
        g = doc["gamma_tilde"]
        gammas = tuple(_list(doc, "gamma_tilde", lo=0)) if isinstance(g, list) else (_number(doc, "gamma_tilde", lo=0),)

    if gammas is not None:
        cfg.gamma_tildes = gammas
        if mode == "sweep":
            spec_kw["gamma_tilde_list"] = gammas
    elif mode == "optimize":
        cfg.gamma_tildes = REFERENCE_GAMMA_TILDES
    if mode in ("simulate",) and len(cfg.gamma_tildes) != 1:
        raise ConfigError("simulate takes exactly one decay rate")
    cfg.spec = SweepSpec(**spec_kw)
    lo, hi = cfg.bracket
    if not (0 < lo < hi <= 2):
        raise ConfigError(f"bracket must satisfy 0 < lo < hi <= 2 (in units of delta), got {cfg.bracket}")
    return cfg


def _dimensionless_inputs(doc, cfg, spec_kw, grid_points):
    if "delta_anh" in doc and _number(doc, "delta_anh") != 1.0:
        raise ConfigError("delta_anh: dimensionless inputs require delta_anh = 1")
    d01 = _number(doc, "delta01") if "delta01" in doc else 0.0
    d12 = _number(doc, "delta12") if "delta12" in doc else 0.0
    spec_kw["detunings"] = (d01, d12)
    if "omega_over_delta" in doc:
        cfg.omega_over_delta = _number(doc, "omega_over_delta", lo=0, hi=2, strict_lo=True)
    if "omega_over_delta_grid" in doc:
        spec_kw["omega_over_delta_grid"] = tuple(_list(doc, "omega_over_delta_grid", lo=0, strict_lo=True))
    elif any(k in doc for k in ("grid_min", "grid_max", "grid_points")):
        lo = _number(doc, "grid_min", lo=0, strict_lo=True) if "grid_min" in doc else 0.02
        hi = _number(doc, "grid_max", hi=2) if "grid_max" in doc else 1.2
        spec_kw["omega_over_delta_grid"] = default_grid(lo, hi, grid_points)
    lo = _number(doc, "bracket_lo") if "bracket_lo" in doc else cfg.bracket[0]
    hi = _number(doc, "bracket_hi") if "bracket_hi" in doc else cfg.bracket[1]
    cfg.bracket = (lo, hi)


def _physical_inputs(doc, cfg, spec_kw, grid_points):
    if "delta_mhz" not in doc:
        raise ConfigError("delta_mhz: required when physical_units = true")
    delta = _number(doc, "delta_mhz", lo=0, strict_lo=True)
    cfg.delta_mhz = delta
    d01 = _canon(_number(doc, "delta01_mhz") / delta) if "delta01_mhz" in doc else 0.0
    d12 = _canon(_number(doc, "delta12_mhz") / delta) if "delta12_mhz" in doc else 0.0
    spec_kw["detunings"] = (d01, d12)
    if "omega_mhz" in doc:
        cfg.omega_over_delta = _canon(_number(doc, "omega_mhz", lo=0, strict_lo=True) / delta)
        if not cfg.omega_over_delta <= 2:
            raise ConfigError("omega_mhz: must be <= 2 * delta_mhz")
    if "sigma_ns" in doc:
        if "a_param" in doc:
            raise ConfigError("sigma_ns and a_param are mutually exclusive")
        sigma_ns = _number(doc, "sigma_ns", lo=0, strict_lo=True)
        spec_kw["a_param"] = _canon(cfg.omega_over_delta * experiments.sigma_dimensionless_from_ns(sigma_ns, delta))
    if "omega_mhz_grid" in doc:
        spec_kw["omega_over_delta_grid"] = tuple(
            _canon(x / delta) for x in _list(doc, "omega_mhz_grid", lo=0, strict_lo=True))
    elif any(k in doc for k in ("omega_mhz_min", "omega_mhz_max", "grid_points")):
        lo = _canon(_number(doc, "omega_mhz_min", lo=0, strict_lo=True) / delta) if "omega_mhz_min" in doc else 0.02
        hi = _canon(_number(doc, "omega_mhz_max", lo=0, strict_lo=True) / delta) if "omega_mhz_max" in doc else 1.2
        spec_kw["omega_over_delta_grid"] = default_grid(lo, hi, grid_points)
    lo = _canon(_number(doc, "bracket_lo_mhz") / delta) if "bracket_lo_mhz" in doc else cfg.bracket[0]
    hi = _canon(_number(doc, "bracket_hi_mhz") / delta) if "bracket_hi_mhz" in doc else cfg.bracket[1]
    cfg.bracket = (lo, hi)
    if "gamma_mhz_list" in doc:
        return tuple(_canon(experiments.gamma_tilde_from_mhz(g, delta)) for g in _list(doc, "gamma_mhz_list", lo=0))
    if "gamma_mhz" in doc:
        return (_canon(experiments.gamma_tilde_from_mhz(_number(doc, "gamma_mhz", lo=0), delta)),)
    return None


def fmt(x):
    """17 significant digits; booleans as 0/1."""
    if isinstance(x, bool):
        return "1" if x else "0"
    return format(float(x), ".17g")


def write_csv(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def sweep_records(rows):
    return [tuple(getattr(r, c) for c in SWEEP_COLUMNS) for r in rows]


def optimum_records(optima):
    return [tuple(getattr(o, c) for c in OPTIMUM_COLUMNS) for o in optima]


def _default_output(cfg):
    return {"simulate": "simulate.csv", "sweep": "sweep.csv", "optimize": "optimum.csv",
            "check": "check.csv"}[cfg.mode]


def _run_simulate(cfg, out):
    g = cfg.gamma_tildes[0]
    d, s = cfg.spec.configs(cfg.omega_over_delta, g, cfg.cross)
    grid = EvolutionGrid.for_configs(d, s, sample_stride=cfg.sample_stride if cfg.emit_trajectory else 0)
    res = evolve(d, s, grid)
    p0, p1, p2 = res.populations
    row = (cfg.omega_over_delta, g, cfg.cross, cfg.spec.a_param, p0, p1, p2, res.max_p1, res.trace_drift)
    write_csv(out, SWEEP_COLUMNS, [row])
    if cfg.emit_trajectory:
        tpath = Path(cfg.trajectory_path) if cfg.trajectory_path else out.with_name(out.stem + "_trajectory.csv")
        write_csv(tpath, TRAJECTORY_COLUMNS, [tuple(r) for r in res.trajectory])
        if cfg.plot:
            plotting.plot_trajectory(res.trajectory, tpath.with_suffix(".png"))
    msg = f"p2 = {fmt(p2)}  (omega/delta = {cfg.omega_over_delta:g}, gamma_tilde = {g:g}, cross = {'on' if cfg.cross else 'off'})"
    if cfg.physical_units:
        msg += f"  omega/2pi = {cfg.omega_over_delta * cfg.delta_mhz:.6g} MHz"
    print(msg)
    return 0


def _run_sweep(cfg, out):
    rows = experiments.sweep_amplitude(cfg.spec, workers=cfg.workers)
    write_csv(out, SWEEP_COLUMNS, sweep_records(rows))
    if cfg.plot:
        plotting.plot_sweep(rows, out.with_suffix(".png"))
    best = max(rows, key=lambda r: r.p2)
    print(f"{len(rows)} rows -> {out}; max p2 = {fmt(best.p2)} at omega/delta = {best.omega_over_delta:.6g} "
          f"(gamma_tilde = {best.gamma_tilde:g}, cross = {'on' if best.cross else 'off'})")
    return 0


def _run_optimize(cfg, out):
    optima = [
        experiments.find_optimal_amplitude(g, cfg.spec, bracket=cfg.bracket, tol=cfg.tol,
                                           n_scan=cfg.n_scan, workers=cfg.workers)
        for g in cfg.gamma_tildes
    ]
    write_csv(out, OPTIMUM_COLUMNS, optimum_records(optima))
    if cfg.plot:
        plotting.plot_optima(optima, out.with_suffix(".png"))
    for o in optima:
        line = (f"gamma_tilde = {o.gamma_tilde:.6g}: omega*/delta = {o.omega_star_over_delta:.6g}, "
                f"p2* = {o.p2_star:.6g}, sigma*delta = {o.sigma_star_times_delta:.6g}")
        if cfg.physical_units:
            sigma_ns = experiments.sigma_ns_from_dimensionless(o.sigma_star_times_delta, cfg.delta_mhz)
            line += (f"; omega*/2pi = {o.omega_star_over_delta * cfg.delta_mhz:.4g} MHz, "
                     f"sigma* = {sigma_ns:.4g} ns")
        if o.boundary_flag:
            line += " [boundary]"
        if o.multimodal_flag:
            line += " [multimodal]"
        print(line)
    return 0


def _run_check(cfg, out):
    results = checks.run_invariant_suite(spec=cfg.spec)
    for r in results:
        print(checks.format_result(r))
    write_csv(out, CHECK_COLUMNS, [])
    with open(out, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for r in results:
            x, g, c = r.config
            w.writerow([r.name, fmt(x), fmt(g), fmt(c), fmt(r.value), fmt(r.tolerance), fmt(r.passed)])
    passed, failed = checks.summarize(results)
    print(f"checks: {passed} passed, {failed} failed")
    return 0 if failed == 0 else 3


RUNNERS = {"simulate": _run_simulate, "sweep": _run_sweep, "optimize": _run_optimize, "check": _run_check}


def run(cfg):
    """Execute ``cfg``; returns the process exit status."""
    out = Path(cfg.output_path or _default_output(cfg))
    return RUNNERS[cfg.mode](cfg, out)


def build_parser():
    parser = argparse.ArgumentParser(prog="stirap", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", type=Path, help="flat TOML config document")
        p.add_argument("--output", help="CSV output path")
        p.add_argument("--cross", choices=("on", "off"))
        p.add_argument("--gamma-tilde", type=float, action="append", dest="gamma_tilde",
                       help="dimensionless decay rate (repeatable)")
        p.add_argument("--a", type=float, dest="a_param", help="adiabaticity Omega*sigma")
        p.add_argument("--emit-trajectory", action="store_true", default=None)
        p.add_argument("--plot", action="store_true", default=None,
                       help="render a PNG figure next to the CSV")
        p.add_argument("--workers", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config else ""
        overrides = {
            "output_path": args.output,
            "cross": args.cross,
            "a_param": args.a_param,
            "emit_trajectory": args.emit_trajectory,
            "plot": args.plot,
            "workers": args.workers,
        }
        if args.gamma_tilde:
            overrides["gamma_tilde"] = list(args.gamma_tilde)
        cfg = parse_config(text, mode=args.mode, overrides=overrides)
    except (ConfigError, OSError) as exc:
        print(f"stirap: config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"stirap: config error: {exc}", file=sys.stderr)
        return 2
    except StirapError as exc:
        print(f"stirap: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"stirap: I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Amplitude sweeps and decoherence-dependent optimum search.

Everything here works in the canonical units of :mod:`stirap.model`
(``delta_anh = 1``).  A point is fixed by the dimensionless drive amplitude
``omega_over_delta``; the pulse width follows from the adiabaticity
parameter as ``sigma = a / Omega`` and the separation as
``t_s = t_s_over_sigma * sigma``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .dynamics import evolve
from .errors import ConfigError, StirapError, SweepError
from .model import DriveConfig, SystemConfig

REFERENCE_GAMMA_TILDES = (1e-4, 10e-4, 20e-4, 30e-4, 50e-4, 100e-4)
DEFAULT_A = 3 * math.pi
NOISE_FLOOR = 1e-6
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def default_grid(lo=0.02, hi=1.2, n=60):
    return tuple(float(x) for x in np.geomspace(lo, hi, n))


@dataclass(frozen=True)
class SweepSpec:
    a_param: float = DEFAULT_A
    omega_over_delta_grid: tuple = field(default_factory=default_grid)
    gamma_tilde_list: tuple = (0.0,) + REFERENCE_GAMMA_TILDES
    cross_variants: tuple = (True, False)
    t_s_over_sigma: float = -1.5
    detunings: tuple = (0.0, 0.0)
    window_mult: float = 5.0
    dt_policy: float = 4.0
    dissipator: str = "cascade"

    def __post_init__(self):
        grid = tuple(float(x) for x in self.omega_over_delta_grid)
        object.__setattr__(self, "omega_over_delta_grid", grid)
        object.__setattr__(self, "gamma_tilde_list", tuple(float(g) for g in self.gamma_tilde_list))
        object.__setattr__(self, "cross_variants", tuple(bool(c) for c in self.cross_variants))
        if not self.a_param > 0:
            raise ConfigError(f"a_param must be > 0, got {self.a_param}")
        if not grid:
            raise ConfigError("omega_over_delta_grid is empty")
        if any(not (0 < x <= 2) for x in grid):
            raise ConfigError("omega_over_delta_grid values must lie in (0, 2]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("omega_over_delta_grid must be strictly increasing")
        if not self.gamma_tilde_list:
            raise ConfigError("gamma_tilde_list is empty")
        if any(g < 0 for g in self.gamma_tilde_list):
            raise ConfigError("gamma_tilde values must be >= 0")
        if not self.cross_variants:
            raise ConfigError("cross_variants is empty")

    def configs(self, omega_over_delta, gamma_tilde, cross):
        """DriveConfig and SystemConfig for one sweep point."""
        if not omega_over_delta > 0:
            raise ConfigError(f"omega_over_delta must be > 0, got {omega_over_delta}")
        omega = float(omega_over_delta)
        sigma = self.a_param / omega
        d01, d12 = self.detunings
        d = DriveConfig(omega, omega, sigma, self.t_s_over_sigma * sigma, d01, d12)
        s = SystemConfig(
            delta_anh=1.0,
            gamma_tilde=gamma_tilde,
            cross_coupling=bool(cross),
            two_photon_resonance=(d01 + d12 == 0),
            window_mult=self.window_mult,
            dt_policy=self.dt_policy,
            dissipator=self.dissipator,
        )
        return d, s


class SweepRow(NamedTuple):
    omega_over_delta: float
    gamma_tilde: float
    cross: bool
    a_param: float
    p0: float
    p1: float
    p2: float
    p1_max: float
    trace_drift: float


class OptimumResult(NamedTuple):
    gamma_tilde: float
    omega_star_over_delta: float
    p2_star: float
    sigma_star_times_delta: float
    boundary_flag: bool
    multimodal_flag: bool


def run_single(omega_over_delta, gamma_tilde, cross, spec=None):
    spec = spec or SweepSpec()
    d, s = spec.configs(omega_over_delta, gamma_tilde, cross)
    res = evolve(d, s)
    p0, p1, p2 = res.populations
    return SweepRow(
        float(omega_over_delta), float(gamma_tilde), bool(cross), spec.a_param,
        p0, p1, p2, res.max_p1, res.trace_drift,
    )


def _run_point(args):
    x, g, c, spec = args
    try:
        return run_single(x, g, c, spec)
    except StirapError as exc:
        raise SweepError(
            f"sweep row omega_over_delta={x}, gamma_tilde={g}, cross={c} failed: {exc}",
            (x, g, c),
        ) from exc


def sweep_amplitude(spec=None, workers=1):
    """All (amplitude, rate, cross) rows of ``spec`` in grid-major order.

    Rows are independent; with ``workers > 1`` they run on a thread pool
    (the compiled integrator releases the GIL) and are returned in the same
    order as a serial run.
    """
    spec = spec or SweepSpec()
    points = [
        (x, g, c, spec)
        for x in spec.omega_over_delta_grid
        for g in spec.gamma_tilde_list
        for c in spec.cross_variants
    ]
    if workers <= 1:
        return [_run_point(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, points))


def golden_section_max(f, lo, hi, tol):
    """Maximize a unimodal ``f`` on [lo, hi] to bracket width ``tol``.

    Returns (x_best, f_best) over every evaluated point.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
    return best[1], best[0]


def _local_maxima(values):
    n = len(values)
    peaks = []
    for k in range(n):
        left = values[k - 1] if k > 0 else -np.inf
        right = values[k + 1] if k < n - 1 else -np.inf
        if values[k] > left + NOISE_FLOOR and values[k] > right + NOISE_FLOOR:
            peaks.append(k)
    return peaks


def find_optimal_amplitude(gamma_tilde, spec=None, bracket=(0.02, 1.0), tol=1e-3, n_scan=25, workers=1):
    """Drive amplitude maximizing the transferred population, cross terms on.

    A log-spaced scan of ``n_scan`` points locates the best grid point;
    golden-section search then refines between its neighbours.  When the
    scan shows more than one local maximum the global one is refined and
    ``multimodal_flag`` is set.  ``boundary_flag`` marks an optimum within
    ``tol`` of a bracket end.
    """
    lo, hi = bracket
    if not (0 < lo < hi <= 2):
        raise ConfigError(f"bracket must satisfy 0 < lo < hi <= 2, got {bracket}")
    if tol < 1e-4:
        raise ConfigError(f"tol must be >= 1e-4, got {tol}")
    if n_scan < 25:
        raise ConfigError(f"n_scan must be >= 25, got {n_scan}")
    spec = spec or SweepSpec()
    scan_spec = replace(spec, omega_over_delta_grid=default_grid(lo, hi, n_scan),
                        gamma_tilde_list=(gamma_tilde,), cross_variants=(True,))
    rows = sweep_amplitude(scan_spec, workers=workers)
    xs = [r.omega_over_delta for r in rows]
    ps = [r.p2 for r in rows]
    k = int(np.argmax(ps))
    multimodal = len(_local_maxima(ps)) > 1

    cache = {}

    def p2_at(x):
        if x not in cache:
            cache[x] = run_single(x, gamma_tilde, True, spec).p2
        return cache[x]

    left = xs[max(k - 1, 0)]
    right = xs[min(k + 1, len(xs) - 1)]
    x_star, p_star = golden_section_max(p2_at, left, right, tol)
    if ps[k] > p_star:
        x_star, p_star = xs[k], ps[k]
    boundary = x_star - lo <= tol or hi - x_star <= tol
    return OptimumResult(
        float(gamma_tilde), float(x_star), float(p_star),
        spec.a_param / x_star, bool(boundary), bool(multimodal),
    )


class PhysicalOptimum(NamedTuple):
    optimum: OptimumResult
    delta_mhz: float
    gamma_mhz: float
    omega_star_mhz: float
    sigma_star_ns: float


def gamma_tilde_from_mhz(gamma_mhz, delta_mhz):
    """Dimensionless rate 2*pi*Gamma / Delta for Gamma in MHz and Delta/(2*pi) in MHz."""
    # the 2*pi factors cancel; dividing directly keeps the ratio exact under unit rescaling
    return gamma_mhz / delta_mhz


def sigma_ns_from_dimensionless(sigma_times_delta, delta_mhz):
    return sigma_times_delta / (2 * math.pi * delta_mhz) * 1e3


def sigma_dimensionless_from_ns(sigma_ns, delta_mhz):
    return sigma_ns * 1e-3 * 2 * math.pi * delta_mhz


def transmon_checkpoint(delta_mhz=300.0, gamma_mhz=0.5, spec=None, bracket=(0.02, 1.0), tol=1e-3, workers=1):
    """Optimum drive for a transmon-like ladder, in MHz and ns."""
    g = gamma_tilde_from_mhz(gamma_mhz, delta_mhz)
    opt = find_optimal_amplitude(g, spec, bracket=bracket, tol=tol, workers=workers)
    return PhysicalOptimum(
        opt, delta_mhz, gamma_mhz,
        opt.omega_star_over_delta * delta_mhz,
        sigma_ns_from_dimensionless(opt.sigma_star_times_delta, delta_mhz),
    )

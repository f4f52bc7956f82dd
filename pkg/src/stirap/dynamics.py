"""Density-matrix time evolution for the driven ladder.

The equation of motion is

    drho/dt = -i [H(t), rho] + D[rho]

with ``H`` from :func:`stirap.model.h_rotating_full` (cross terms switched
by ``SystemConfig.cross_coupling``) and ``D`` either the population
cascade generator (default) or a standard two-jump Lindblad dissipator.

Two independent propagators are provided: fixed-step RK4 on the 3x3
matrix (:func:`evolve`) and piecewise-constant exponentials of the 9x9
Liouvillian (:func:`liouvillian_oracle`).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import ConfigError, EvolutionDiverged, NumericalError
from .model import adiabaticity_parameter, check_pair, drive_frequency_difference

TRACE_TOL = 1e-8
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-7
EIG_STRIDE = 32


def ground_state():
    rho = np.zeros((3, 3), dtype=np.complex128)
    rho[0, 0] = 1.0
    return rho


def basis_state(k):
    rho = np.zeros((3, 3), dtype=np.complex128)
    rho[k, k] = 1.0
    return rho


def populations(rho):
    """Return (p0, p1, p2), the real parts of the diagonal."""
    d = np.real(np.diagonal(np.asarray(rho)))
    return float(d[0]), float(d[1]), float(d[2])


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def validate_density_matrix(rho, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL):
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (3, 3):
        raise ConfigError(f"density matrix must be 3x3, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ConfigError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise ConfigError("density matrix trace differs from 1")
    return rho


def cascade_dissipator(rho, gamma):
    """Population cascade 2 -> 1 -> 0 at rate ``gamma``.

    Only the diagonal is touched; coherences are left alone.
    """
    if gamma < 0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")
    rho = np.asarray(rho)
    r11 = rho[1, 1].real
    r22 = rho[2, 2].real
    return np.diag([gamma * r11, gamma * r22 - gamma * r11, -gamma * r22]).astype(np.complex128)


def lindblad_dissipator(rho, gamma):
    """Standard cascade with jump operators sqrt(gamma)|1><2| and sqrt(gamma)|0><1|."""
    if gamma < 0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")
    rho = np.asarray(rho, dtype=np.complex128)
    out = np.zeros((3, 3), dtype=np.complex128)
    for lower, upper in ((1, 2), (0, 1)):
        jump = np.zeros((3, 3))
        jump[lower, upper] = math.sqrt(gamma)
        jj = jump.T @ jump
        out += jump @ rho @ jump.T - 0.5 * (jj @ rho + rho @ jj)
    return out


def _pack(d, s, reverse_commutator=False):
    p = np.zeros(K.N_PARAMS)
    p[K.P_O01] = d.omega01_peak
    p[K.P_O12] = d.omega12_peak
    p[K.P_SIGMA] = d.sigma
    p[K.P_TS] = d.t_s
    p[K.P_D01] = d.delta01
    p[K.P_D12] = d.delta12
    p[K.P_DRIVE_DIFF] = drive_frequency_difference(d, s)
    p[K.P_CROSS] = 1.0 if s.cross_coupling else 0.0
    p[K.P_GAMMA] = s.gamma
    p[K.P_DISS] = K.DISS_CASCADE if s.dissipator == "cascade" else K.DISS_LINDBLAD
    p[K.P_SIGN] = -1.0 if reverse_commutator else 1.0
    return p


def rhs(t, rho, d, s):
    """Right-hand side ``-i[H(t), rho] + D[rho]`` as a new 3x3 array."""
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    out = np.empty((3, 3), dtype=np.complex128)
    K.rhs(float(t), rho, _pack(d, s), np.empty((3, 3), dtype=np.complex128), out)
    return out


def step_rk4(t, rho, dt, d, s):
    """One classical RK4 step, re-Hermitized.

    Raises
    ------
    NumericalError
        If the step produces NaN or Inf.
    """
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    scratch = [np.empty((3, 3), dtype=np.complex128) for _ in range(7)]
    K.rk4_step(float(t), rho, float(dt), _pack(d, s), *scratch)
    out = scratch[-1]
    K.hermitize(out)
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"non-finite density matrix after step at t={t}", t=t)
    return out


def resolution_bound(d, s):
    """Largest admissible step: sigma/200, and 1/40 of a cross-term period
    when the cross terms are on."""
    bound = d.sigma / 200.0
    if s.cross_coupling:
        bound = min(bound, 2.0 * math.pi / (40.0 * abs(drive_frequency_difference(d, s))))
    return bound


@dataclass(frozen=True)
class EvolutionGrid:
    """Uniform time grid ``t_start + k * dt`` for k = 0..n_steps."""

    t_start: float
    t_end: float
    dt: float
    sample_stride: int = 0

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ConfigError("t_start must be < t_end")
        if not self.dt > 0:
            raise ConfigError("dt must be > 0")
        if self.sample_stride < 0:
            raise ConfigError("sample_stride must be >= 0")

    @property
    def n_steps(self):
        return int(round((self.t_end - self.t_start) / self.dt))

    @classmethod
    def for_configs(cls, d, s, sample_stride=0):
        """Standard window ``[t_s - w*sigma, w*sigma]`` with the step taken
        ``s.dt_policy`` times finer than :func:`resolution_bound`."""
        t_start = d.t_s - s.window_mult * d.sigma
        t_end = s.window_mult * d.sigma
        target = resolution_bound(d, s) / s.dt_policy
        n = max(1, int(math.ceil((t_end - t_start) / target)))
        return cls(t_start, t_end, (t_end - t_start) / n, sample_stride)

    def check_resolution(self, d, s):
        bound = resolution_bound(d, s)
        if self.dt > bound * (1 + 1e-12):
            raise ConfigError(f"dt={self.dt:.4g} exceeds the resolution bound {bound:.4g}")


@dataclass
class StirapResult:
    rho_final: np.ndarray
    populations: tuple
    trace_drift: float
    max_p1: float
    a_param: float
    hermiticity_defect: float = 0.0
    min_eigenvalue: float = float("nan")
    trajectory: Optional[np.ndarray] = None

    @property
    def p2(self):
        return self.populations[2]


def _a_param(d):
    a = adiabaticity_parameter(d)
    return a.symmetric if a.symmetric is not None else a.rms


def evolve(d, s, grid=None, rho0=None, reverse_commutator=False):
    """Integrate the master equation with fixed-step RK4.

    Parameters
    ----------
    d, s : DriveConfig, SystemConfig
    grid : EvolutionGrid, optional
        Defaults to :meth:`EvolutionGrid.for_configs`.  When
        ``grid.sample_stride > 0`` the result carries a trajectory with
        columns ``(t, p0, p1, p2, Re rho02, Im rho02)``.
    rho0 : array_like, optional
        Initial state, ``|0><0|`` by default.
    reverse_commutator : bool
        Use ``-i[rho, H]`` instead of ``-i[H, rho]``.

    Raises
    ------
    NumericalError
        Non-finite values; the message carries the time.
    EvolutionDiverged
        Trace drift above 1e-8 or a Hermiticity defect above 1e-10.

    Notes
    -----
    Positivity is reported (``min_eigenvalue``) but not enforced: the
    default population-cascade dissipator does not damp coherences and can
    push small eigenvalues negative.
    """
    check_pair(d, s)
    if grid is None:
        grid = EvolutionGrid.for_configs(d, s)
    grid.check_resolution(d, s)
    rho0 = ground_state() if rho0 is None else validate_density_matrix(rho0)
    n = grid.n_steps
    stride = grid.sample_stride
    rows = (n // stride + 1 + (1 if n % stride else 0)) if stride > 0 else 1
    traj = np.zeros((rows, 6))
    rho, drift, defect, min_eig, max_p1, bad_t = K.integrate_rk4(
        _pack(d, s, reverse_commutator), grid.t_start, grid.dt, n,
        np.ascontiguousarray(rho0), stride, traj, EIG_STRIDE,
    )
    if not math.isnan(bad_t):
        raise NumericalError(f"non-finite density matrix at t={bad_t:.6g}", t=bad_t)
    if drift > TRACE_TOL:
        raise EvolutionDiverged(f"trace drift {drift:.3e} exceeds {TRACE_TOL}")
    if defect > HERMITIAN_TOL:
        raise EvolutionDiverged(f"Hermiticity defect {defect:.3e} exceeds {HERMITIAN_TOL}")
    return StirapResult(
        rho_final=rho,
        populations=populations(rho),
        trace_drift=abs(np.trace(rho).real - 1.0),
        max_p1=float(max_p1),
        a_param=_a_param(d),
        hermiticity_defect=float(defect),
        min_eigenvalue=float(min_eig),
        trajectory=traj if stride > 0 else None,
    )


def liouvillian_matrix(t, d, s):
    """The 9x9 generator at time ``t`` acting on row-major ``vec(rho)``."""
    out = np.empty((9, 9), dtype=np.complex128)
    K.liouvillian(float(t), _pack(d, s), np.empty((3, 3), dtype=np.complex128), out)
    return out


def liouvillian_oracle(d, s, grid=None, rho0=None, refine=16, reverse_commutator=False):
    """Propagate with midpoint exponentials of the 9x9 Liouvillian.

    The scheme is second order in the step; ``refine`` subdivides each
    step of ``grid``.
    """
    check_pair(d, s)
    if grid is None:
        grid = EvolutionGrid.for_configs(d, s)
    rho0 = ground_state() if rho0 is None else validate_density_matrix(rho0)
    n = grid.n_steps * int(refine)
    dt = (grid.t_end - grid.t_start) / n
    vec = K.integrate_expm(
        _pack(d, s, reverse_commutator), grid.t_start, dt, n,
        np.ascontiguousarray(rho0.reshape(9)),
    )
    rho = vec.reshape(3, 3)
    if not np.all(np.isfinite(rho)):
        raise NumericalError("non-finite density matrix in Liouvillian propagation")
    rho = 0.5 * (rho + rho.conj().T)
    return StirapResult(
        rho_final=rho,
        populations=populations(rho),
        trace_drift=abs(np.trace(rho).real - 1.0),
        max_p1=float("nan"),
        a_param=_a_param(d),
        min_eigenvalue=float(np.linalg.eigvalsh(rho)[0]),
    )

# Compiled inner loops for the density-matrix integrators.
#
# Physics parameters travel as one float64 vector; the slot layout is the
# P_* constants below and is filled by dynamics._pack.

import math

import numpy as np
from numba import njit

from .smallmat import expm_taylor

P_O01 = 0
P_O12 = 1
P_SIGMA = 2
P_TS = 3
P_D01 = 4
P_D12 = 5
P_DRIVE_DIFF = 6
P_CROSS = 7
P_GAMMA = 8
P_DISS = 9
P_SIGN = 10
N_PARAMS = 11

DISS_CASCADE = 0.0
DISS_LINDBLAD = 1.0


@njit(cache=True, nogil=True)
def hamiltonian(t, p, h):
    sig2 = 2.0 * p[P_SIGMA] * p[P_SIGMA]
    e01 = p[P_O01] * math.exp(-t * t / sig2)
    dt_s = t - p[P_TS]
    e12 = p[P_O12] * math.exp(-dt_s * dt_s / sig2)
    if p[P_CROSS] != 0.0:
        w = p[P_DRIVE_DIFF] * t
        ph = complex(math.cos(w), math.sin(w))
        c10 = 0.5 * (e01 + e12 * ph)
        c21 = 0.5 * (e12 + e01 * ph.conjugate())
    else:
        c10 = complex(0.5 * e01, 0.0)
        c21 = complex(0.5 * e12, 0.0)
    for i in range(3):
        for j in range(3):
            h[i, j] = 0.0
    h[1, 1] = p[P_D01]
    h[2, 2] = p[P_D01] + p[P_D12]
    h[1, 0] = c10
    h[0, 1] = c10.conjugate()
    h[2, 1] = c21
    h[1, 2] = c21.conjugate()


@njit(cache=True, nogil=True)
def rhs(t, rho, p, h, out):
    """out = -i*sign*[H, rho] + dissipator(rho)."""
    hamiltonian(t, p, h)
    sign = p[P_SIGN]
    for i in range(3):
        for j in range(3):
            acc = 0j
            for k in range(3):
                acc += h[i, k] * rho[k, j] - rho[i, k] * h[k, j]
            out[i, j] = complex(acc.imag, -acc.real) * sign
    g = p[P_GAMMA]
    if g == 0.0:
        return
    r11 = rho[1, 1].real
    r22 = rho[2, 2].real
    if p[P_DISS] == DISS_CASCADE:
        out[2, 2] += -g * r22
        out[1, 1] += -g * r11 + g * r22
        out[0, 0] += g * r11
    else:
        # jump |1><2|: feed 1, drain row/col 2; jump |0><1|: feed 0, drain row/col 1
        out[1, 1] += g * r22
        out[0, 0] += g * r11
        for k in range(3):
            out[2, k] -= 0.5 * g * rho[2, k]
            out[k, 2] -= 0.5 * g * rho[k, 2]
            out[1, k] -= 0.5 * g * rho[1, k]
            out[k, 1] -= 0.5 * g * rho[k, 1]


@njit(cache=True, nogil=True)
def rk4_step(t, rho, dt, p, h, k1, k2, k3, k4, tmp, out):
    rhs(t, rho, p, h, k1)
    half = 0.5 * dt
    for i in range(3):
        for j in range(3):
            tmp[i, j] = rho[i, j] + half * k1[i, j]
    rhs(t + half, tmp, p, h, k2)
    for i in range(3):
        for j in range(3):
            tmp[i, j] = rho[i, j] + half * k2[i, j]
    rhs(t + half, tmp, p, h, k3)
    for i in range(3):
        for j in range(3):
            tmp[i, j] = rho[i, j] + dt * k3[i, j]
    rhs(t + dt, tmp, p, h, k4)
    sixth = dt / 6.0
    for i in range(3):
        for j in range(3):
            out[i, j] = rho[i, j] + sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])


@njit(cache=True, nogil=True)
def hermitize(rho):
    """Symmetrize in place; returns the pre-symmetrization defect."""
    defect = 0.0
    for i in range(3):
        for j in range(i, 3):
            a = rho[i, j]
            b = rho[j, i].conjugate()
            d = abs(a - b)
            if d > defect:
                defect = d
            m = 0.5 * (a + b)
            rho[i, j] = m
            rho[j, i] = m.conjugate()
    return defect


@njit(cache=True, nogil=True)
def _record(traj, row, t, rho):
    traj[row, 0] = t
    traj[row, 1] = rho[0, 0].real
    traj[row, 2] = rho[1, 1].real
    traj[row, 3] = rho[2, 2].real
    traj[row, 4] = rho[0, 2].real
    traj[row, 5] = rho[0, 2].imag


@njit(cache=True, nogil=True)
def integrate_rk4(p, t0, dt, n, rho0, stride, traj, eig_stride):
    """Fixed-step RK4 from t0 over n steps.

    Returns (rho, max_trace_drift, max_defect, min_eig, max_p1, bad_t);
    ``bad_t`` is NaN unless non-finite values appeared.  ``traj`` receives
    a row every ``stride`` steps plus the final state when stride > 0.
    """
    rho = rho0.copy()
    nxt = np.empty_like(rho)
    h = np.empty((3, 3), dtype=np.complex128)
    k1 = np.empty_like(rho)
    k2 = np.empty_like(rho)
    k3 = np.empty_like(rho)
    k4 = np.empty_like(rho)
    tmp = np.empty_like(rho)
    drift = abs((rho[0, 0] + rho[1, 1] + rho[2, 2]).real - 1.0)
    defect = 0.0
    min_eig = np.linalg.eigvalsh(rho)[0]
    max_p1 = rho[1, 1].real
    row = 0
    if stride > 0:
        _record(traj, row, t0, rho)
        row += 1
    for i in range(n):
        t = t0 + i * dt
        rk4_step(t, rho, dt, p, h, k1, k2, k3, k4, tmp, nxt)
        d = hermitize(nxt)
        if d > defect:
            defect = d
        rho, nxt = nxt, rho
        tr = (rho[0, 0] + rho[1, 1] + rho[2, 2]).real
        if not math.isfinite(tr) or not math.isfinite(abs(rho[0, 2]) + abs(rho[1, 2]) + abs(rho[0, 1])):
            return rho, drift, defect, min_eig, max_p1, t + dt
        if abs(tr - 1.0) > drift:
            drift = abs(tr - 1.0)
        if rho[1, 1].real > max_p1:
            max_p1 = rho[1, 1].real
        last = i == n - 1
        if last or (i + 1) % eig_stride == 0:
            e = np.linalg.eigvalsh(rho)[0]
            if e < min_eig:
                min_eig = e
        if stride > 0 and ((i + 1) % stride == 0 or last):
            _record(traj, row, t0 + (i + 1) * dt, rho)
            row += 1
    return rho, drift, defect, min_eig, max_p1, np.nan


@njit(cache=True, nogil=True)
def liouvillian(t, p, h, out):
    """9x9 generator acting on row-major vec(rho), index 3*i + j."""
    hamiltonian(t, p, h)
    sign = p[P_SIGN]
    for a in range(9):
        for b in range(9):
            out[a, b] = 0.0
    # -i[H, rho]_ij = -i sum_k (H_ik rho_kj - rho_ik H_kj)
    for i in range(3):
        for j in range(3):
            row = 3 * i + j
            for k in range(3):
                out[row, 3 * k + j] += -1j * sign * h[i, k]
                out[row, 3 * i + k] += 1j * sign * h[k, j]
    g = p[P_GAMMA]
    if g == 0.0:
        return
    if p[P_DISS] == DISS_CASCADE:
        out[8, 8] -= g
        out[4, 4] -= g
        out[4, 8] += g
        out[0, 4] += g
    else:
        out[4, 8] += g
        out[0, 4] += g
        for level in (1, 2):
            for k in range(3):
                out[3 * level + k, 3 * level + k] -= 0.5 * g
                out[3 * k + level, 3 * k + level] -= 0.5 * g


@njit(cache=True, nogil=True)
def integrate_expm(p, t0, dt, n, vec0):
    """Piecewise-constant propagation v <- exp(L(t_mid) dt) v."""
    v = vec0.copy()
    h = np.empty((3, 3), dtype=np.complex128)
    gen = np.empty((9, 9), dtype=np.complex128)
    for i in range(n):
        liouvillian(t0 + (i + 0.5) * dt, p, h, gen)
        v = expm_taylor(gen * dt) @ v
    return v

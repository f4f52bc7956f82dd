"""Driven three-level ladder: pulses, Hamiltonians and adiabatic analytics.

Units: hbar = 1, so every Hamiltonian is an angular-frequency matrix.  All
frequencies are angular; the canonical internal scale is ``delta_anh = 1``
with time measured in ``1 / delta_anh``.

Three Hamiltonian views are provided:

* :func:`h_rwa` -- doubly rotating frame, each tone on its own transition.
* :func:`h_parasitic` -- only the swapped (parasitic) couplings, in the
  frame moving with the parasitic drives.
* :func:`h_rotating_full` -- the full ladder with both tones on both
  transitions, written in the drive frame.  The counter-rotating cross
  terms oscillate at the drive-frequency difference and are kept exactly.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError, UndefinedAngle


@dataclass(frozen=True)
class DriveConfig:
    """Gaussian pulse pair.

    The 0-1 pulse is centred at t = 0 and the 1-2 pulse at ``t_s``; a
    negative ``t_s`` gives the counterintuitive ordering.
    """

    omega01_peak: float
    omega12_peak: float
    sigma: float
    t_s: float = 0.0
    delta01: float = 0.0
    delta12: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if self.omega01_peak < 0 or self.omega12_peak < 0:
            raise ConfigError("pulse peaks must be >= 0")
        for name in ("omega01_peak", "omega12_peak", "sigma", "t_s", "delta01", "delta12"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")


@dataclass(frozen=True)
class SystemConfig:
    """Ladder and integration settings.

    ``gamma_tilde`` is the decay rate in units of ``delta_anh``; the rate
    that enters the dissipator is ``gamma_tilde * delta_anh``.
    ``dt_policy`` is the factor by which the integration step is taken
    finer than the resolution bound (see ``dynamics.EvolutionGrid``).
    ``dissipator`` selects ``"cascade"`` (population cascade only) or
    ``"lindblad"`` (jump operators |1><2| and |0><1|).
    """

    delta_anh: float = 1.0
    gamma_tilde: float = 0.0
    cross_coupling: bool = True
    two_photon_resonance: bool = True
    window_mult: float = 5.0
    dt_policy: float = 4.0
    dissipator: str = "cascade"

    def __post_init__(self):
        if not self.delta_anh > 0:
            raise ConfigError(f"delta_anh must be > 0, got {self.delta_anh}")
        if not self.gamma_tilde >= 0:
            raise ConfigError(f"gamma_tilde must be >= 0, got {self.gamma_tilde}")
        if not self.window_mult >= 3:
            raise ConfigError(f"window_mult must be >= 3, got {self.window_mult}")
        if not self.dt_policy >= 1:
            raise ConfigError(f"dt_policy must be >= 1, got {self.dt_policy}")
        if self.dissipator not in ("cascade", "lindblad"):
            raise ConfigError(f"unknown dissipator {self.dissipator!r}")

    @property
    def gamma(self):
        return self.gamma_tilde * self.delta_anh


def check_pair(d, s):
    """Cross-validate a drive and a system configuration."""
    if s.two_photon_resonance and d.delta01 + d.delta12 != 0:
        raise ConfigError(
            "two-photon resonance requires delta01 + delta12 == 0, "
            f"got {d.delta01} + {d.delta12}"
        )


def drive_frequency_difference(d, s):
    """Angular frequency of the cross terms, Delta + delta01 - delta12."""
    return s.delta_anh + d.delta01 - d.delta12


def gaussian_envelope(t, peak, center, sigma):
    if not sigma > 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    return peak * np.exp(-((t - center) ** 2) / (2.0 * sigma**2))


def pulse_pair(t, d):
    """Envelope values (Omega01(t), Omega12(t))."""
    return (
        gaussian_envelope(t, d.omega01_peak, 0.0, d.sigma),
        gaussian_envelope(t, d.omega12_peak, d.t_s, d.sigma),
    )


def mixing_angles(omega01_t, omega12_t, delta01=0.0):
    """Mixing angles (theta, phi).

    ``tan(theta) = Omega01 / Omega12`` with theta in [0, pi/2].  phi uses
    the principal branch of the closed form, so it stays in [0, pi/2] for
    either sign of ``delta01``.
    """
    if omega01_t == 0 and omega12_t == 0:
        raise UndefinedAngle("both envelopes vanish; mixing angle undefined")
    theta = math.atan2(omega01_t, omega12_t)
    rms = math.hypot(omega01_t, omega12_t)
    phi = math.atan2(rms, math.hypot(rms, delta01) + delta01)
    return theta, phi


class AdiabaticEigensystem(NamedTuple):
    theta: float
    phi: float
    dark: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    omega_plus: float
    omega_minus: float
    omega_dark: float

    @property
    def bright(self):
        return np.array([math.sin(self.theta), 0.0, math.cos(self.theta)], dtype=complex)


def adiabatic_eigensystem(omega01_t, omega12_t, delta01=0.0):
    """Closed-form instantaneous eigensystem of :func:`h_rwa` at two-photon
    resonance."""
    theta, phi = mixing_angles(omega01_t, omega12_t, delta01)
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    bright = np.array([st, 0.0, ct], dtype=complex)
    one = np.array([0.0, 1.0, 0.0], dtype=complex)
    root = math.sqrt(delta01**2 + omega01_t**2 + omega12_t**2)
    return AdiabaticEigensystem(
        theta=theta,
        phi=phi,
        dark=np.array([ct, 0.0, -st], dtype=complex),
        plus=sp * bright + cp * one,
        minus=cp * bright - sp * one,
        omega_plus=0.5 * (delta01 + root),
        omega_minus=0.5 * (delta01 - root),
        omega_dark=0.0,
    )


def _ladder(diag, c10, c21):
    h = np.zeros((3, 3), dtype=complex)
    h[0, 0], h[1, 1], h[2, 2] = diag
    h[1, 0] = c10
    h[0, 1] = np.conj(c10)
    h[2, 1] = c21
    h[1, 2] = np.conj(c21)
    return h


def h_rwa(t, d):
    o01, o12 = pulse_pair(t, d)
    return _ladder((0.0, d.delta01, d.delta01 + d.delta12), 0.5 * o01, 0.5 * o12)


def h_parasitic(t, d, s):
    """Parasitic-only Hamiltonian: the drives swap roles and |1> sits at
    ``-Delta + delta12``."""
    o01, o12 = pulse_pair(t, d)
    return _ladder(
        (0.0, -s.delta_anh + d.delta12, d.delta01 + d.delta12), 0.5 * o12, 0.5 * o01
    )


def h_rotating_full(t, d, s):
    """Full ladder Hamiltonian in the frame co-rotating with both drives.

    With ``s.cross_coupling`` off this is identical to :func:`h_rwa`.
    """
    o01, o12 = pulse_pair(t, d)
    diag = (0.0, d.delta01, d.delta01 + d.delta12)
    if not s.cross_coupling:
        return _ladder(diag, 0.5 * o01, 0.5 * o12)
    phase = np.exp(1j * drive_frequency_difference(d, s) * t)
    return _ladder(diag, 0.5 * (o01 + o12 * phase), 0.5 * (o12 + o01 * np.conj(phase)))


class Adiabaticity(NamedTuple):
    rms: float
    symmetric: Optional[float]


def adiabaticity_parameter(d):
    """Adiabaticity ``sqrt(Omega01^2 + Omega12^2) * sigma``.

    ``symmetric`` is the equal-amplitude convention ``Omega * sigma``,
    reported only when both peaks are equal (``None`` otherwise).
    """
    rms = math.hypot(d.omega01_peak, d.omega12_peak) * d.sigma
    sym = d.omega01_peak * d.sigma if d.omega01_peak == d.omega12_peak else None
    return Adiabaticity(rms, sym)


def theta_limit(t, d, s):
    """Mixing angle with the window-edge convention.

    Where both envelopes have fallen below ``peak * exp(-window_mult^2/2)``
    the limiting value is returned: 0 before the pulses, pi/2 after.
    """
    floor = math.exp(-(s.window_mult**2) / 2.0)
    o01, o12 = pulse_pair(t, d)
    if o01 <= d.omega01_peak * floor and o12 <= d.omega12_peak * floor:
        mid = 0.5 * d.t_s
        return 0.0 if t < mid else 0.5 * math.pi
    return mixing_angles(o01, o12, d.delta01)[0]

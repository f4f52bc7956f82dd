"""Invariant suite over a fixed reference set of configurations.

Used by ``stirap check`` and by the acceptance tests.
"""

from typing import NamedTuple

import numpy as np

from .dynamics import evolve, liouvillian_oracle, purity
from .experiments import SweepSpec
from .model import adiabatic_eigensystem, h_rwa, pulse_pair

TRANSMON_GAMMA_TILDE = 0.5 / 300.0

# (omega_over_delta, gamma_tilde, cross)
REFERENCE_SET = (
    (0.15, 0.0, True),
    (0.25, 0.0, False),
    (0.6, 0.0, True),
    (1.0, 0.0, True),
    (0.3, TRANSMON_GAMMA_TILDE, False),
    (0.367, TRANSMON_GAMMA_TILDE, True),
    (0.8, TRANSMON_GAMMA_TILDE, True),
    (0.5, 1e-2, False),
    (0.45, 1e-2, True),
    (1.0, 1e-2, True),
)

TOLERANCES = {
    "trace_drift": 1e-8,
    "hermiticity": 1e-10,
    "min_eigenvalue": -1e-7,
    "dark_state_nullity": 1e-10,
    "closed_purity": 1e-7,
    "oracle_agreement": 1e-6,
}


class CheckResult(NamedTuple):
    name: str
    config: tuple
    value: float
    tolerance: float
    passed: bool


def dark_state_nullity(d, n_points=400):
    """max_t ||H_rwa(t)|D(t)>|| / ||H_rwa(t)||_F over the pulse window."""
    worst = 0.0
    for t in np.linspace(d.t_s - 4 * d.sigma, 4 * d.sigma, n_points):
        o01, o12 = pulse_pair(t, d)
        h = h_rwa(t, d)
        dark = adiabatic_eigensystem(o01, o12, d.delta01).dark
        worst = max(worst, np.linalg.norm(h @ dark) / np.linalg.norm(h))
    return float(worst)


def check_config(omega_over_delta, gamma_tilde, cross, spec=None):
    spec = spec or SweepSpec()
    d, s = spec.configs(omega_over_delta, gamma_tilde, cross)
    cfg = (omega_over_delta, gamma_tilde, cross)
    res = evolve(d, s)
    ref = liouvillian_oracle(d, s)
    agreement = max(abs(a - b) for a, b in zip(res.populations, ref.populations))
    out = [
        CheckResult("trace_drift", cfg, res.trace_drift, TOLERANCES["trace_drift"],
                    res.trace_drift <= TOLERANCES["trace_drift"]),
        CheckResult("hermiticity", cfg, res.hermiticity_defect, TOLERANCES["hermiticity"],
                    res.hermiticity_defect <= TOLERANCES["hermiticity"]),
        CheckResult("min_eigenvalue", cfg, res.min_eigenvalue, TOLERANCES["min_eigenvalue"],
                    res.min_eigenvalue >= TOLERANCES["min_eigenvalue"]),
        CheckResult("oracle_agreement", cfg, agreement, TOLERANCES["oracle_agreement"],
                    agreement <= TOLERANCES["oracle_agreement"]),
    ]
    nullity = dark_state_nullity(d)
    out.append(CheckResult("dark_state_nullity", cfg, nullity, TOLERANCES["dark_state_nullity"],
                           nullity <= TOLERANCES["dark_state_nullity"]))
    if gamma_tilde == 0:
        dev = abs(purity(res.rho_final) - 1.0)
        out.append(CheckResult("closed_purity", cfg, dev, TOLERANCES["closed_purity"],
                               dev <= TOLERANCES["closed_purity"]))
    return out


def run_invariant_suite(reference_set=REFERENCE_SET, spec=None):
    results = []
    for cfg in reference_set:
        results.extend(check_config(*cfg, spec=spec))
    return results


def summarize(results):
    passed = sum(r.passed for r in results)
    return passed, len(results) - passed


def format_result(r):
    x, g, c = r.config
    status = "PASS" if r.passed else "FAIL"
    return (f"{status} {r.name:<20s} omega/delta={x:<6g} gamma_tilde={g:<9.4g} "
            f"cross={'on' if c else 'off':<3s} value={r.value:.3e} tol={r.tolerance:.1e}")

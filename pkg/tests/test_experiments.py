import math
from dataclasses import replace

import numpy as np
import pytest

from stirap import experiments as ex
from stirap.errors import ConfigError, SweepError
from stirap.experiments import SweepSpec

from conftest import P2_IDEAL

TRANSMON = 0.5 / 300


class TestSweepSpec:
    def test_defaults(self):
        s = SweepSpec()
        assert s.a_param == pytest.approx(3 * math.pi)
        assert len(s.omega_over_delta_grid) == 60
        assert s.omega_over_delta_grid[0] == pytest.approx(0.02)
        assert s.omega_over_delta_grid[-1] == pytest.approx(1.2)
        assert s.gamma_tilde_list == (0.0, 1e-4, 1e-3, 2e-3, 3e-3, 5e-3, 1e-2)
        assert s.cross_variants == (True, False)

    @pytest.mark.parametrize("kw", [
        {"omega_over_delta_grid": ()},
        {"omega_over_delta_grid": (0.0, 0.5)},
        {"omega_over_delta_grid": (0.5, 2.5)},
        {"omega_over_delta_grid": (0.5, 0.4)},
        {"a_param": -1.0},
        {"gamma_tilde_list": (-1e-3,)},
        {"cross_variants": ()},
    ])
    def test_validation(self, kw):
        with pytest.raises(ConfigError):
            SweepSpec(**kw)

    def test_configs(self):
        d, s = SweepSpec().configs(0.5, 1e-3, False)
        assert d.omega01_peak == d.omega12_peak == 0.5
        assert d.sigma == pytest.approx(3 * math.pi / 0.5)
        assert d.t_s == pytest.approx(-1.5 * d.sigma)
        assert s.delta_anh == 1.0 and s.gamma == 1e-3 and not s.cross_coupling


class TestRunSingle:
    def test_ideal(self):
        assert ex.run_single(0.05, 0.0, False).p2 == pytest.approx(P2_IDEAL, abs=1e-9)

    def test_cross_degrades_near_delta(self):
        on = ex.run_single(1.0, 0.0, True).p2
        off = ex.run_single(1.0, 0.0, False).p2
        assert on < off - 0.05

    def test_cross_negligible_far_below_delta(self):
        on = ex.run_single(0.05, 0.0, True).p2
        off = ex.run_single(0.05, 0.0, False).p2
        assert abs(on - off) <= 0.01

    def test_row_fields(self):
        row = ex.run_single(0.3, 1e-3, True)
        assert row.a_param == pytest.approx(3 * math.pi)
        assert row.p0 + row.p1 + row.p2 == pytest.approx(1, abs=1e-8)
        assert -1e-7 <= row.p2 <= 1 + 1e-7
        assert row.p1_max >= row.p1


class TestSweep:
    small = SweepSpec(omega_over_delta_grid=(0.2, 0.5, 0.9), gamma_tilde_list=(0.0, 1e-2))

    def test_single_point(self):
        spec = replace(self.small, omega_over_delta_grid=(0.4,), gamma_tilde_list=(1e-3,), cross_variants=(True,))
        assert ex.sweep_amplitude(spec) == [ex.run_single(0.4, 1e-3, True, spec)]

    def test_order_is_grid_major(self):
        rows = ex.sweep_amplitude(self.small)
        keys = [(r.omega_over_delta, r.gamma_tilde, r.cross) for r in rows]
        assert keys == [(x, g, c) for x in (0.2, 0.5, 0.9) for g in (0.0, 1e-2) for c in (True, False)]

    def test_rows_independent(self):
        # a reordered grid is not a valid spec, so independence is checked by splitting the grid
        full = set(ex.sweep_amplitude(self.small))
        parts = set()
        for x in reversed(self.small.omega_over_delta_grid):
            parts |= set(ex.sweep_amplitude(replace(self.small, omega_over_delta_grid=(x,))))
        assert parts == full

    def test_parallel_matches_serial(self):
        assert ex.sweep_amplitude(self.small, workers=4) == ex.sweep_amplitude(self.small)

    def test_failure_reports_coordinates(self, monkeypatch):
        from stirap.errors import EvolutionDiverged

        def boom(d, s, *a, **k):
            raise EvolutionDiverged("forced")

        monkeypatch.setattr(ex, "evolve", boom)
        with pytest.raises(SweepError) as info:
            ex.sweep_amplitude(self.small)
        assert info.value.coordinates == (0.2, 0.0, True)

    def test_p2_non_increasing_in_gamma(self):
        spec = replace(SweepSpec(), omega_over_delta_grid=(0.1, 0.367, 0.7, 1.0),
                       gamma_tilde_list=ex.REFERENCE_GAMMA_TILDES, cross_variants=(True,))
        rows = ex.sweep_amplitude(spec)
        for x in spec.omega_over_delta_grid:
            p2 = [r.p2 for r in rows if r.omega_over_delta == x]
            assert all(b <= a for a, b in zip(p2, p2[1:]))

    def test_interior_maximum_for_each_rate(self):
        spec = SweepSpec(omega_over_delta_grid=ex.default_grid(0.02, 1.0, 25),
                         gamma_tilde_list=ex.REFERENCE_GAMMA_TILDES, cross_variants=(True,))
        rows = ex.sweep_amplitude(spec)
        for g in ex.REFERENCE_GAMMA_TILDES:
            p2 = [r.p2 for r in rows if r.gamma_tilde == g]
            k = int(np.argmax(p2))
            assert 0 < k < len(p2) - 1


class TestOptimizer:
    def test_golden_section_parabola(self):
        x, fx = ex.golden_section_max(lambda x: -(x - 0.37) ** 2, 0.0, 1.0, 1e-6)
        assert x == pytest.approx(0.37, abs=1e-6)
        assert fx == pytest.approx(0.0, abs=1e-11)

    def test_local_maxima(self):
        assert ex._local_maxima([0.0, 1.0, 0.0, 2.0, 0.0]) == [1, 3]
        assert ex._local_maxima([0.0, 1.0, 1.0 + 1e-9, 0.5]) == []
        assert ex._local_maxima([3.0, 2.0, 1.0]) == [0]

    @pytest.mark.parametrize("kw", [
        {"bracket": (0.0, 1.0)}, {"bracket": (0.5, 0.2)}, {"bracket": (0.1, 2.5)},
        {"tol": 1e-5}, {"n_scan": 10},
    ])
    def test_argument_validation(self, kw):
        with pytest.raises(ConfigError):
            ex.find_optimal_amplitude(1e-3, **kw)

    def test_large_rate_optimum_is_interior(self):
        opt = ex.find_optimal_amplitude(1e-2)
        assert not opt.boundary_flag
        assert 0.02 < opt.omega_star_over_delta < 1.0
        assert opt.sigma_star_times_delta == pytest.approx(3 * math.pi / opt.omega_star_over_delta)
        # the refined point is at least as good as its scan neighbours
        for dx in (-0.01, 0.01):
            assert ex.run_single(opt.omega_star_over_delta + dx, 1e-2, True).p2 <= opt.p2_star + 1e-9

    def test_no_decoherence_optimum_at_lower_boundary(self):
        opt = ex.find_optimal_amplitude(0.0)
        assert opt.boundary_flag
        assert opt.omega_star_over_delta == pytest.approx(0.02, abs=1e-3)


class TestUnits:
    def test_gamma_conversion(self):
        assert ex.gamma_tilde_from_mhz(0.5, 300.0) == pytest.approx(1.667e-3, rel=1e-3)

    def test_sigma_round_trip(self, rng):
        for _ in range(20):
            s, delta = rng.uniform(1, 100), rng.uniform(50, 500)
            back = ex.sigma_dimensionless_from_ns(ex.sigma_ns_from_dimensionless(s, delta), delta)
            assert back == pytest.approx(s, rel=1e-15)

    def test_checkpoint_conversion_consistent(self, monkeypatch):
        fake = ex.OptimumResult(TRANSMON, 0.367, 0.9, 3 * math.pi / 0.367, False, False)
        monkeypatch.setattr(ex, "find_optimal_amplitude", lambda *a, **k: fake)
        out = ex.transmon_checkpoint()
        assert out.omega_star_mhz == pytest.approx(0.367 * 300, rel=1e-15)
        assert out.sigma_star_ns == pytest.approx(3 * math.pi / 0.367 / (2 * math.pi * 300) * 1e3, rel=1e-15)
        assert out.omega_star_mhz / 300 == pytest.approx(out.optimum.omega_star_over_delta, rel=1e-15)

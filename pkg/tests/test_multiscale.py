import math

import numpy as np
import pytest
from scipy.integrate import quad

import tangentia as tg

LOG2 = math.log(2.0)


class TestDiniSum:
    def test_all_zero(self):
        pairs = [(2.0 ** -k, 0.0) for k in range(1, 7)]
        assert tg.dini_sum(pairs, "plain") == 0.0
        assert tg.dini_sum(pairs, "log") == 0.0

    def test_constant_plain(self):
        # Analytic: integral of c dr/r over [2^-K, 1] = c K log 2.
        K, c = 6, 0.37
        pairs = [(2.0 ** -k, c) for k in range(1, K + 1)]
        assert tg.dini_sum(pairs, "plain") == pytest.approx(c * K * LOG2)

    def test_constant_log_weighted(self):
        # Closed form c (log 2)^2 K(K+1)/2 for radii 2^-1 .. 2^-K; quadrature
        # oracle over the matching dyadic bands [2^-(k+1/2), 2^-(k-1/2)].
        K, c = 5, 0.81
        pairs = [(2.0 ** -k, c) for k in range(1, K + 1)]
        got = tg.dini_sum(pairs, "log")
        assert got == pytest.approx(c * LOG2 ** 2 * K * (K + 1) / 2.0)
        oracle, _ = quad(lambda r: c * math.log(1.0 / r) / r, 2.0 ** -(K + 0.5), 2.0 ** -0.5)
        assert got == pytest.approx(oracle, rel=1e-9)

    def test_rejects_non_dyadic(self):
        with pytest.raises(ValueError):
            tg.dini_sum([(1.0, 0.1), (0.4, 0.1)], "plain")

    def test_linear_and_monotone(self):
        radii = [2.0 ** -k for k in range(1, 5)]
        a = [(r, 0.1) for r in radii]
        b = [(r, 0.3) for r in radii]
        ab = [(r, 0.4) for r in radii]
        for weight in ("plain", "log"):
            assert tg.dini_sum(ab, weight) == pytest.approx(
                tg.dini_sum(a, weight) + tg.dini_sum(b, weight)
            )
            assert tg.dini_sum(b, weight) >= tg.dini_sum(a, weight)


class TestDensityProfile:
    def test_plane_constant_density(self):
        # Unit-density 2-plane: mass(B(x,r))/r^2 ~ pi for interior probes.
        mu = tg.flat_measure(2, np.eye(2), np.zeros(2), half_extent=2.0, spacing=0.02)
        ladder = tg.ScaleLadder(r_max=0.8, depth=4)
        prof = tg.density_profile(mu, np.zeros(2), 2, ladder)
        for r, v in prof:
            assert v == pytest.approx(np.pi, rel=4 * 0.02 / r)

    def test_dirac_d0_constant_one(self):
        mu = tg.DiscreteMeasure(np.zeros((1, 2)), [1.0])
        prof = tg.density_profile(mu, np.zeros(2), 0, tg.ScaleLadder(0.5, 5))
        assert all(v == 1.0 for _, v in prof)

    def test_cantor_dimension_mismatch_diverges(self):
        # Analytic masses 2^-k at radii 3^-k make r^-1 mu(B) blow up.
        mu = tg.cantor_measure(12)
        radii = [3.0 ** -k for k in (2, 4, 6)]
        vals = [
            tg.ball_mass(mu, tg.BallQuery(np.zeros(1), r)) / r for r in radii
        ]
        assert vals[0] < vals[1] < vals[2]
        assert vals[2] / vals[0] == pytest.approx((3.0 / 2.0) ** 4)


class TestDimensionSlope:
    def test_flat_generators(self):
        # Radii stay well above the lattice spacing so the mass staircase
        # cannot bias the regression.
        for d, spacing, extent in ((1, 0.005, 2.0), (2, 0.01, 1.3)):
            mu = tg.flat_measure(d, np.eye(2)[:, :d], np.zeros(2),
                                 half_extent=extent, spacing=spacing)
            ladder = tg.ScaleLadder(r_max=0.6, depth=4)
            slope = tg.dimension_slope(tg.density_profile(mu, np.zeros(2), 0, ladder))
            assert slope == pytest.approx(d, abs=0.05)

    def test_dirac_slope_zero(self):
        mu = tg.DiscreteMeasure(np.zeros((1, 2)), [1.0])
        prof = tg.density_profile(mu, np.zeros(2), 0, tg.ScaleLadder(0.5, 5))
        assert tg.dimension_slope(prof) == pytest.approx(0.0, abs=1e-9)

    def test_cantor_slope(self):
        # Analytic triadic masses give slope log 2 / log 3.
        mu = tg.cantor_measure(14)
        prof = [(3.0 ** -k, tg.ball_mass(mu, tg.BallQuery(np.zeros(1), 3.0 ** -k)))
                for k in range(2, 8)]
        assert tg.dimension_slope(prof) == pytest.approx(math.log(2) / math.log(3), abs=0.02)

    def test_insufficient_data(self):
        with pytest.raises(tg.InsufficientData):
            tg.dimension_slope([(0.5, 1.0), (0.25, 0.5)])

    def test_weight_scaling_invariance(self):
        mu = tg.cantor_measure(8)
        ladder = tg.ScaleLadder(r_max=0.3, depth=4)
        s1 = tg.dimension_slope(tg.density_profile(mu, np.zeros(1), 0, ladder))
        scaled = tg.DiscreteMeasure(mu.points, 17.0 * mu.weights)
        s2 = tg.dimension_slope(tg.density_profile(scaled, np.zeros(1), 0, ladder))
        assert s1 == pytest.approx(s2, abs=1e-12)


class TestAhlforsCheck:
    def test_flat_plane_ratio_near_one(self):
        mu = tg.flat_measure(2, np.eye(2), np.zeros(2), half_extent=2.0, spacing=0.02)
        ladder = tg.ScaleLadder(r_max=0.6, depth=4)
        hi, lo = tg.ahlfors_check(mu, [np.zeros(2), [0.1, 0.1]], ladder, 2)
        assert hi / lo == pytest.approx(1.0, abs=0.15)

    def test_cantor_triadic_bounded(self):
        mu = tg.cantor_measure(12)
        d = math.log(2) / math.log(3)
        probes = [np.zeros(1), np.array([2.0 / 3.0])]
        radii = [3.0 ** -k for k in range(2, 7)]
        vals = []
        for x in probes:
            for r in radii:
                vals.append(tg.ball_mass(mu, tg.BallQuery(x, r)) / r ** d)
        assert max(vals) / min(vals) <= 4.0

    def test_atom_invisible_below_separation(self):
        seg = tg.flat_measure(1, np.eye(2)[:, :1], np.zeros(2), half_extent=1.5, spacing=0.01)
        atom = tg.DiscreteMeasure(np.array([[0.0, 2.0]]), [1.0])
        corpus = tg.mix([seg, atom], [1.0, 1.0])
        ladder = tg.ScaleLadder(r_max=0.4, depth=4)
        hi, lo = tg.ahlfors_check(corpus, [np.zeros(2)], ladder, 1)
        assert hi / lo == pytest.approx(1.0, abs=0.1)


class TestTangentDiagnostic:
    def test_flat_all_small(self):
        mu = tg.flat_measure(1, np.eye(2)[:, :1], np.zeros(2), half_extent=2.0, spacing=0.005)
        M = tg.tangent_uniqueness_diagnostic(
            mu, np.zeros(2), tg.ScaleLadder(0.4, 4), tg.default_bump()
        )
        assert np.max(M) < 0.05

    def test_dirac_zero(self):
        mu = tg.DiscreteMeasure(np.zeros((1, 2)), [1.0])
        M = tg.tangent_uniqueness_diagnostic(
            mu, np.zeros(2), tg.ScaleLadder(0.5, 3), tg.default_bump()
        )
        assert np.max(np.abs(M)) < 1e-12

    def test_symmetric_zero_diagonal(self):
        mu = tg.cantor_measure(10)
        M = tg.tangent_uniqueness_diagnostic(
            mu, np.zeros(1), tg.ScaleLadder(0.3, 4), tg.default_bump()
        )
        assert np.allclose(M, M.T, atol=1e-8)
        assert np.allclose(np.diag(M), 0.0)

    def test_snowflake_scales_separated(self):
        spec = tg.SnowflakeSpec(angle_sequence=lambda g: 0.7, depth=5)
        mu = tg.snowflake_measure(spec)
        x = mu.points[len(mu) // 2]
        M = tg.tangent_uniqueness_diagnostic(
            mu, x, tg.ScaleLadder(0.15, 3), tg.default_bump()
        )
        assert np.max(M) > 0.02
        assert np.allclose(M, M.T, atol=1e-8)


class TestSweep:
    def test_flat_line_rows(self):
        mu = tg.flat_measure(1, np.eye(2)[:, :1], np.zeros(2), half_extent=2.0, spacing=0.002)
        ladder = tg.ScaleLadder(r_max=0.15, depth=3)
        cfg = tg.SearchConfig(scale_grid_size=4, rotation_grid_size=4,
                              refine_iters=4, plane_grid_size=3, stop_tol=0.02)
        rows = tg.sweep(mu, [np.zeros(2)], ladder, tg.GroupWindow(1.5, 2.5), cfg)
        assert len(rows) == 3
        for row in rows:
            assert row.alpha_D < 0.05
            assert row.alpha_G <= row.alpha_D + 1e-8
            assert row.alpha_flat[1] < 0.05
            assert row.best_d == 1
            assert row.alpha_min == min(row.alpha_flat)
            assert not row.flags

    def test_empty_ball_flagged_not_fatal(self):
        mu = tg.DiscreteMeasure(np.zeros((1, 2)), [1.0])
        ladder = tg.ScaleLadder(r_max=0.1, depth=2)
        rows = tg.sweep(mu, [np.array([5.0, 5.0])], ladder, components="flat")
        assert all("empty" in r.flags for r in rows)
        assert all(math.isnan(r.alpha_min) for r in rows)

    def test_under_resolved_flag(self):
        mu = tg.DiscreteMeasure(np.zeros((1, 1)), [1.0])
        rows = tg.sweep(mu, [np.zeros(1)], tg.ScaleLadder(0.5, 1), components="flat")
        assert "under_resolved" in rows[0].flags

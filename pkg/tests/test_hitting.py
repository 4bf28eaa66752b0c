import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ighit.errors import DomainError
from ighit.numerics import DEFAULT_SPEC, erfcx, integrate_semi_infinite, invert_laplace
from ighit.hitting import (
    HittingDensityEval,
    TailBoundReport,
    density_support_cutoff,
    hit_boundary_slope,
    hit_boundary_value,
    hit_cdf,
    hit_lt_space,
    hit_lt_time,
    hit_llt,
    hit_mean,
    hit_mean_asymptote,
    hit_moment,
    hit_moment_quadrature,
    hit_pdf_convolution,
    hit_pdf_integral,
    hit_pdf_table,
    hit_second_moment,
    hit_survival,
    hit_variance,
    invert_path,
    sample_hitting_times,
    stable_hit_pdf,
    stable_hit_survival,
    stable_hit_tail_report,
    tail_report,
)
from ighit.subordinators import (
    IGParams,
    IGSubordinator,
    SamplePath,
    TemperedStableSubordinator,
    ig_levy_tail,
)


def half_normal_pdf(x, t):
    return math.sqrt(2.0 / (math.pi * t)) * math.exp(-x * x / (2.0 * t))


class TestDensityRoutes:
    def test_driftless_closed_form(self, params_10):
        ev = HittingDensityEval(params_10)
        for t in (0.5, 1.0, 2.0):
            for x in (0.0, 0.3, 1.0, 2.7):
                assert hit_pdf_integral(x, t, ev) == pytest.approx(
                    half_normal_pdf(x, t), abs=1e-10)
        assert half_normal_pdf(1.0, 1.0) == pytest.approx(0.483941, abs=5e-7)

    def test_two_routes_agree(self, params_11):
        ev = HittingDensityEval(params_11)
        model = IGSubordinator(params_11)
        for t in (0.5, 1.0):
            for x in (0.25, 0.5, 1.0, 2.0):
                assert hit_pdf_integral(x, t, ev) == pytest.approx(
                    hit_pdf_convolution(x, t, model), abs=1e-8)

    def test_convolution_collapses_to_levy_tail_at_origin(self, params_11):
        val = hit_pdf_convolution(1e-4, 1.0, IGSubordinator(params_11))
        assert val == pytest.approx(ig_levy_tail(1.0, params_11), abs=1e-3)

    def test_ts_convolution_normalises(self):
        model = TemperedStableSubordinator(0.5, 1.0)
        spec = DEFAULT_SPEC.with_(abs_tol=1e-9, rel_tol=1e-7)
        mass = integrate_semi_infinite(
            lambda x: np.array([hit_pdf_convolution(float(xi), 1.0, model, spec)
                                for xi in np.atleast_1d(x)]), spec)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_stable_convolution_matches_closed_form(self):
        # half-index subordinator: convolution route against the scaled
        # Gaussian hitting density
        from ighit.subordinators import StableSubordinator
        model = StableSubordinator(0.5)
        for x in (0.5, 1.0, 2.0):
            closed = math.exp(-x * x / 4.0) / math.sqrt(math.pi)
            assert hit_pdf_convolution(x, 1.0, model) == pytest.approx(closed, abs=1e-8)

    def test_normalisation_and_literal_failure(self, params_11):
        ev = HittingDensityEval(params_11)
        assert hit_moment_quadrature(0.0, 2.0, ev) == pytest.approx(1.0, abs=1e-8)
        lit = HittingDensityEval(params_11, prefactor_mode="literal")
        mass = hit_moment_quadrature(0.0, 2.0, lit)
        assert mass == pytest.approx(math.exp(0.5), rel=1e-8)
        assert abs(mass - 1.0) > 1e-5

    def test_table_matches_scalar(self, params_11):
        ev = HittingDensityEval(params_11)
        xs = np.linspace(0.0, 4.0, 23)
        tab = hit_pdf_table(xs, 1.0, ev)
        scal = np.array([hit_pdf_integral(float(x), 1.0, ev) for x in xs])
        assert np.max(np.abs(tab - scal)) < 1e-11

    def test_domain_errors(self, params_11):
        ev = HittingDensityEval(params_11)
        with pytest.raises(DomainError):
            hit_pdf_integral(-0.1, 1.0, ev)
        with pytest.raises(DomainError):
            hit_pdf_integral(1.0, 0.0, ev)
        with pytest.raises(DomainError):
            HittingDensityEval(params_11, prefactor_mode="bogus")


class TestDistributionFunction:
    def test_zero_at_origin(self, params_11):
        assert hit_cdf(0.0, 1.0, params_11) == 0.0

    def test_driftless_half_normal(self, params_10):
        # P(H(t) <= x) = 2 Phi(x / sqrt(t)) - 1
        val = hit_cdf(1.0, 1.0, params_10)
        assert val == pytest.approx(math.erf(1.0 / math.sqrt(2.0)), rel=1e-12)
        assert val == pytest.approx(0.682689, abs=5e-7)

    def test_derivative_matches_density(self, params_11):
        ev = HittingDensityEval(params_11)
        step = 1e-4
        fd = (hit_cdf(0.7 + step, 1.0, params_11)
              - hit_cdf(0.7 - step, 1.0, params_11)) / (2.0 * step)
        assert fd == pytest.approx(hit_pdf_integral(0.7, 1.0, ev), abs=1e-5)

    def test_monotone_in_x_and_t(self, params_11):
        xs = np.linspace(0.0, 6.0, 61)
        vals = hit_cdf(xs, 1.0, params_11)
        assert np.all(np.diff(vals) >= 0)
        # more time available means the barrier is hit later: H grows with t
        for x in (0.5, 1.0, 2.0):
            ts = np.linspace(0.25, 4.0, 16)
            cdfs = np.array([hit_cdf(x, float(t), params_11) for t in ts])
            assert np.all(np.diff(cdfs) <= 1e-14)


class TestTransforms:
    def test_time_transform_inverts_to_density(self, params_11):
        ev = HittingDensityEval(params_11)
        for t in (0.5, 1.0, 2.0):
            val = invert_laplace(lambda s: hit_lt_time(0.7, s, params_11), t)
            assert val == pytest.approx(hit_pdf_integral(0.7, t, ev), rel=1e-4)

    def test_llt_total_mass_limit(self, params_11):
        # s * double-transform tends to 1 as the space variable vanishes
        for s in (0.5, 1.0, 2.0):
            assert s * hit_llt(1e-9, s, params_11) == pytest.approx(1.0, rel=1e-8)

    def test_llt_against_double_quadrature(self):
        params = IGParams(1.0, 0.5)

        def inner(ts):
            return np.array([math.exp(-ti) * hit_lt_space(1.0, float(ti), params)
                             for ti in np.atleast_1d(ts)])

        double = integrate_semi_infinite(inner, DEFAULT_SPEC.with_(abs_tol=1e-11,
                                                                   rel_tol=1e-9))
        assert hit_llt(1.0, 1.0, params) == pytest.approx(double, abs=1e-4)

    def test_llt_domain(self, params_11):
        with pytest.raises(DomainError):
            hit_llt(-10.0, 1.0, params_11)

    def test_space_transform_driftless_closed_form(self, params_10):
        val = hit_lt_space(1.0, 1.0, params_10)
        closed = erfcx(1.0 / math.sqrt(2.0))
        assert val == pytest.approx(closed, abs=1e-10)
        assert closed == pytest.approx(math.exp(0.5) * math.erfc(1.0 / math.sqrt(2.0)),
                                       rel=1e-14)

    def test_space_transform_normalisation_limit(self, params_10):
        assert hit_lt_space(1e-7, 1.0, params_10) == pytest.approx(1.0, abs=1e-5)

    def test_space_transform_against_quadrature(self):
        params = IGParams(1.0, 0.5)
        ev = HittingDensityEval(params)
        x_max = density_support_cutoff(1.0, params)
        from ighit.numerics import integrate_interval
        direct = integrate_interval(
            lambda xs: np.exp(-xs) * hit_pdf_table(xs, 1.0, ev), 0.0, x_max,
            edges=np.linspace(0.0, x_max, 33))
        assert hit_lt_space(1.0, 1.0, params) == pytest.approx(direct, abs=1e-5)

    def test_space_transform_domain(self, params_11):
        with pytest.raises(DomainError):
            hit_lt_space(1.0, 1.0, params_11)   # mu = delta * gamma diverges
        with pytest.raises(DomainError):
            hit_lt_space(0.5, 1.0, params_11)

    def test_forward_lt_of_density_matches_closed_form(self, params_11):
        # numerically transforming the tabulated density over t recovers the
        # closed-form time transform
        ev = HittingDensityEval(params_11)
        x = 0.7
        for s in (0.5, 1.0, 2.0):
            def f(ts):
                dens = np.array([hit_pdf_integral(x, float(t), ev) for t in ts])
                return np.exp(-s * ts) * dens
            val = integrate_semi_infinite(f, DEFAULT_SPEC.with_(abs_tol=1e-11,
                                                                rel_tol=1e-9))
            assert val == pytest.approx(hit_lt_time(x, s, params_11), abs=1e-5)


class TestMoments:
    def test_driftless_mean(self, params_10):
        assert hit_mean(1.0, params_10) == pytest.approx(math.sqrt(2.0 / math.pi),
                                                         rel=1e-14)

    def test_mean_matches_quadrature(self, params_11, params_205):
        for params in (params_11, params_205):
            quad = hit_moment_quadrature(1.0, 1.0, HittingDensityEval(params))
            assert hit_mean(1.0, params) == pytest.approx(quad, abs=1e-6)

    def test_second_moment_matches_quadrature(self, params_11, params_205):
        for params in (params_11, params_205):
            quad = hit_moment_quadrature(2.0, 1.0, HittingDensityEval(params))
            assert hit_second_moment(1.0, params) == pytest.approx(quad, abs=1e-6)

    def test_driftless_second_moment_is_t(self, params_10):
        # the half-normal second moment; the often-quoted 2t fails this
        assert hit_second_moment(1.0, params_10) == 1.0
        quad = hit_moment_quadrature(2.0, 1.0, HittingDensityEval(params_10))
        assert quad == pytest.approx(1.0, abs=1e-6)

    def test_moment_transform_consistency(self, params_11, params_205):
        assert hit_moment(1.0, 1.0, params_11) == pytest.approx(
            hit_mean(1.0, params_11), rel=1e-5)
        assert hit_moment(2.0, 1.0, params_11) == pytest.approx(
            hit_second_moment(1.0, params_11), rel=1e-4)
        assert hit_moment(2.0, 2.0, params_205) == pytest.approx(
            hit_second_moment(2.0, params_205), rel=1e-4)

    def test_fractional_moment_driftless(self, params_10):
        # E |N(0, t)|^q = (2t)^(q/2) Gamma((q+1)/2) / sqrt(pi)
        q = 0.5
        target = 2.0 ** (q / 2.0) * math.gamma((q + 1.0) / 2.0) / math.sqrt(math.pi)
        assert target == pytest.approx(0.822179, abs=5e-7)
        assert hit_moment(q, 1.0, params_10) == pytest.approx(target, rel=1e-5)

    def test_variance_driftless(self, params_10):
        assert hit_variance(1.0, params_10) == pytest.approx(1.0 - 2.0 / math.pi,
                                                             rel=1e-12)

    def test_variance_small_t(self, params_11):
        t = 1e-4
        assert hit_variance(t, params_11) / math.sqrt(t) < 0.05

    def test_variance_large_t_linear_growth(self, params_11):
        # closed forms say Var ~ t/delta^2 at large t; Monte Carlo agrees
        v100 = hit_variance(100.0, params_11)
        v400 = hit_variance(400.0, params_11)
        assert v100 / 100.0 == pytest.approx(v400 / 400.0, rel=0.2)
        hs = sample_hitting_times(100.0, 10_000, params_11, 1 / 16, seed=21)
        mc_var = hs.var(ddof=1)
        se_var = mc_var * math.sqrt(2.0 / hs.size)  # normal-theory scale
        assert abs(mc_var - v100) < 6.0 * se_var

    def test_mean_asymptotes(self, params_11, params_10):
        assert hit_mean_asymptote(400.0, params_11, "large_t") == 400.0
        assert hit_mean(400.0, params_11) / 400.0 == pytest.approx(1.0, abs=0.01)
        assert hit_mean_asymptote(1e-4, params_11, "small_t") == pytest.approx(
            math.sqrt(2e-4 / math.pi), rel=1e-12)
        assert hit_mean_asymptote(4.0, params_10, "large_t") == pytest.approx(
            hit_mean(4.0, params_10), rel=1e-12)
        with pytest.raises(DomainError):
            hit_mean_asymptote(1.0, params_11, "huge_t")

    def test_nonlinear_mean_witness(self, params_10):
        # linear growth of the mean would be required of a Levy process
        assert abs(hit_mean(4.0, params_10) - 4.0 * hit_mean(1.0, params_10)) > 0.5


class TestBoundaryAndTail:
    def test_boundary_equals_levy_tail(self, params_11):
        for t in (0.5, 1.0, 3.0):
            assert hit_boundary_value(t, params_11) == pytest.approx(
                ig_levy_tail(t, params_11), abs=1e-10)

    def test_boundary_driftless(self, params_10):
        assert hit_boundary_value(1.0, params_10) == pytest.approx(
            math.sqrt(2.0 / math.pi), rel=1e-13)

    def test_boundary_slope_fd(self, params_11):
        ev = HittingDensityEval(params_11)
        fd = (hit_pdf_integral(2e-3, 1.0, ev) - hit_pdf_integral(0.0, 1.0, ev)) / 2e-3
        assert fd == pytest.approx(hit_boundary_slope(1.0, params_11), abs=1e-3)

    def test_survival_driftless_value(self, params_10):
        assert hit_survival(3.0, 1.0, params_10) == pytest.approx(
            math.erfc(3.0 / math.sqrt(2.0)), abs=1e-12)
        assert math.erfc(3.0 / math.sqrt(2.0)) == pytest.approx(0.002700, abs=5e-7)

    def test_tail_report_bounded_ratio(self, params_11):
        rep = tail_report(1.0, params_11, np.linspace(2.0, 8.0, 25))
        ratios = rep.ratios()
        assert ratios.argmax() == 0
        assert ratios[-1] < ratios[0]
        assert np.all(rep.survival[:-1] >= rep.survival[1:])
        assert np.all((rep.survival >= 0) & (rep.survival <= 1))

    def test_tail_fitted_rate_driftless(self, params_10):
        rep = tail_report(1.0, params_10, np.linspace(2.0, 8.0, 25))
        # the empirical Gaussian rate is near 1/(2t), not the stated 1/(4t)
        assert rep.fitted_gaussian_rate == pytest.approx(0.5, abs=0.05)
        assert abs(rep.fitted_gaussian_rate - 0.25) > 0.2

    def test_tail_report_serialisation(self, params_11, tmp_path):
        rep = tail_report(1.0, params_11, np.linspace(2.0, 6.0, 9))
        rep.to_json(tmp_path / "tail.json")
        rep.to_csv(tmp_path / "tail.csv")
        assert (tmp_path / "tail.json").exists()
        header = (tmp_path / "tail.csv").read_text().split("\n")[0]
        assert header == "x,survival,bound"


class TestPathInversion:
    def test_staircase(self):
        g = SamplePath(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 5.0]))
        h = invert_path(g, np.array([0.0, 1.0, 1.99, 2.0, 4.9]))
        assert np.array_equal(h.values, [1.0, 1.0, 1.0, 2.0, 2.0])

    def test_range_exceeded(self):
        g = SamplePath(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
        with pytest.raises(DomainError):
            invert_path(g, np.array([2.5]))

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0.01, 2.0), min_size=2, max_size=12),
           st.floats(0.01, 0.99))
    def test_galois_inequalities(self, increments, frac):
        values = np.concatenate([[0.0], np.cumsum(increments)])
        times = np.arange(values.size, dtype=float)
        g = SamplePath(times, values)
        t = frac * values[-1]
        h = invert_path(g, np.array([t]))
        u = h.values[0]
        idx = int(u)
        # the inverse picks the first grid time with G above the level
        assert values[idx] > t
        assert idx == 0 or values[idx - 1] <= t

    def test_sampler_matches_path_route(self, params_11):
        # the batched sampler is the same construction as invert_path applied
        # to a simulated path: both laws agree at grid resolution
        hs = sample_hitting_times(1.0, 4000, params_11, 1 / 64, seed=33)
        assert np.all(hs > 0)
        assert np.all((hs / (1 / 64)) % 1 == 0)
        # direct comparison of means against the closed form
        assert abs(hs.mean() - hit_mean(1.0, params_11)) < 5.0 * hs.std() / 63.0


class TestStableHitting:
    def test_half_index_closed_form(self):
        for t in (0.5, 1.0, 2.0):
            for x in (0.25, 1.0, 3.0):
                closed = math.exp(-x * x / (4.0 * t)) / math.sqrt(math.pi * t)
                assert stable_hit_pdf(x, t, 0.5) == pytest.approx(closed, rel=1e-12)
        assert stable_hit_pdf(1.0, 1.0, 0.5) == pytest.approx(0.439391, abs=5e-7)

    def test_normalisation(self):
        mass = integrate_semi_infinite(
            lambda x: stable_hit_pdf(np.maximum(x, 1e-300), 1.0, 0.5), DEFAULT_SPEC)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_survival_closed_form(self):
        assert stable_hit_survival(2.0, 1.0, 0.5) == pytest.approx(
            math.erfc(1.0), rel=1e-10)

    def test_tail_rate(self):
        rep = stable_hit_tail_report(1.0, 0.5, np.linspace(8.0, 16.0, 17))
        assert rep.extra["rate_n"] == pytest.approx(0.25, rel=1e-14)
        assert rep.fitted_gaussian_rate == pytest.approx(0.25, rel=0.02)
        assert isinstance(rep, TailBoundReport)

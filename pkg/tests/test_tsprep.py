import numpy as np
import pytest
from scipy import stats

from sentindex.months import Month, MonthlySeries
from sentindex.tsprep import (
    adf_test,
    centered_ma,
    describe,
    hp_filter,
    ma_reach,
    minmax_normalize,
    prep_pipeline,
)


def series(values, start=Month(2000, 1)) -> MonthlySeries:
    return MonthlySeries(start, np.asarray(values, dtype=float))


def dense_hp_trend(y: np.ndarray, lam: float) -> np.ndarray:
    """Oracle: solve (I + lam*K'K) tau = y with K built explicitly."""
    n = len(y)
    k = np.zeros((n - 2, n))
    for i in range(n - 2):
        k[i, i:i + 3] = (1.0, -2.0, 1.0)
    return np.linalg.solve(np.eye(n) + lam * (k.T @ k), y)


class TestHpFilter:
    @pytest.mark.parametrize("lam", [1.0, 129.0, 14400.0])
    @pytest.mark.parametrize("n", [4, 5, 37, 200])
    def test_matches_dense_solve(self, rng, lam, n):
        y = np.cumsum(rng.normal(size=n)) + 10.0
        result = hp_filter(series(y), lam)
        np.testing.assert_allclose(result.trend.values, dense_hp_trend(y, lam),
                                   rtol=1e-9, atol=1e-9)

    def test_linear_series_is_all_trend(self):
        y = 3.0 - 0.25 * np.arange(48)
        result = hp_filter(series(y), 14400.0)
        np.testing.assert_allclose(result.trend.values, y, atol=1e-8)
        np.testing.assert_allclose(result.cycle.values, 0.0, atol=1e-8)

    def test_trend_plus_cycle_reconstructs(self, rng):
        y = np.cumsum(rng.normal(size=120))
        result = hp_filter(series(y), 14400.0)
        np.testing.assert_allclose(result.trend.values + result.cycle.values, y,
                                   rtol=1e-12, atol=1e-12)

    def test_lambda_zero_returns_series(self, rng):
        y = rng.normal(size=30)
        result = hp_filter(series(y), 0.0)
        np.testing.assert_array_equal(result.trend.values, y)
        np.testing.assert_array_equal(result.cycle.values, 0.0 * y)

    def test_larger_lambda_smooths_more(self, rng):
        y = np.cumsum(rng.normal(size=150))

        def curvature(lam):
            t = hp_filter(series(y), lam).trend.values
            return float((np.diff(t, 2) ** 2).sum())

        c = [curvature(lam) for lam in (10.0, 1000.0, 14400.0)]
        assert c[0] > c[1] > c[2]

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="too short"):
            hp_filter(series([1.0, 2.0, 3.0]), 14400.0)

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError, match="lambda"):
            hp_filter(series(np.arange(10.0)), -1.0)

    def test_months_preserved(self, rng):
        s = series(rng.normal(size=24), start=Month(1995, 3))
        result = hp_filter(s, 14400.0)
        assert result.trend.start == result.cycle.start == Month(1995, 3)
        assert result.lam == 14400.0


class TestMinmax:
    def test_hand_example(self):
        out = minmax_normalize(series([2.0, 4.0, 6.0]))
        np.testing.assert_array_equal(out.values, [0.0, 0.5, 1.0])

    def test_range_pinned(self, rng):
        out = minmax_normalize(series(rng.normal(size=60)))
        assert out.values.min() == 0.0
        assert out.values.max() == 1.0
        assert np.all((out.values >= 0.0) & (out.values <= 1.0))

    def test_affine_invariance(self, rng):
        y = rng.normal(size=40)
        a = minmax_normalize(series(y)).values
        b = minmax_normalize(series(5.0 * y - 2.0)).values
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            minmax_normalize(series(np.full(10, 7.0)))


class TestCenteredMa:
    def test_reach(self):
        assert [ma_reach(p) for p in (1, 2, 3, 4, 6, 12)] == [0, 1, 1, 2, 3, 6]
        with pytest.raises(ValueError):
            ma_reach(0)

    def test_odd_period_hand_example(self):
        out = centered_ma(series([1.0, 2.0, 3.0, 4.0, 5.0]), 3)
        assert out.start == Month(2000, 2)
        np.testing.assert_allclose(out.values, [2.0, 3.0, 4.0])

    def test_even_period_half_endpoints(self):
        # period 4 -> window [.5, 1, 1, 1, .5] / 4
        out = centered_ma(series([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 4)
        assert out.start == Month(2000, 3)
        np.testing.assert_allclose(out.values, [3.0, 4.0])

    def test_even_period_two(self):
        out = centered_ma(series([1.0, 2.0, 3.0, 4.0]), 2)
        assert out.start == Month(2000, 2)
        np.testing.assert_allclose(out.values, [2.0, 3.0])

    def test_period_one_is_identity(self, rng):
        y = rng.normal(size=12)
        out = centered_ma(series(y), 1)
        assert out.start == Month(2000, 1)
        np.testing.assert_allclose(out.values, y)

    def test_linear_series_passes_through(self):
        y = 2.0 + 0.5 * np.arange(30)
        out = centered_ma(series(y), 12)
        np.testing.assert_allclose(out.values, y[6:-6], atol=1e-12)
        assert out.start == Month(2000, 7)
        assert len(out.values) == 30 - 12

    def test_brute_force_even_twelve(self, rng):
        y = rng.normal(size=40)
        out = centered_ma(series(y), 12)
        for j, value in enumerate(out.values):
            t = j + 6
            window = 0.5 * y[t - 6] + y[t - 5:t + 6].sum() + 0.5 * y[t + 6]
            assert value == pytest.approx(window / 12.0, abs=1e-12)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="period"):
            centered_ma(series(np.arange(12.0)), 12)

    def test_constant_stays_constant(self):
        out = centered_ma(series(np.full(20, 3.0)), 6)
        np.testing.assert_allclose(out.values, 3.0)


class TestAdf:
    def test_white_noise_rejects_unit_root(self, rng):
        y = rng.normal(size=200)
        result = adf_test(series(y), max_lags=6)
        assert result.reject_unit_root_at_5pct
        assert result.statistic < result.critical_values["5%"]
        assert result.approx_p < 0.05

    def test_random_walk_keeps_unit_root(self, rng):
        y = np.cumsum(rng.normal(size=200))
        result = adf_test(series(y), max_lags=6)
        assert not result.reject_unit_root_at_5pct
        assert result.approx_p > 0.05

    def test_stationary_ar1_rejects(self, rng):
        y = np.empty(300)
        y[0] = 0.0
        eps = rng.normal(size=300)
        for t in range(1, 300):
            y[t] = 0.5 * y[t - 1] + eps[t]
        result = adf_test(series(y), max_lags=8)
        assert result.reject_unit_root_at_5pct

    def test_lag_zero_statistic_matches_manual_ols(self, rng):
        y = rng.normal(size=80)
        result = adf_test(series(y), max_lags=0)
        assert result.lags_used == 0
        dy = np.diff(y)
        x = np.column_stack([np.ones(len(dy)), y[:-1]])
        beta = np.linalg.solve(x.T @ x, x.T @ dy)
        resid = dy - x @ beta
        s2 = resid @ resid / (len(dy) - 2)
        t_oracle = beta[1] / np.sqrt(s2 * np.linalg.inv(x.T @ x)[1, 1])
        assert result.statistic == pytest.approx(t_oracle, abs=1e-10)
        assert result.n_used == len(dy)

    def test_validation(self, rng):
        with pytest.raises(ValueError):
            adf_test(series(rng.normal(size=50)), max_lags=-1)
        with pytest.raises(ValueError):
            adf_test(series(rng.normal(size=12)), max_lags=6)

    def test_critical_values_interpolated(self, rng):
        result = adf_test(series(rng.normal(size=100)), max_lags=2)
        assert -3.6 < result.critical_values["1%"] < -3.4
        assert -3.0 < result.critical_values["5%"] < -2.8
        assert -2.7 < result.critical_values["10%"] < -2.5


class TestDescribe:
    def test_matches_scipy_moments(self, rng):
        y = rng.gamma(2.0, size=500)
        st = describe(series(y))
        assert st.mean == pytest.approx(y.mean())
        assert st.median == pytest.approx(np.median(y))
        assert st.maximum == y.max() and st.minimum == y.min()
        assert st.std_dev == pytest.approx(y.std(ddof=0))
        assert st.skewness == pytest.approx(stats.skew(y, bias=True))
        assert st.kurtosis == pytest.approx(stats.kurtosis(y, fisher=False, bias=True))
        assert st.n == 500 and not st.degenerate

    def test_normal_sample_kurtosis_near_three(self, rng):
        st = describe(series(rng.normal(size=4000)))
        assert 2.6 < st.kurtosis < 3.4
        assert abs(st.skewness) < 0.2

    def test_constant_series_degenerate(self):
        st = describe(series(np.full(8, 1.5)))
        assert st.degenerate
        assert st.std_dev == st.skewness == st.kurtosis == 0.0
        assert st.mean == st.median == 1.5


class TestPrepPipeline:
    def test_stages_compose(self, rng):
        y = np.cumsum(rng.normal(size=80)) + 5.0
        out = prep_pipeline(series(y), lam=14400.0, ma_period=12)
        assert set(out) == {"trend", "cycle", "normalized", "smoothed"}
        hp = hp_filter(series(y), 14400.0)
        np.testing.assert_array_equal(out["cycle"].values, hp.cycle.values)
        normalized = minmax_normalize(hp.cycle)
        np.testing.assert_array_equal(out["normalized"].values, normalized.values)
        smoothed = centered_ma(normalized, 12)
        np.testing.assert_array_equal(out["smoothed"].values, smoothed.values)
        assert len(out["smoothed"]) == len(y) - 12
        assert out["smoothed"].start == Month(2000, 7)

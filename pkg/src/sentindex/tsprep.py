"""Transforms that turn raw monthly indices into analysis-ready series.

The canonical chain is: Hodrick-Prescott cyclical extraction, minmax
normalization onto [0, 1], then a centered moving average. Each step is a
pure function on MonthlySeries; the stationarity check and descriptive
statistics live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .months import MonthlySeries


@dataclass(frozen=True)
class HpResult:
    trend: MonthlySeries
    cycle: MonthlySeries
    lam: float


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lags_used: int
    approx_p: float
    reject_unit_root_at_5pct: bool
    n_used: int
    critical_values: dict[str, float]


@dataclass(frozen=True)
class SeriesStats:
    mean: float
    median: float
    maximum: float
    minimum: float
    std_dev: float
    skewness: float
    kurtosis: float
    n: int
    degenerate: bool = False


def hp_filter(series: MonthlySeries, lam: float) -> HpResult:
    """Split a series into smooth trend and cycle.

    The trend minimizes sum (y - tau)^2 + lam * sum (second differences of
    tau)^2; the normal equations (I + lam K'K) tau = y are pentadiagonal
    and solved with a banded Cholesky factorization. lam = 0 returns the
    series itself as trend.
    """
    y = series.values
    n = len(y)
    if n < 4:
        raise ValueError(f"series too short for HP filter: {n} < 4")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if lam == 0:
        trend = y.copy()
    else:
        # Stencil of I + lam*K'K: diag 1+lam*[1,5,6,..,6,5,1],
        # first off-diagonal lam*[-2,-4,..,-4,-2], second lam*[1,..,1].
        diag = np.full(n, 1.0 + 6.0 * lam)
        diag[[0, -1]] = 1.0 + lam
        if n >= 4:
            diag[[1, -2]] = 1.0 + 5.0 * lam
        off1 = np.full(n - 1, -4.0 * lam)
        off1[[0, -1]] = -2.0 * lam
        off2 = np.full(n - 2, lam)
        ab = np.zeros((3, n))
        ab[0, 2:] = off2
        ab[1, 1:] = off1
        ab[2, :] = diag
        trend = solveh_banded(ab, y)
    return HpResult(
        trend=series.with_values(trend),
        cycle=series.with_values(y - trend),
        lam=float(lam),
    )


def minmax_normalize(series: MonthlySeries) -> MonthlySeries:
    """Affine rescale onto [0, 1]; constant series have no defined range."""
    y = series.values
    lo = y.min()
    hi = y.max()
    if hi == lo:
        raise ValueError("minmax normalization undefined for a constant series")
    return series.with_values((y - lo) / (hi - lo))


def ma_reach(period: int) -> int:
    """Months trimmed from each end by a centered MA of this period."""
    if period < 1:
        raise ValueError("period must be >= 1")
    return (period - 1) // 2 if period % 2 == 1 else period // 2


def centered_ma(series: MonthlySeries, period: int) -> MonthlySeries:
    """Centered moving average, defined only where the full window fits.

    Odd periods use a symmetric window of `period` points with equal
    weights. Even periods use a window of period+1 points whose two
    endpoints carry half weight, the whole window divided by `period`.
    The output starts ma_reach(period) months later and is shorter by
    2*ma_reach(period).
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    if len(series) < period + 1:
        raise ValueError(f"series length {len(series)} < period + 1 = {period + 1}")
    if period % 2 == 1:
        weights = np.full(period, 1.0 / period)
    else:
        weights = np.ones(period + 1)
        weights[[0, -1]] = 0.5
        weights /= period
    smoothed = np.convolve(series.values, weights, mode="valid")
    return MonthlySeries(series.start + ma_reach(period), smoothed)


# Finite-sample critical values for the Dickey-Fuller t-statistic with a
# constant, interpolated linearly in sample size; last row is asymptotic.
_ADF_CV_T = np.array([25.0, 50.0, 100.0, 250.0, 500.0, 1e9])
_ADF_CV = {
    "1%": np.array([-3.75, -3.58, -3.51, -3.46, -3.44, -3.43]),
    "5%": np.array([-3.00, -2.93, -2.89, -2.88, -2.87, -2.86]),
    "10%": np.array([-2.63, -2.60, -2.58, -2.57, -2.57, -2.57]),
}
# Asymptotic quantile anchors of the same distribution, used for approx_p.
_ADF_P_ANCHORS = np.array([0.01, 0.025, 0.05, 0.10, 0.50, 0.90, 0.95, 0.975, 0.99])
_ADF_TAU_ANCHORS = np.array([-3.43, -3.12, -2.86, -2.57, -1.57, -0.44, -0.07, 0.23, 0.60])


def _ols_rss(x: np.ndarray, y: np.ndarray):
    beta, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < x.shape[1]:
        raise ValueError("ADF regressor matrix is rank deficient")
    resid = y - x @ beta
    return beta, resid, float(resid @ resid)


def adf_test(series: MonthlySeries, max_lags: int) -> AdfResult:
    """Augmented Dickey-Fuller test with a constant.

    Lag order is the AIC argmin over 0..max_lags, computed on a common
    sample; the statistic is the t-ratio on the lagged level, refit on the
    longest sample the chosen lag allows.
    """
    if max_lags < 0:
        raise ValueError("max_lags must be >= 0")
    y = series.values
    n = len(y)
    if n < max_lags + 10:
        raise ValueError(f"series length {n} < max_lags + 10 = {max_lags + 10}")
    dy = np.diff(y)

    def design(k: int, start: int):
        # Rows are t = start..n-1 on the level series (start >= k+1).
        rows = np.arange(start, n)
        cols = [np.ones(len(rows)), y[rows - 1]]
        for j in range(1, k + 1):
            cols.append(dy[rows - 1 - j])
        return np.column_stack(cols), dy[rows - 1]

    common_start = max_lags + 1
    best_k = 0
    best_aic = np.inf
    for k in range(max_lags + 1):
        x, target = design(k, common_start)
        _, _, rss = _ols_rss(x, target)
        nobs = len(target)
        aic = nobs * np.log(rss / nobs) + 2 * (k + 2)
        if aic < best_aic:
            best_aic = aic
            best_k = k

    x, target = design(best_k, best_k + 1)
    beta, resid, rss = _ols_rss(x, target)
    nobs = len(target)
    dof = nobs - x.shape[1]
    s2 = rss / dof
    xtx_inv = np.linalg.inv(x.T @ x)
    stat = float(beta[1] / np.sqrt(s2 * xtx_inv[1, 1]))

    crit = {name: float(np.interp(nobs, _ADF_CV_T, cvs)) for name, cvs in _ADF_CV.items()}
    approx_p = float(np.interp(stat, _ADF_TAU_ANCHORS, _ADF_P_ANCHORS,
                               left=0.001, right=0.999))
    return AdfResult(
        statistic=stat,
        lags_used=best_k,
        approx_p=approx_p,
        reject_unit_root_at_5pct=stat < crit["5%"],
        n_used=nobs,
        critical_values=crit,
    )


def describe(series: MonthlySeries) -> SeriesStats:
    """Moment summary with population normalization (divide by n);
    kurtosis is non-excess, so a normal sample sits near 3."""
    y = series.values
    n = len(y)
    if n == 0:
        raise ValueError("cannot describe an empty series")
    mean = float(y.mean())
    centered = y - mean
    m2 = float((centered ** 2).mean())
    if m2 == 0.0:
        return SeriesStats(mean, float(np.median(y)), float(y.max()), float(y.min()),
                           0.0, 0.0, 0.0, n, degenerate=True)
    m3 = float((centered ** 3).mean())
    m4 = float((centered ** 4).mean())
    return SeriesStats(
        mean=mean,
        median=float(np.median(y)),
        maximum=float(y.max()),
        minimum=float(y.min()),
        std_dev=float(np.sqrt(m2)),
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / m2 ** 2,
        n=n,
    )


def prep_pipeline(series: MonthlySeries, lam: float, ma_period: int) -> dict[str, MonthlySeries]:
    """HP cycle -> minmax -> centered MA, returning every intermediate."""
    hp = hp_filter(series, lam)
    normalized = minmax_normalize(hp.cycle)
    smoothed = centered_ma(normalized, ma_period)
    return {
        "trend": hp.trend,
        "cycle": hp.cycle,
        "normalized": normalized,
        "smoothed": smoothed,
    }

"""Lagged OLS, vector autoregression, impulse responses and Granger tests.

All estimators are least-squares on explicitly constructed lag matrices.
Reported standard errors use the degrees-of-freedom-adjusted residual
covariance; information criteria use the maximum-likelihood (unadjusted)
covariance, normalized by the common sample size.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import EstimationError
from .months import MonthlySeries, aligned


@dataclass(frozen=True)
class OlsResult:
    """Fit of Y_t = alpha + beta*Y_{t-1} + gamma*X_{t-i} + e_t."""

    lag: int
    alpha: float
    beta: float
    gamma: float
    se_alpha: float
    se_beta: float
    se_gamma: float
    p_alpha: float
    p_beta: float
    p_gamma: float
    r_squared: float
    n_used: int


@dataclass(frozen=True)
class PathCell:
    lag: int
    result: OlsResult | None
    error: str | None = None


@dataclass
class VarModel:
    p: int
    intercept: np.ndarray          # (m,)
    coef: np.ndarray               # (p, m, m); coef[l, i, j] on var j at lag l+1 in eq i
    residual_cov: np.ndarray       # (m, m), dof-adjusted
    variable_names: tuple[str, ...]
    T_effective: int
    params: np.ndarray = field(repr=False)        # (1+m*p, m), column per equation
    se: np.ndarray = field(repr=False)            # same shape as params
    tstats: np.ndarray = field(repr=False)
    r_squared: np.ndarray = field(repr=False)     # (m,)
    adj_r_squared: np.ndarray = field(repr=False)
    residual_cov_ml: np.ndarray = field(repr=False)
    xtx_inv: np.ndarray = field(repr=False)       # (1+m*p, 1+m*p)

    @property
    def m(self) -> int:
        return len(self.variable_names)


@dataclass(frozen=True)
class IrfResult:
    horizons: int
    responses: np.ndarray          # (horizons+1, m, m): [h, response_var, shock_var]
    ordering: tuple[str, ...]
    lower: np.ndarray | None = None    # optional bootstrap band, same shape
    upper: np.ndarray | None = None


@dataclass(frozen=True)
class GrangerRow:
    excluded: str                  # other variable name, or "All"
    chi_sq: float | None
    df: int
    p_value: float | None
    error: str | None = None


@dataclass(frozen=True)
class GrangerResult:
    tests: dict[str, list[GrangerRow]]   # dependent variable -> rows
    p: int


@dataclass(frozen=True)
class LagSelection:
    rows: tuple[tuple[int, float, float, float], ...]   # (lag, aic, bic, hq)
    chosen: dict[str, int]                               # criterion -> argmin lag
    n_used: int


def _check_alignment(*series: MonthlySeries) -> None:
    if not aligned(*series):
        spans = [f"[{s.start}..{s.end}]" for s in series]
        raise ValueError(f"series are not aligned on the same months: {', '.join(spans)}")


def _lstsq_full_rank(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    beta, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < x.shape[1]:
        raise EstimationError(f"regressor matrix is rank deficient ({rank} < {x.shape[1]})")
    return beta


def fit_ols_ar1x(y: MonthlySeries, x: MonthlySeries, i: int) -> OlsResult:
    """Least squares of Y_t on [1, Y_{t-1}, X_{t-i}] with t-based p-values."""
    if i < 0:
        raise ValueError("lag i must be >= 0")
    _check_alignment(y, x)
    yv = y.values
    xv = x.values
    t0 = max(1, i)
    n_used = len(yv) - t0
    if n_used < 10:
        raise ValueError(f"only {n_used} usable observations after lag trimming; need >= 10")
    rows = np.arange(t0, len(yv))
    design = np.column_stack([np.ones(n_used), yv[rows - 1], xv[rows - i]])
    target = yv[rows]
    beta = _lstsq_full_rank(design, target)
    resid = target - design @ beta
    rss = float(resid @ resid)
    dof = n_used - 3
    s2 = rss / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(cov))
    pvals = 2.0 * stats.t.sf(np.abs(beta / se), dof)
    tss = float(((target - target.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    return OlsResult(
        lag=i,
        alpha=float(beta[0]), beta=float(beta[1]), gamma=float(beta[2]),
        se_alpha=float(se[0]), se_beta=float(se[1]), se_gamma=float(se[2]),
        p_alpha=float(pvals[0]), p_beta=float(pvals[1]), p_gamma=float(pvals[2]),
        r_squared=r2,
        n_used=n_used,
    )


def coefficient_path(y: MonthlySeries, x: MonthlySeries, i_max: int) -> list[PathCell]:
    """fit_ols_ar1x for every lag 0..i_max; failed cells are marked, not fatal."""
    if i_max < 0:
        raise ValueError("i_max must be >= 0")
    cells = []
    for i in range(i_max + 1):
        try:
            cells.append(PathCell(i, fit_ols_ar1x(y, x, i)))
        except (ValueError, EstimationError) as exc:
            cells.append(PathCell(i, None, str(exc)))
    return cells


def _stack_lags(ydata: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Design [1, M_{t-1}, .., M_{t-p}] and targets for rows t = p..T-1."""
    big_t, m = ydata.shape
    rows = np.arange(p, big_t)
    cols = [np.ones(len(rows))]
    for lag in range(1, p + 1):
        cols.append(ydata[rows - lag])
    return np.column_stack(cols), ydata[rows]


def fit_var(series: list[MonthlySeries], p: int,
            names: tuple[str, ...] | None = None) -> VarModel:
    """Per-equation least squares VAR(p) on aligned monthly series."""
    if p < 1:
        raise ValueError("lag order p must be >= 1")
    _check_alignment(*series)
    ydata = np.column_stack([s.values for s in series])
    big_t, m = ydata.shape
    if names is None:
        names = tuple(f"y{j}" for j in range(m))
    if len(names) != m:
        raise ValueError("one name per series required")
    n_params = m * p + 1
    t_eff = big_t - p
    if t_eff < n_params:
        raise ValueError(f"insufficient observations: T-p = {t_eff} < {n_params} parameters")
    x, targets = _stack_lags(ydata, p)
    params = _lstsq_full_rank(x, targets)
    resid = targets - x @ params
    dof = t_eff - n_params
    if dof <= 0:
        raise ValueError("no residual degrees of freedom")
    residual_cov = resid.T @ resid / dof
    residual_cov_ml = resid.T @ resid / t_eff
    try:
        xtx_inv = np.linalg.inv(x.T @ x)
    except np.linalg.LinAlgError as exc:
        raise EstimationError("singular regressor cross-product") from exc
    se = np.sqrt(np.outer(np.diag(xtx_inv), np.diag(residual_cov)))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, params / se, np.nan)
    rss = (resid ** 2).sum(axis=0)
    tss = ((targets - targets.mean(axis=0)) ** 2).sum(axis=0)
    r2 = 1.0 - rss / tss
    adj_r2 = 1.0 - (1.0 - r2) * (t_eff - 1) / dof
    coef = np.empty((p, m, m))
    for lag in range(p):
        coef[lag] = params[1 + lag * m: 1 + (lag + 1) * m].T
    return VarModel(
        p=p,
        intercept=params[0].copy(),
        coef=coef,
        residual_cov=residual_cov,
        variable_names=tuple(names),
        T_effective=t_eff,
        params=params,
        se=se,
        tstats=tstats,
        r_squared=r2,
        adj_r_squared=adj_r2,
        residual_cov_ml=residual_cov_ml,
        xtx_inv=xtx_inv,
    )


def select_lag(series: list[MonthlySeries], max_lag: int,
               criteria: tuple[str, ...] = ("aic", "bic", "hq")) -> LagSelection:
    """AIC/BIC/HQ over lags 0..max_lag on a common estimation sample.

    Every candidate is fit on the sample trimmed by max_lag so the
    log-determinants are comparable; k = m*(1 + m*lag) parameters.
    """
    _check_alignment(*series)
    ydata = np.column_stack([s.values for s in series])
    big_t, m = ydata.shape
    t_c = big_t - max_lag
    if max_lag < 0 or t_c < m * max_lag + 2:
        raise ValueError(f"max_lag {max_lag} infeasible for T = {big_t}, m = {m}")
    rows = np.arange(max_lag, big_t)
    targets = ydata[rows]
    table = []
    for lag in range(max_lag + 1):
        cols = [np.ones(len(rows))]
        for j in range(1, lag + 1):
            cols.append(ydata[rows - j])
        x = np.column_stack(cols)
        params = _lstsq_full_rank(x, targets)
        resid = targets - x @ params
        sigma_ml = resid.T @ resid / t_c
        sign, logdet = np.linalg.slogdet(sigma_ml)
        if sign <= 0:
            raise EstimationError(f"singular residual covariance at lag {lag}")
        k = m * (1 + m * lag)
        aic = logdet + 2.0 * k / t_c
        bic = logdet + k * np.log(t_c) / t_c
        hq = logdet + 2.0 * k * np.log(np.log(t_c)) / t_c
        table.append((lag, float(aic), float(bic), float(hq)))
    columns = {"aic": 1, "bic": 2, "hq": 3}
    chosen = {
        name: int(min(table, key=lambda row: row[columns[name]])[0])
        for name in criteria
    }
    return LagSelection(rows=tuple(table), chosen=chosen, n_used=t_c)


def companion_matrix(model: VarModel) -> np.ndarray:
    m, p = model.m, model.p
    comp = np.zeros((m * p, m * p))
    for lag in range(p):
        comp[:m, lag * m:(lag + 1) * m] = model.coef[lag]
    if p > 1:
        comp[m:, :-m] = np.eye(m * (p - 1))
    return comp


def ma_coefficients(model: VarModel, horizons: int) -> np.ndarray:
    """Psi_0 = I, Psi_h = sum_{j<=min(h,p)} B_j Psi_{h-j}; shape (H+1, m, m)."""
    m, p = model.m, model.p
    psi = np.zeros((horizons + 1, m, m))
    psi[0] = np.eye(m)
    for h in range(1, horizons + 1):
        for j in range(1, min(h, p) + 1):
            psi[h] += model.coef[j - 1] @ psi[h - j]
    return psi


def irf_cholesky(model: VarModel, horizons: int) -> IrfResult:
    """Orthogonalized impulse responses to one-standard-deviation shocks.

    The shock rotation is the lower Cholesky factor of the residual
    covariance in the model's variable ordering. An unstable model warns
    but still evaluates.
    """
    if horizons < 0:
        raise ValueError("horizons must be >= 0")
    radius = np.abs(np.linalg.eigvals(companion_matrix(model))).max()
    if radius >= 1.0:
        warnings.warn(f"VAR is not stable (companion spectral radius {radius:.4f}); "
                      "impulse responses may diverge")
    try:
        chol = np.linalg.cholesky(model.residual_cov)
    except np.linalg.LinAlgError as exc:
        raise EstimationError("residual covariance is not positive definite") from exc
    psi = ma_coefficients(model, horizons)
    responses = psi @ chol
    return IrfResult(horizons=horizons, responses=responses,
                     ordering=model.variable_names)


def irf_bootstrap_bands(
    series: list[MonthlySeries],
    p: int,
    horizons: int,
    names: tuple[str, ...] | None = None,
    n_boot: int = 200,
    seed: int = 0,
    level: float = 0.95,
) -> IrfResult:
    """Residual-resampling percentile bands around the Cholesky IRF.

    Each replicate rebuilds the sample recursively from the fitted model
    with residuals drawn with replacement, refits, and recomputes the IRF;
    replicates whose refit fails fall back to the point estimate.
    """
    model = fit_var(series, p, names=names)
    point = irf_cholesky(model, horizons)
    ydata = np.column_stack([s.values for s in series])
    x, targets = _stack_lags(ydata, p)
    resid = targets - x @ model.params
    resid = resid - resid.mean(axis=0)
    t_eff = resid.shape[0]
    rng = np.random.default_rng(seed)
    draws = np.empty((n_boot, horizons + 1, model.m, model.m))
    for b in range(n_boot):
        shocks = resid[rng.integers(0, t_eff, size=t_eff)]
        boot = np.empty_like(ydata)
        boot[:p] = ydata[:p]
        for t in range(p, ydata.shape[0]):
            acc = model.intercept + shocks[t - p]
            for lag in range(p):
                acc = acc + model.coef[lag] @ boot[t - 1 - lag]
            boot[t] = acc
        boot_series = [series[j].with_values(boot[:, j]) for j in range(model.m)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                refit = fit_var(boot_series, p, names=model.variable_names)
                draws[b] = irf_cholesky(refit, horizons).responses
            except (EstimationError, ValueError, np.linalg.LinAlgError):
                draws[b] = point.responses
    alpha = (1.0 - level) / 2.0
    return IrfResult(
        horizons=horizons,
        responses=point.responses,
        ordering=point.ordering,
        lower=np.quantile(draws, alpha, axis=0),
        upper=np.quantile(draws, 1.0 - alpha, axis=0),
    )


def granger_wald(model: VarModel) -> GrangerResult:
    """Wald exclusion tests for every equation and every other variable.

    For equation i and excluded variable j, the restriction picks the p
    lag coefficients of j; W = b'(RVR')^{-1}b with V the equation's
    coefficient covariance, chi-square with p degrees of freedom. The
    "All" row excludes every other variable jointly.
    """
    m, p = model.m, model.p
    tests: dict[str, list[GrangerRow]] = {}
    for i, dep in enumerate(model.variable_names):
        cov_i = model.residual_cov[i, i] * model.xtx_inv
        b_i = model.params[:, i]
        rows: list[GrangerRow] = []

        def wald(idx: list[int], label: str) -> GrangerRow:
            df = len(idx)
            b = b_i[idx]
            v = cov_i[np.ix_(idx, idx)]
            try:
                w = float(b @ np.linalg.solve(v, b))
            except np.linalg.LinAlgError:
                return GrangerRow(label, None, df, None, error="singular RVR'")
            if not np.isfinite(w):
                return GrangerRow(label, None, df, None, error="non-finite statistic")
            w = max(w, 0.0)
            return GrangerRow(label, w, df, float(stats.chi2.sf(w, df)))

        all_idx: list[int] = []
        for j, other in enumerate(model.variable_names):
            if j == i:
                continue
            idx = [1 + lag * m + j for lag in range(p)]
            all_idx.extend(idx)
            rows.append(wald(idx, other))
        rows.append(wald(all_idx, "All"))
        tests[dep] = rows
    return GrangerResult(tests=tests, p=p)


def simulate_var(
    intercept: np.ndarray,
    coef: np.ndarray,
    t_obs: int,
    rng: np.random.Generator,
    innov_chol: np.ndarray | None = None,
    burn: int = 200,
) -> np.ndarray:
    """Draw T observations from a VAR with Gaussian innovations.

    `coef` has shape (p, m, m) in the same orientation as VarModel.coef;
    `innov_chol` is the lower Cholesky factor of the innovation covariance
    (identity when omitted). Used as the data-generating process in tests
    and bundled fixtures.
    """
    coef = np.asarray(coef, dtype=float)
    p, m, _ = coef.shape
    intercept = np.asarray(intercept, dtype=float)
    if innov_chol is None:
        innov_chol = np.eye(m)
    total = t_obs + burn
    shocks = rng.standard_normal((total, m)) @ innov_chol.T
    out = np.zeros((total + p, m))
    for t in range(p, total + p):
        acc = intercept + shocks[t - p]
        for lag in range(p):
            acc = acc + coef[lag] @ out[t - 1 - lag]
        out[t] = acc
    return out[p + burn:]

"""Stage orchestration: each subcommand is a stage with declared artifacts.

Every run lives under `<out>/run-<config-hash>/`, so identical configs
land in the same directory and reruns are byte-for-byte comparable. A
stage writes into a private staging directory first; on success the files
are promoted into the run directory and recorded in `manifest.json`, on
failure the staging directory is moved to `quarantine/<stage>/` so
partial artifacts never mix with good ones.

Stages read their inputs only from config paths and prior-stage
artifacts — never from module state — so any stage can be rerun alone.
"""

from __future__ import annotations

import hashlib
import json
import logging
import shutil
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import econ, embedding, lexicon, sentiment, tsprep
from .config import PipelineConfig
from .errors import SentIndexError
from .months import MonthlySeries, align, read_series_csv, write_series_csv

log = logging.getLogger(__name__)

STAGE_ORDER = ("ingest", "train", "expand", "score", "prep", "ols", "var", "report")


class StageError(SentIndexError):
    """A pipeline stage failed; partial outputs are in quarantine."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(obj, path: Path) -> None:
    path.write_text(
        json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def _need(run_dir: Path, rel: str, stage: str, producer: str) -> Path:
    path = run_dir / rel
    if not path.is_file():
        raise StageError(stage, f"missing artifact {rel!r}; run the {producer!r} stage first")
    return path


def _update_manifest(cfg: PipelineConfig, run_dir: Path, stage: str,
                     artifacts: list[str]) -> None:
    manifest_path = run_dir / "manifest.json"
    if manifest_path.is_file():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    else:
        manifest = {
            "config": cfg.canonical_dict(),
            "config_hash": cfg.config_hash(),
            "inputs": {},
            "stages": {},
            "artifacts": {},
        }
    inputs = {}
    for label, path in (("corpus", cfg.paths.corpus), ("lexicon", cfg.paths.lexicon),
                        ("market", cfg.paths.market), ("stopwords", cfg.paths.stopwords),
                        ("cleaning_rules", cfg.paths.cleaning_rules)):
        if path is not None and path.is_file():
            inputs[label] = {"path": str(path), "sha256": _sha256(path)}
    manifest["inputs"] = inputs
    manifest["stages"][stage] = sorted(artifacts)
    for rel in artifacts:
        manifest["artifacts"][rel] = _sha256(run_dir / rel)
    _write_json(manifest, manifest_path)


def run_stage(name: str, cfg: PipelineConfig) -> tuple[Path, list[str]]:
    """Run one stage; returns the run directory and the promoted artifacts."""
    try:
        fn = _STAGES[name]
    except KeyError:
        raise ValueError(f"unknown stage {name!r}; expected one of {STAGE_ORDER}") from None
    run_dir = cfg.run_dir()
    run_dir.mkdir(parents=True, exist_ok=True)
    staging = run_dir / f"_tmp_{name}"
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir()
    log.info("stage %s: starting (run dir %s)", name, run_dir)
    try:
        artifacts = fn(cfg, run_dir, staging)
    except StageError:
        _quarantine(run_dir, name, staging)
        raise
    except Exception as exc:
        _quarantine(run_dir, name, staging)
        raise StageError(name, str(exc)) from exc
    for rel in artifacts:
        dest = run_dir / rel
        dest.parent.mkdir(parents=True, exist_ok=True)
        if dest.exists():
            dest.unlink()
        (staging / rel).rename(dest)
    shutil.rmtree(staging)
    _update_manifest(cfg, run_dir, name, artifacts)
    log.info("stage %s: wrote %d artifact(s)", name, len(artifacts))
    return run_dir, artifacts


def run_all(cfg: PipelineConfig) -> tuple[Path, list[str]]:
    run_dir = cfg.run_dir()
    produced: list[str] = []
    for name in STAGE_ORDER:
        _, artifacts = run_stage(name, cfg)
        produced.extend(artifacts)
    return run_dir, produced


def _quarantine(run_dir: Path, stage: str, staging: Path) -> None:
    target = run_dir / "quarantine" / stage
    if target.exists():
        shutil.rmtree(target)
    target.parent.mkdir(exist_ok=True)
    staging.rename(target)
    log.warning("stage %s failed; partial outputs moved to %s", stage, target)


# --- stage bodies ----------------------------------------------------------

def _load_corpus_artifact(run_dir: Path, stage: str) -> corpus_mod.Corpus:
    path = _need(run_dir, "corpus_tokens.jsonl", stage, "ingest")
    corp, rejections = corpus_mod.ingest_jsonl(path)
    if rejections:
        raise StageError(stage, f"tokenized corpus artifact is corrupt: "
                                f"line {rejections[0].line_no}: {rejections[0].reason}")
    return corp


def _stage_ingest(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    stopwords = (corpus_mod.load_stopwords(cfg.paths.stopwords)
                 if cfg.paths.stopwords else frozenset())
    rules = (corpus_mod.CleaningRules.from_json_file(cfg.paths.cleaning_rules)
             if cfg.paths.cleaning_rules else corpus_mod.CleaningRules())
    corp, rejections = corpus_mod.ingest_jsonl(
        cfg.paths.corpus, stopwords, rules,
        cfg.corpus.date_min, cfg.corpus.date_max,
    )
    if not corp.records:
        raise ValueError("no usable records in the corpus after cleaning/filtering")
    corpus_mod.write_tokens_jsonl(corp, out / "corpus_tokens.jsonl")
    stats = corpus_mod.summarize(corp)
    report = {
        "stats": asdict(stats),
        "date_range": [corp.records[0].date.isoformat(),
                       corp.records[-1].date.isoformat()],
        "n_rejected": len(rejections),
        "rejections": [{"line": r.line_no, "reason": r.reason} for r in rejections],
        "n_stopwords": len(stopwords),
    }
    _write_json(report, out / "ingest_report.json")
    return ["corpus_tokens.jsonl", "ingest_report.json"]


def _stage_train(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    corp = _load_corpus_artifact(run_dir, "train")
    model = embedding.train_skipgram(corp, cfg.embedding)
    embedding.save_model(model, out / "embedding.txt")
    return ["embedding.txt", "embedding.txt.outv", "embedding.txt.json"]


def _stage_expand(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    model = embedding.load_model(_need(run_dir, "embedding.txt", "expand", "train"))
    base = lexicon.load_lexicon(cfg.paths.lexicon)
    artifacts = []
    for n in cfg.expansion.n_values:
        expanded, report = lexicon.expand_negative(model, cfg.expansion.seed_word, n, base)
        lex_name = f"lexicon_n{n}.tsv"
        report_name = f"expansion_report_n{n}.json"
        lexicon.save_lexicon(expanded, out / lex_name)
        (out / report_name).write_text(report.to_json() + "\n", encoding="utf-8")
        artifacts += [lex_name, report_name]
    return artifacts


def _stage_score(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    corp = _load_corpus_artifact(run_dir, "score")
    zero_months = sentiment.months_without_articles(corp)
    artifacts = []
    table_rows = []
    for n in cfg.expansion.n_values:
        lex = lexicon.load_lexicon(_need(run_dir, f"lexicon_n{n}.tsv", "score", "expand"))
        label = f"N={n}"
        totals = sentiment.corpus_match_totals(corp, lex, label)
        series = sentiment.monthly_index(corp, lex)
        series_name = f"sent{n}_monthly.csv"
        totals_name = f"match_totals_n{n}.json"
        write_series_csv(series, out / series_name)
        _write_json({
            "lexicon_label": totals.lexicon_label,
            "total_positive": totals.total_positive,
            "total_negative": totals.total_negative,
            "total_score": totals.total_score,
            "n_titles": len(corp.records),
            "zero_filled_months": zero_months,
        }, out / totals_name)
        table_rows.append((label, totals))
        artifacts += [series_name, totals_name]
    with (out / "match_totals.csv").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("lexicon,total_positive,total_negative,total_score\n")
        for label, totals in table_rows:
            fh.write(f"{label},{totals.total_positive},{totals.total_negative},"
                     f"{totals.total_score}\n")
    artifacts.append("match_totals.csv")
    return artifacts


def _adf_summary(series: MonthlySeries) -> dict | None:
    if len(series) < 15:
        return None
    max_lags = max(0, min(12, (len(series) - 12) // 3))
    result = tsprep.adf_test(series, max_lags)
    payload = asdict(result)
    payload["critical_values"] = {k: float(v) for k, v in result.critical_values.items()}
    return payload


def _stage_prep(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    series_map: dict[str, MonthlySeries] = {
        "market": read_series_csv(cfg.paths.market),
    }
    for n in cfg.expansion.n_values:
        path = _need(run_dir, f"sent{n}_monthly.csv", "prep", "score")
        series_map[f"sent{n}"] = read_series_csv(path)

    artifacts: list[str] = []
    summary: dict[str, dict] = {}
    for name, raw in series_map.items():
        entry: dict = {"stats_raw": asdict(tsprep.describe(raw)),
                       "adf_raw": _adf_summary(raw)}
        current = raw
        for step in cfg.tsprep.order:
            if step == "hp":
                hp = tsprep.hp_filter(current, cfg.tsprep.lam)
                write_series_csv(hp.trend, out / f"{name}_trend.csv")
                write_series_csv(hp.cycle, out / f"{name}_cycle.csv")
                artifacts += [f"{name}_trend.csv", f"{name}_cycle.csv"]
                entry["adf_cycle"] = _adf_summary(hp.cycle)
                current = hp.cycle
            elif step == "minmax":
                current = tsprep.minmax_normalize(current)
                write_series_csv(current, out / f"{name}_normalized.csv")
                artifacts.append(f"{name}_normalized.csv")
                entry["adf_normalized"] = _adf_summary(current)
            else:
                for period in cfg.tsprep.ma_periods:
                    smoothed = tsprep.centered_ma(current, period)
                    write_series_csv(smoothed, out / f"{name}_ma{period}.csv")
                    artifacts.append(f"{name}_ma{period}.csv")
        summary[name] = entry
    _write_json(summary, out / "prep_summary.json")
    artifacts.append("prep_summary.json")
    return artifacts


def _ols_cell(result: econ.OlsResult | None) -> dict:
    if result is None:
        return {}
    return {
        "lag": result.lag,
        "alpha": result.alpha, "beta": result.beta, "gamma": result.gamma,
        "se_alpha": result.se_alpha, "se_beta": result.se_beta,
        "se_gamma": result.se_gamma,
        "p_alpha": result.p_alpha, "p_beta": result.p_beta,
        "p_gamma": result.p_gamma,
        "r_squared": result.r_squared, "n_used": result.n_used,
    }


def _stage_ols(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    columns: list[str] = []
    grid: dict[str, list] = {}
    for n in cfg.expansion.n_values:
        for period in cfg.tsprep.ma_periods:
            market = read_series_csv(_need(run_dir, f"market_ma{period}.csv", "ols", "prep"))
            sent = read_series_csv(_need(run_dir, f"sent{n}_ma{period}.csv", "ols", "prep"))
            y, x = align(market, sent)
            cells = econ.coefficient_path(y, x, cfg.econ.i_max)
            column = f"sent{n}_ma{period}"
            columns.append(column)
            grid[column] = [
                {"lag": c.lag, "error": c.error, **_ols_cell(c.result)} for c in cells
            ]
    with (out / "ols_grid.csv").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("lag," + ",".join(columns) + "\n")
        for i in range(cfg.econ.i_max + 1):
            cells = []
            for column in columns:
                cell = grid[column][i]
                if cell["error"] is not None:
                    cells.append("ERR")
                else:
                    cells.append(f"{cell['gamma']:.2f} ({cell['p_gamma']:.2f})")
            fh.write(f"{i}," + ",".join(cells) + "\n")
    _write_json(grid, out / "ols_grid.json")
    return ["ols_grid.csv", "ols_grid.json"]


def _write_var_table(model: econ.VarModel, path: Path) -> None:
    names = model.variable_names
    labels = ["const"] + [f"{name}(-{lag})"
                          for lag in range(1, model.p + 1) for name in names]
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("regressor," + ",".join(names) + "\n")
        for r, label in enumerate(labels):
            coef = ",".join(f"{model.params[r, j]:.6f}" for j in range(model.m))
            se = ",".join(f"({model.se[r, j]:.6f})" for j in range(model.m))
            tstat = ",".join(f"[{model.tstats[r, j]:.4f}]" for j in range(model.m))
            fh.write(f"{label},{coef}\n,{se}\n,{tstat}\n")
        fh.write("r_squared," + ",".join(f"{v:.6f}" for v in model.r_squared) + "\n")
        fh.write("adj_r_squared," + ",".join(f"{v:.6f}" for v in model.adj_r_squared) + "\n")
        fh.write("n_obs," + ",".join(str(model.T_effective) for _ in names) + "\n")


def _write_lag_table(selection: econ.LagSelection, path: Path) -> None:
    chosen = selection.chosen
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("lag,aic,bic,hq\n")
        for lag, aic, bic, hq in selection.rows:
            cells = [str(lag)]
            for criterion, value in (("aic", aic), ("bic", bic), ("hq", hq)):
                star = "*" if chosen.get(criterion) == lag else ""
                cells.append(f"{value:.6f}{star}")
            fh.write(",".join(cells) + "\n")


def _write_granger_table(result: econ.GrangerResult, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("dependent,excluded,chi_sq,df,p_value,error\n")
        for dependent, rows in result.tests.items():
            for row in rows:
                if row.error is not None:
                    fh.write(f"{dependent},{row.excluded},,{row.df},,{row.error}\n")
                else:
                    fh.write(f"{dependent},{row.excluded},{row.chi_sq:.5f},"
                             f"{row.df},{row.p_value:.4f},\n")


def _write_irf_csv(irf: econ.IrfResult, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("horizon,response_var,shock_var,value\n")
        for h in range(irf.horizons + 1):
            for i, response in enumerate(irf.ordering):
                for j, shock in enumerate(irf.ordering):
                    fh.write(f"{h},{response},{shock},{float(irf.responses[h, i, j])!r}\n")


def _stage_var(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    period = cfg.econ.var_ma_period
    loaded = [
        read_series_csv(_need(run_dir, f"{name}_ma{period}.csv", "var", "prep"))
        for name in cfg.econ.ordering
    ]
    series = align(*loaded)
    model = econ.fit_var(series, cfg.econ.var_lag, names=cfg.econ.ordering)
    selection = econ.select_lag(series, cfg.econ.max_lag)
    irf = econ.irf_cholesky(model, cfg.econ.irf_horizons)
    granger = econ.granger_wald(model)
    radius = float(np.abs(np.linalg.eigvals(econ.companion_matrix(model))).max())

    _write_var_table(model, out / "var_coefficients.csv")
    _write_lag_table(selection, out / "lag_selection.csv")
    _write_granger_table(granger, out / "granger.csv")
    _write_irf_csv(irf, out / "irf.csv")
    artifacts = ["var_coefficients.csv", "lag_selection.csv", "granger.csv", "irf.csv"]

    if cfg.econ.irf_bootstrap:
        bands = econ.irf_bootstrap_bands(series, cfg.econ.var_lag,
                                         cfg.econ.irf_horizons,
                                         names=cfg.econ.ordering,
                                         seed=cfg.seed)
        with (out / "irf_bands.csv").open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("horizon,response_var,shock_var,lower,upper\n")
            for h in range(bands.horizons + 1):
                for i, response in enumerate(bands.ordering):
                    for j, shock in enumerate(bands.ordering):
                        fh.write(f"{h},{response},{shock},"
                                 f"{float(bands.lower[h, i, j])!r},"
                                 f"{float(bands.upper[h, i, j])!r}\n")
        artifacts.append("irf_bands.csv")

    summary = {
        "variable_names": list(model.variable_names),
        "p": model.p,
        "T_effective": model.T_effective,
        "ma_period": period,
        "intercept": model.intercept.tolist(),
        "coef": model.coef.tolist(),
        "params": model.params.tolist(),
        "se": model.se.tolist(),
        "tstats": model.tstats.tolist(),
        "r_squared": model.r_squared.tolist(),
        "adj_r_squared": model.adj_r_squared.tolist(),
        "residual_cov": model.residual_cov.tolist(),
        "spectral_radius": radius,
        "stable": radius < 1.0,
        "lag_selection": {
            "rows": [list(row) for row in selection.rows],
            "chosen": selection.chosen,
            "n_used": selection.n_used,
        },
        "granger": {
            dependent: [
                {"excluded": row.excluded, "chi_sq": row.chi_sq, "df": row.df,
                 "p_value": row.p_value, "error": row.error}
                for row in rows
            ]
            for dependent, rows in granger.tests.items()
        },
        "irf_horizons": irf.horizons,
    }
    _write_json(summary, out / "var_summary.json")
    artifacts.append("var_summary.json")
    return artifacts


def _stage_report(cfg: PipelineConfig, run_dir: Path, out: Path) -> list[str]:
    from . import figures

    (out / "figures").mkdir()
    artifacts: list[str] = []

    model = embedding.load_model(_need(run_dir, "embedding.txt", "report", "train"))
    largest_n = max(cfg.expansion.n_values)
    report_path = _need(run_dir, f"expansion_report_n{largest_n}.json", "report", "expand")
    expansion = json.loads(report_path.read_text(encoding="utf-8"))
    expanded_words = {item["word"] for item in expansion["added_words"]}
    figures.embedding_scatter(model, cfg.expansion.seed_word, expanded_words,
                              out / "figures" / "embedding_pca.png")
    artifacts.append("figures/embedding_pca.png")

    for name in cfg.variable_series_names():
        base = read_series_csv(_need(run_dir, f"{name}_normalized.csv", "report", "prep"))
        smoothed = {
            period: read_series_csv(_need(run_dir, f"{name}_ma{period}.csv", "report", "prep"))
            for period in cfg.tsprep.ma_periods
        }
        figures.series_panel(name, base, smoothed, out / "figures" / f"series_{name}.png")
        artifacts.append(f"figures/series_{name}.png")

    grid = json.loads(_need(run_dir, "ols_grid.json", "report", "ols").read_text(encoding="utf-8"))
    figures.ols_path_chart(grid, out / "figures" / "ols_gamma_path.png")
    artifacts.append("figures/ols_gamma_path.png")

    summary = json.loads(_need(run_dir, "var_summary.json", "report", "var").read_text(encoding="utf-8"))
    irf_rows = (_need(run_dir, "irf.csv", "report", "var")
                .read_text(encoding="utf-8").splitlines()[1:])
    figures.irf_grid(summary["variable_names"], irf_rows,
                     out / "figures" / "irf_grid.png")
    artifacts.append("figures/irf_grid.png")
    figures.granger_chart(summary["granger"], out / "figures" / "granger_pvalues.png")
    artifacts.append("figures/granger_pvalues.png")
    return artifacts


_STAGES = {
    "ingest": _stage_ingest,
    "train": _stage_train,
    "expand": _stage_expand,
    "score": _stage_score,
    "prep": _stage_prep,
    "ols": _stage_ols,
    "var": _stage_var,
    "report": _stage_report,
}

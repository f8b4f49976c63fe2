"""Figure rendering for the report stage.

Everything draws from already-written artifacts (model file, series CSVs,
grid/summary JSON), never from live estimation, so the report can be
regenerated without rerunning the pipeline. The Agg backend is forced and
the PNG Software tag stripped so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .embedding import EmbeddingModel, pca_project  # noqa: E402
from .months import MonthlySeries  # noqa: E402

_DPI = 120


def _save(fig, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)


def _month_axis(series: MonthlySeries) -> np.ndarray:
    return np.array([m.year + (m.month - 1) / 12.0 for m in series.months()])


def embedding_scatter(model: EmbeddingModel, seed_word: str,
                      expanded_words: set[str], path: Path,
                      max_words: int = 300) -> None:
    """2-D PCA of the most frequent word vectors, expansion picks highlighted."""
    fig, ax = plt.subplots(figsize=(8, 6))
    words = list(model.vocab.words[:max_words])
    if seed_word in model.vocab and seed_word not in words:
        words.append(seed_word)
    if len(words) < 3 or model.dim < 2:
        ax.text(0.5, 0.5, "vocabulary too small for a PCA view",
                ha="center", va="center", transform=ax.transAxes)
        ax.set_axis_off()
        _save(fig, path)
        return
    vectors = np.array([model.input_vectors[model.vocab[w]] for w in words])
    points = pca_project(vectors)
    hits = np.array([w in expanded_words for w in words])
    ax.scatter(points[~hits, 0], points[~hits, 1], s=10, c="#9aa5b1", label="vocabulary")
    if hits.any():
        ax.scatter(points[hits, 0], points[hits, 1], s=18, c="#c0392b",
                   label="expanded negatives")
    if seed_word in words:
        k = words.index(seed_word)
        ax.scatter([points[k, 0]], [points[k, 1]], s=120, c="#1a355e", marker="*",
                   label=f"seed: {seed_word}")
        ax.annotate(seed_word, points[k], textcoords="offset points", xytext=(6, 6))
    for w, pt in zip(words, points):
        if w in expanded_words and sum(1 for a in ax.texts) < 13:
            ax.annotate(w, pt, textcoords="offset points", xytext=(4, 4), fontsize=7)
    ax.set_title("Word embedding (first two principal components)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def series_panel(name: str, normalized: MonthlySeries,
                 smoothed: dict[int, MonthlySeries], path: Path) -> None:
    """Normalized cycle with each centered-MA overlay for one variable."""
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(_month_axis(normalized), normalized.values, color="#c5ccd6",
            linewidth=0.9, label="normalized cycle")
    for period in sorted(smoothed):
        series = smoothed[period]
        ax.plot(_month_axis(series), series.values, linewidth=1.4, label=f"MA-{period}")
    ax.set_title(f"{name}: normalized cycle and centered moving averages")
    ax.set_xlabel("year")
    ax.legend(fontsize=8, ncol=min(5, 1 + len(smoothed)))
    fig.tight_layout()
    _save(fig, path)


def ols_path_chart(grid: dict[str, list[dict]], path: Path) -> None:
    """Sentiment coefficient by lead lag for every (lexicon, MA) variant."""
    fig, ax = plt.subplots(figsize=(9, 5))
    draw_bands = len(grid) <= 6
    for column in sorted(grid):
        cells = [c for c in grid[column] if c.get("error") is None]
        if not cells:
            continue
        lags = np.array([c["lag"] for c in cells])
        gamma = np.array([c["gamma"] for c in cells])
        se = np.array([c["se_gamma"] for c in cells])
        line, = ax.plot(lags, gamma, marker="o", markersize=3, linewidth=1.2,
                        label=column)
        if draw_bands:
            ax.fill_between(lags, gamma - 2 * se, gamma + 2 * se,
                            color=line.get_color(), alpha=0.15, linewidth=0)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("sentiment lag i (months)")
    ax.set_ylabel("coefficient on lagged sentiment")
    ax.set_title("Lagged-sentiment OLS coefficient path" +
                 (" (±2 s.e.)" if draw_bands else ""))
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    _save(fig, path)


def irf_grid(names: list[str], irf_csv_rows: list[str], path: Path) -> None:
    """m-by-m grid: response of each variable to each orthogonal shock."""
    m = len(names)
    data: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for row in irf_csv_rows:
        if not row.strip():
            continue
        h, response, shock, value = row.split(",")
        data.setdefault((response, shock), []).append((int(h), float(value)))
    fig, axes = plt.subplots(m, m, figsize=(3.2 * m, 2.4 * m),
                             sharex=True, squeeze=False)
    for i, response in enumerate(names):
        for j, shock in enumerate(names):
            ax = axes[i][j]
            pairs = sorted(data.get((response, shock), []))
            if pairs:
                hs, values = zip(*pairs)
                ax.plot(hs, values, linewidth=1.3)
            ax.axhline(0.0, color="black", linewidth=0.7)
            ax.set_title(f"{response} ← shock {shock}", fontsize=8)
            if i == m - 1:
                ax.set_xlabel("horizon")
    fig.suptitle("Orthogonalized impulse responses (Cholesky)", y=0.995)
    fig.tight_layout()
    _save(fig, path)


def granger_chart(granger: dict[str, list[dict]], path: Path) -> None:
    """-log10 p-value per exclusion test, with the 5% reference line."""
    labels = []
    heights = []
    for dependent in sorted(granger):
        for row in granger[dependent]:
            if row.get("error") is not None or row.get("p_value") is None:
                continue
            labels.append(f"{dependent} ← {row['excluded']}")
            heights.append(-math.log10(max(row["p_value"], 1e-300)))
    fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(labels) + 2), 4))
    if labels:
        ax.bar(range(len(labels)), heights, color="#4a6fa5")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    else:
        ax.text(0.5, 0.5, "no testable rows", ha="center", va="center",
                transform=ax.transAxes)
    ax.axhline(-math.log10(0.05), color="#c0392b", linewidth=1.0, linestyle="--",
               label="5% level")
    ax.set_ylabel("-log10 p-value")
    ax.set_title("Granger causality Wald tests")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)

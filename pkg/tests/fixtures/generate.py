"""Regenerate the committed test fixtures (deterministic).

Run from the repository root::

    python3 tests/fixtures/generate.py

Produces, in this directory:
  tiny_corpus.jsonl    200 dated titles, one per month 1995-01..2011-08,
                       with two planted word clusters (crisis / calm)
  tiny_lexicon.tsv     small two-column sentiment lexicon
  tiny_stopwords.txt   function words sprinkled into the titles
  tiny_market.csv      market index responding to lagged title sentiment
  var2_truth.json      known VAR(2) parameters
  var2_market.csv, var2_sent0.csv, var2_sent20.csv
                       400 months simulated from var2_truth.json
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent

CRISIS = ["crisis", "panic", "default", "collapse", "meltdown", "turmoil",
          "slump", "recession", "selloff", "contagion"]
CALM = ["growth", "rally", "boom", "profit", "surge", "record", "expansion",
        "upbeat", "optimism", "recovery"]
FILLER = ["market", "stocks", "bank", "trade", "economy", "policy", "rates",
          "index", "seoul", "exports", "firm", "sector", "earnings", "outlook",
          "investors", "bond", "currency", "oil", "chip", "auto"]
STOPWORDS = ["the", "a", "of", "and", "as", "on", "in", "to", "for", "after"]

LEXICON = [
    ("growth", "2"), ("rally", "1"), ("boom", "2"), ("profit", "1"),
    ("surge", "1"), ("record", "1"), ("optimism", "2"), ("recovery", "1"),
    ("crisis", "-2"), ("panic", "-2"), ("default", "-1"), ("collapse", "-2"),
    ("slump", "-1"), ("recession", "-2"), ("fear", "-1"), ("loss", "-1"),
]

N_MONTHS = 200
START_YEAR, START_MONTH = 1995, 1


def month_of(j: int) -> tuple[int, int]:
    idx = (START_YEAR * 12 + START_MONTH - 1) + j
    return idx // 12, idx % 12 + 1


def make_corpus(rng: np.random.Generator):
    """One title per month; regime follows a slow AR(1) latent state."""
    state = 0.0
    titles = []
    states = []
    days = (3, 11, 17, 24)
    for j in range(N_MONTHS):
        state = 0.8 * state + rng.normal(0, 0.45)
        states.append(state)
        if state < -0.3:
            cluster, k_cluster = CRISIS, int(rng.integers(4, 8))
        elif state > 0.3:
            cluster, k_cluster = CALM, int(rng.integers(4, 8))
        else:
            cluster, k_cluster = CRISIS + CALM, int(rng.integers(1, 4))
        words = list(rng.choice(cluster, size=k_cluster))
        words += list(rng.choice(FILLER, size=int(rng.integers(4, 7))))
        words += list(rng.choice(STOPWORDS, size=int(rng.integers(1, 3))))
        rng.shuffle(words)
        title = " ".join(words)
        if j % 7 == 0:
            title = "[wire] " + title
        if j % 5 == 0:
            title += f" {int(rng.integers(1, 99))}%"
        title = title.replace(" ", ", ", 1) if j % 11 == 0 else title
        year, month = month_of(j)
        titles.append({
            "id": f"t{j:04d}",
            "date": f"{year:04d}-{month:02d}-{days[j % 4]:02d}",
            "title": title,
        })
    return titles, np.array(states)


def make_market(rng: np.random.Generator, states: np.ndarray) -> np.ndarray:
    # the market level: trend + cycle + lag-2 response to the latent state
    values = np.empty(N_MONTHS)
    level = 250.0
    for j in range(N_MONTHS):
        lagged = states[j - 2] if j >= 2 else 0.0
        level += 0.9 + 2.5 * lagged + rng.normal(0, 1.2)
        values[j] = level + 12.0 * np.sin(2 * np.pi * j / 48.0)
    return np.round(values, 2)


def write_series(path: Path, start_j: int, values, year0=None, month0=None):
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("month,value\n")
        for j, v in enumerate(values):
            if year0 is None:
                year, month = month_of(start_j + j)
            else:
                idx = (year0 * 12 + month0 - 1) + start_j + j
                year, month = idx // 12, idx % 12 + 1
            fh.write(f"{year:04d}-{month:02d},{float(v)!r}\n")


def make_var2(rng: np.random.Generator):
    truth = {
        "intercept": [1.0, -0.5, 0.25],
        "B1": [[0.5, 0.1, 0.0], [0.0, 0.4, 0.1], [0.1, 0.0, 0.3]],
        "B2": [[0.3, 0.0, 0.05], [0.05, 0.3, 0.0], [0.0, 0.05, 0.3]],
        "innov_chol": [[1.0, 0.0, 0.0], [0.3, 0.8, 0.0], [-0.2, 0.1, 0.6]],
        "names": ["market", "sent0", "sent20"],
        "T": 500,
    }
    coef = np.array([truth["B1"], truth["B2"]])
    chol = np.array(truth["innov_chol"])
    intercept = np.array(truth["intercept"])
    total = truth["T"] + 200
    shocks = rng.standard_normal((total, 3)) @ chol.T
    out = np.zeros((total + 2, 3))
    for t in range(2, total + 2):
        out[t] = intercept + shocks[t - 2] + coef[0] @ out[t - 1] + coef[1] @ out[t - 2]
    data = out[2 + 200:]
    return truth, data


def main() -> None:
    rng = np.random.default_rng(20240613)
    titles, states = make_corpus(rng)
    with (HERE / "tiny_corpus.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
        for rec in titles:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    with (HERE / "tiny_lexicon.tsv").open("w", encoding="utf-8", newline="\n") as fh:
        for word, polarity in LEXICON:
            fh.write(f"{word}\t{polarity}\n")
    with (HERE / "tiny_stopwords.txt").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(STOPWORDS) + "\n")
    write_series(HERE / "tiny_market.csv", 0, make_market(rng, states))

    truth, data = make_var2(rng)
    (HERE / "var2_truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for j, name in enumerate(truth["names"]):
        write_series(HERE / f"var2_{name}.csv", 0, data[:, j],
                     year0=1990, month0=1)
    print(f"wrote fixtures to {HERE}")


if __name__ == "__main__":
    main()

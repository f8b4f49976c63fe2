"""Shared fixtures: bundled data paths, a small trained model, helpers."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from sentindex import Corpus, NewsRecord, TrainConfig, ingest_jsonl, train_skipgram

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log() -> list[str]:
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def tiny_corpus() -> Corpus:
    from sentindex import load_stopwords

    stopwords = load_stopwords(FIXTURES / "tiny_stopwords.txt")
    corpus, rejections = ingest_jsonl(FIXTURES / "tiny_corpus.jsonl", stopwords)
    assert not rejections
    return corpus


@pytest.fixture(scope="session")
def tiny_model(tiny_corpus):
    """Skip-gram model on the bundled corpus; small but trained for real."""
    config = TrainConfig(dim=16, window=4, min_count=3, epochs=40,
                         negative=5, initial_lr=0.05, seed=11)
    return train_skipgram(tiny_corpus, config)


@pytest.fixture(scope="session")
def var2_truth() -> dict:
    return json.loads((FIXTURES / "var2_truth.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """One full pipeline run on the bundled corpus, shared across modules."""
    from types import SimpleNamespace

    from sentindex.config import build_config
    from sentindex.pipeline import run_all

    base = tmp_path_factory.mktemp("pipeline")
    raw = {
        "paths": {
            "corpus": str(FIXTURES / "tiny_corpus.jsonl"),
            "lexicon": str(FIXTURES / "tiny_lexicon.tsv"),
            "market": str(FIXTURES / "tiny_market.csv"),
            "stopwords": str(FIXTURES / "tiny_stopwords.txt"),
            "out": str(base / "out"),
        },
        "embedding": {"dim": 16, "window": 4, "min_count": 3, "epochs": 30,
                      "negative": 5, "initial_lr": 0.05},
        "expansion": {"seed_word": "crisis", "n_values": [0, 20]},
        "econ": {"i_max": 6, "var_lag": 2, "max_lag": 6, "irf_horizons": 12,
                 "ordering": ["market", "sent0", "sent20"], "var_ma_period": 12},
        "seed": 3,
    }
    config_path = base / "config.json"
    config_path.write_text(json.dumps(raw, indent=2), encoding="utf-8")
    cfg = build_config(raw, base)
    run_dir, artifacts = run_all(cfg)
    return SimpleNamespace(cfg=cfg, raw=raw, config_path=config_path,
                           run_dir=run_dir, artifacts=artifacts)


def make_corpus(token_lists, start=(2000, 1)) -> Corpus:
    """Corpus with one record per month from explicit token lists."""
    from datetime import date

    year, month = start
    records = []
    for j, tokens in enumerate(token_lists):
        idx = (year * 12 + month - 1) + j
        records.append(NewsRecord(
            id=f"r{j:04d}",
            date=date(idx // 12, idx % 12 + 1, 15),
            raw_title=" ".join(tokens),
            tokens=tuple(tokens),
        ))
    return Corpus(tuple(records))


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

"""News-sentiment index construction and market-response analysis.

The package turns a JSONL corpus of dated news titles into monthly
sentiment indices via lexicon matching, expands the lexicon's negative
side with skip-gram embedding neighbors, prepares the series with an HP
filter / normalization / moving-average chain, and estimates lagged OLS,
VAR, impulse-response and Granger-causality results against a market
index. The `sentindex` CLI drives the whole chain from one JSON config.
"""

from .corpus import (
    CleaningRules,
    Corpus,
    CorpusStats,
    LineRejection,
    NewsRecord,
    clean_title,
    ingest_jsonl,
    load_stopwords,
    summarize,
    tokenize,
    write_tokens_jsonl,
)
from .econ import (
    GrangerResult,
    GrangerRow,
    IrfResult,
    LagSelection,
    OlsResult,
    VarModel,
    coefficient_path,
    fit_ols_ar1x,
    fit_var,
    granger_wald,
    irf_cholesky,
    select_lag,
    simulate_var,
)
from .embedding import (
    EmbeddingModel,
    TrainConfig,
    Vocabulary,
    build_vocab,
    cosine_similarity,
    load_model,
    pca_project,
    save_model,
    top_k_similar,
    train_skipgram,
)
from .errors import (
    ConfigError,
    EstimationError,
    LexiconLoadError,
    OutOfVocabularyError,
    SentIndexError,
    TrainingError,
)
from .lexicon import (
    ExpansionReport,
    LexiconEntry,
    SentimentLexicon,
    expand_negative,
    load_lexicon,
    save_lexicon,
)
from .months import Month, MonthlySeries, align, aligned, read_series_csv, write_series_csv
from .sentiment import MatchTotals, TitleScore, corpus_match_totals, monthly_index, score_title
from .tsprep import (
    AdfResult,
    HpResult,
    SeriesStats,
    adf_test,
    centered_ma,
    describe,
    hp_filter,
    minmax_normalize,
    prep_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "AdfResult", "CleaningRules", "ConfigError", "Corpus", "CorpusStats",
    "EmbeddingModel", "EstimationError", "ExpansionReport", "GrangerResult",
    "GrangerRow", "HpResult", "IrfResult", "LagSelection", "LexiconEntry",
    "LexiconLoadError", "LineRejection", "MatchTotals", "Month",
    "MonthlySeries", "NewsRecord", "OlsResult", "OutOfVocabularyError",
    "SentIndexError", "SentimentLexicon", "SeriesStats", "TitleScore",
    "TrainConfig", "TrainingError", "VarModel", "Vocabulary", "adf_test",
    "align", "aligned", "build_vocab", "centered_ma", "clean_title",
    "coefficient_path", "corpus_match_totals", "cosine_similarity",
    "describe", "expand_negative", "fit_ols_ar1x", "fit_var", "granger_wald",
    "hp_filter", "ingest_jsonl", "irf_cholesky", "load_lexicon", "load_model",
    "load_stopwords", "minmax_normalize", "monthly_index", "pca_project",
    "prep_pipeline", "read_series_csv", "save_lexicon", "save_model",
    "score_title", "select_lag", "simulate_var", "summarize", "tokenize",
    "top_k_similar", "train_skipgram", "write_series_csv",
    "write_tokens_jsonl",
]

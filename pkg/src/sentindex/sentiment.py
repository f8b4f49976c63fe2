"""Per-title sentiment scores and monthly index construction.

A title's score is the count of positive-word instances minus the count of
negative-word instances (+1/-1 per occurrence, repeats included). Monthly
indices sum the scores of all titles in each calendar month, with empty
months filled with 0 so the series stays gap-free for filtering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .lexicon import SentimentLexicon
from .months import Month, MonthlySeries


@dataclass(frozen=True)
class TitleScore:
    record_id: str
    positive: int
    negative: int

    @property
    def score(self) -> int:
        return self.positive - self.negative


@dataclass(frozen=True)
class MatchTotals:
    total_positive: int
    total_negative: int
    lexicon_label: str

    @property
    def total_score(self) -> int:
        return self.total_positive - self.total_negative

    def to_json(self) -> str:
        return json.dumps(
            {
                "lexicon_label": self.lexicon_label,
                "total_positive": self.total_positive,
                "total_negative": self.total_negative,
                "total_score": self.total_score,
            },
            indent=2, sort_keys=True,
        )


def score_title(tokens, lexicon: SentimentLexicon, record_id: str = "") -> TitleScore:
    """Instance counts of lexicon hits in one token list."""
    p = 0
    n = 0
    for tok in tokens:
        if tok in lexicon.positives:
            p += 1
        elif tok in lexicon.negatives:
            n += 1
    return TitleScore(record_id, p, n)


def corpus_match_totals(corpus: Corpus, lexicon: SentimentLexicon,
                        label: str = "") -> MatchTotals:
    """Corpus-wide positive/negative matching totals for one lexicon."""
    total_p = 0
    total_n = 0
    for rec in corpus.records:
        ts = score_title(rec.tokens, lexicon, rec.id)
        total_p += ts.positive
        total_n += ts.negative
    return MatchTotals(total_p, total_n, label)


def monthly_index(corpus: Corpus, lexicon: SentimentLexicon) -> MonthlySeries:
    """Sum of title scores per month from the first to the last corpus month.

    Months without articles contribute 0. Raises ValueError on an empty
    corpus.
    """
    if not corpus.records:
        raise ValueError("cannot build a monthly index from an empty corpus")
    first = Month.of(corpus.records[0].date)
    last = Month.of(corpus.records[-1].date)
    values = np.zeros(last.diff(first) + 1)
    for rec in corpus.records:
        values[Month.of(rec.date).diff(first)] += score_title(rec.tokens, lexicon).score
    return MonthlySeries(first, values)


def months_without_articles(corpus: Corpus) -> int:
    """How many months inside the corpus span the zero-fill rule touched."""
    if not corpus.records:
        return 0
    first = Month.of(corpus.records[0].date)
    last = Month.of(corpus.records[-1].date)
    seen = {Month.of(rec.date).index for rec in corpus.records}
    return (last.diff(first) + 1) - len(seen)

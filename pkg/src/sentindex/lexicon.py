"""Sentiment lexicon loading and embedding-driven negative expansion.

Lexicon files are UTF-8 TSV, ``word<TAB>polarity`` with polarity an integer
in [-2, 2] or one of POS/NEG/NEUT; a third provenance column (base/expanded)
is accepted and written back out. Expansion takes the top-n cosine
neighbors of a seed word and adds those not already carrying a base
polarity to the negative side, tagged ``expanded``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .embedding import EmbeddingModel, top_k_similar
from .errors import LexiconLoadError, OutOfVocabularyError

log = logging.getLogger(__name__)

_LABELS = {"POS": 1, "NEG": -1, "NEUT": 0}

BASE = "base"
EXPANDED = "expanded"


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    polarity_label: str     # literal second column, preserved for write-out
    sign: int               # +1 positive, -1 negative
    provenance: str         # "base" or "expanded"


@dataclass(frozen=True)
class SentimentLexicon:
    entries: tuple[LexiconEntry, ...]
    multiword_skipped: int = 0
    positives: frozenset[str] = field(init=False)
    negatives: frozenset[str] = field(init=False)

    def __post_init__(self):
        pos = frozenset(e.word for e in self.entries if e.sign > 0)
        neg = frozenset(e.word for e in self.entries if e.sign < 0)
        overlap = pos & neg
        if overlap:
            raise LexiconLoadError(f"words in both polarity sets: {sorted(overlap)[:5]}")
        object.__setattr__(self, "positives", pos)
        object.__setattr__(self, "negatives", neg)

    def provenance_of(self, word: str) -> str | None:
        for e in self.entries:
            if e.word == word:
                return e.provenance
        return None

    @property
    def provenance(self) -> dict[str, str]:
        return {e.word: e.provenance for e in self.entries}


@dataclass(frozen=True)
class ExpansionReport:
    seed: str
    requested_n: int
    candidates_examined: int
    overlaps_excluded: int
    overlaps_negative: int
    overlaps_positive: int
    added: int
    added_words: tuple[tuple[str, float], ...]   # descending similarity
    clamped: bool
    negative_share: float                        # |negatives| / (|negatives|+|positives|)

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "requested_n": self.requested_n,
            "candidates_examined": self.candidates_examined,
            "overlaps_excluded": self.overlaps_excluded,
            "overlaps_negative": self.overlaps_negative,
            "overlaps_positive": self.overlaps_positive,
            "added": self.added,
            "added_words": [{"word": w, "similarity": s} for w, s in self.added_words],
            "clamped": self.clamped,
            "negative_share": self.negative_share,
        }
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)


def _parse_polarity(token: str) -> int | None:
    """Sign for a polarity cell, None when malformed."""
    if token in _LABELS:
        return _LABELS[token]
    try:
        value = int(token)
    except ValueError:
        return None
    if not -2 <= value <= 2:
        return None
    return 0 if value == 0 else (1 if value > 0 else -1)


def load_lexicon(path: str | Path) -> SentimentLexicon:
    """Parse a lexicon TSV; all malformed lines and polarity conflicts are
    collected and raised together."""
    path = Path(path)
    entries: list[LexiconEntry] = []
    seen_sign: dict[str, int] = {}
    problems: list[str] = []
    conflicts: dict[str, set[int]] = {}
    multiword = 0
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cells = line.split("\t")
            if len(cells) not in (2, 3):
                problems.append(f"line {line_no}: expected 2 or 3 tab-separated fields")
                continue
            word = cells[0]
            if not word.strip():
                problems.append(f"line {line_no}: empty word")
                continue
            sign = _parse_polarity(cells[1].strip())
            if sign is None:
                problems.append(f"line {line_no}: bad polarity {cells[1]!r}")
                continue
            provenance = BASE
            if len(cells) == 3:
                provenance = cells[2].strip()
                if provenance not in (BASE, EXPANDED):
                    problems.append(f"line {line_no}: bad provenance {cells[2]!r}")
                    continue
            if len(word.split()) > 1:
                multiword += 1
                continue
            if sign == 0:
                continue
            prior = seen_sign.get(word)
            if prior is None:
                seen_sign[word] = sign
                entries.append(LexiconEntry(word, cells[1], sign, provenance))
            elif prior != sign:
                conflicts.setdefault(word, set()).update((prior, sign))
            # same-sign duplicate: first entry wins
    if conflicts:
        listing = ", ".join(sorted(conflicts))
        problems.append(f"conflicting polarity for: {listing}")
    if problems:
        raise LexiconLoadError(f"{path}: " + "; ".join(problems))
    if multiword:
        log.warning("%s: skipped %d multi-word entries (single-token matching only)",
                    path, multiword)
    return SentimentLexicon(tuple(entries), multiword_skipped=multiword)


def save_lexicon(lexicon: SentimentLexicon, path: str | Path) -> None:
    """Write entries in order as word<TAB>polarity<TAB>provenance."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for e in lexicon.entries:
            fh.write(f"{e.word}\t{e.polarity_label}\t{e.provenance}\n")


def expand_negative(
    model: EmbeddingModel,
    seed: str,
    n: int,
    base: SentimentLexicon,
) -> tuple[SentimentLexicon, ExpansionReport]:
    """Add the top-n embedding neighbors of `seed` to the negative side.

    Neighbors already present in either base polarity set are excluded and
    counted as overlaps; the base lexicon object is not modified. n larger
    than V-1 is clamped and flagged in the report.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 0 and seed not in model.vocab:
        raise OutOfVocabularyError(seed)

    v_minus_one = max(len(model.vocab) - 1, 0)
    n_eff = min(n, v_minus_one)
    clamped = n_eff < n
    ranked = top_k_similar(model, seed, n_eff) if n_eff > 0 else []

    overlaps_neg = sum(1 for w, _ in ranked if w in base.negatives)
    overlaps_pos = sum(1 for w, _ in ranked if w in base.positives)
    added_words = tuple((w, s) for w, s in ranked
                        if w not in base.negatives and w not in base.positives)

    new_entries = base.entries + tuple(
        LexiconEntry(w, "-1", -1, EXPANDED) for w, _ in added_words
    )
    expanded = SentimentLexicon(new_entries, multiword_skipped=base.multiword_skipped)
    n_neg = len(expanded.negatives)
    n_pos = len(expanded.positives)
    report = ExpansionReport(
        seed=seed,
        requested_n=n,
        candidates_examined=n_eff,
        overlaps_excluded=overlaps_neg + overlaps_pos,
        overlaps_negative=overlaps_neg,
        overlaps_positive=overlaps_pos,
        added=len(added_words),
        added_words=added_words,
        clamped=clamped,
        negative_share=n_neg / (n_neg + n_pos) if (n_neg + n_pos) else 0.0,
    )
    return expanded, report

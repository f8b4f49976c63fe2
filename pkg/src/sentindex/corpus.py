"""News-title ingestion, cleaning and tokenization.

Input is JSON Lines, one object per line::

    {"id": "...", "date": "YYYY-MM-DD", "title": "...", "tokens": ["..."]}

``id`` and ``tokens`` are optional. Records carrying ``tokens`` are taken as
pre-tokenized (cleaning and whitespace tokenization are skipped); empty
strings and configured stop-words are still removed so the record invariant
holds either way. Lines that cannot be parsed are rejected with a reason,
never silently coerced.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .errors import ConfigError

# Bracketed source tags, punctuation, digit-only tokens. Overridable via a
# JSON rules file; removal-type rules keep cleaning idempotent.
DEFAULT_CLEANING_RULES: list[tuple[str, str]] = [
    (r"\[[^\]]*\]", " "),
    (r"[^\w\s]|_", " "),
    (r"\b\d+\b", " "),
]


@dataclass(frozen=True)
class NewsRecord:
    id: str
    date: date
    raw_title: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    records: tuple[NewsRecord, ...]
    stopwords: frozenset[str] = frozenset()

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class LineRejection:
    line_no: int
    reason: str


class CleaningRules:
    """Ordered pattern -> replacement rules, compiled once at load time."""

    def __init__(self, rules: list[tuple[str, str]] | None = None):
        if rules is None:
            rules = DEFAULT_CLEANING_RULES
        compiled = []
        for pattern, replace in rules:
            try:
                compiled.append((re.compile(pattern), replace))
            except re.error as exc:
                raise ConfigError(f"invalid cleaning pattern {pattern!r}: {exc}") from exc
        self._rules = compiled

    def apply(self, text: str) -> str:
        for pattern, replace in self._rules:
            text = pattern.sub(replace, text)
        return text

    @classmethod
    def from_json_file(cls, path: str | Path) -> "CleaningRules":
        with Path(path).open("r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, list):
            raise ConfigError(f"{path}: cleaning rules must be a JSON array")
        rules = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or "pattern" not in item or "replace" not in item:
                raise ConfigError(f"{path}: rule {i} must be an object with 'pattern' and 'replace'")
            rules.append((str(item["pattern"]), str(item["replace"])))
        return cls(rules)


def clean_title(text: str, rules: CleaningRules) -> str:
    """Apply the cleaning rules in order."""
    return rules.apply(text)


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Whitespace segmentation of a cleaned title, minus stop-words."""
    return [tok for tok in text.split() if tok not in stopwords]


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line; blank lines ignored."""
    with Path(path).open("r", encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def ingest_jsonl(
    path: str | Path,
    stopwords: frozenset[str] = frozenset(),
    rules: CleaningRules | None = None,
    date_min: date | None = None,
    date_max: date | None = None,
) -> tuple[Corpus, list[LineRejection]]:
    """Read a JSONL corpus file into a date-sorted Corpus.

    Returns the corpus plus a rejection report (line number, reason) for
    every skipped line. Unreadable files raise OSError; bad lines are
    rejected, not fatal.
    """
    if rules is None:
        rules = CleaningRules()
    records: list[NewsRecord] = []
    rejections: list[LineRejection] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                rejections.append(LineRejection(line_no, f"malformed JSON: {exc.msg}"))
                continue
            if not isinstance(obj, dict):
                rejections.append(LineRejection(line_no, "line is not a JSON object"))
                continue
            if "date" not in obj:
                rejections.append(LineRejection(line_no, "missing 'date'"))
                continue
            try:
                day = date.fromisoformat(str(obj["date"]))
            except ValueError:
                rejections.append(LineRejection(line_no, f"unparseable date: {obj['date']!r}"))
                continue
            if date_min is not None and day < date_min:
                rejections.append(LineRejection(line_no, f"date {day} before corpus range"))
                continue
            if date_max is not None and day > date_max:
                rejections.append(LineRejection(line_no, f"date {day} after corpus range"))
                continue
            if "tokens" in obj:
                raw_tokens = obj["tokens"]
                if not isinstance(raw_tokens, list) or not all(isinstance(t, str) for t in raw_tokens):
                    rejections.append(LineRejection(line_no, "'tokens' must be a list of strings"))
                    continue
                tokens = tuple(t for t in raw_tokens if t and t not in stopwords)
                raw_title = str(obj.get("title", ""))
            elif "title" in obj:
                raw_title = str(obj["title"])
                tokens = tuple(tokenize(clean_title(raw_title, rules), stopwords))
            else:
                rejections.append(LineRejection(line_no, "missing both 'title' and 'tokens'"))
                continue
            rec_id = str(obj.get("id", f"line-{line_no}"))
            records.append(NewsRecord(rec_id, day, raw_title, tokens))
    records.sort(key=lambda r: r.date)  # stable: input order kept within a day
    return Corpus(tuple(records), stopwords), rejections


@dataclass(frozen=True)
class CorpusStats:
    n_records: int
    total_tokens: int
    unique_tokens: int
    mean_tokens: float
    max_tokens: int


def summarize(corpus: Corpus) -> CorpusStats:
    """Token-count summary; unique and total counts reported separately."""
    total = 0
    longest = 0
    vocab: set[str] = set()
    for rec in corpus.records:
        total += len(rec.tokens)
        longest = max(longest, len(rec.tokens))
        vocab.update(rec.tokens)
    n = len(corpus.records)
    return CorpusStats(
        n_records=n,
        total_tokens=total,
        unique_tokens=len(vocab),
        mean_tokens=total / n if n else 0.0,
        max_tokens=longest,
    )


def write_tokens_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Persist the tokenized corpus (one record per line, date-sorted)."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for rec in corpus.records:
            fh.write(json.dumps(
                {"id": rec.id, "date": rec.date.isoformat(), "tokens": list(rec.tokens)},
                ensure_ascii=False, sort_keys=True,
            ))
            fh.write("\n")

"""Exception types shared across the package.

Plain ValueError is used for numeric-domain violations (bad series length,
bad lambda, ...); the classes here mark failures a caller may want to catch
separately.
"""


class SentIndexError(Exception):
    """Base class for package-specific failures."""


class ConfigError(SentIndexError):
    """Invalid configuration: bad patterns, missing paths, bad field values."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class LexiconLoadError(SentIndexError):
    """Malformed lexicon file or conflicting polarity entries."""


class OutOfVocabularyError(SentIndexError, LookupError):
    """A queried word is not in the embedding vocabulary."""

    def __init__(self, word: str):
        self.word = word
        super().__init__(f"word not in vocabulary: {word!r}")


class TrainingError(SentIndexError):
    """Embedding training cannot proceed or diverged."""


class EstimationError(SentIndexError):
    """A regression/decomposition step failed (rank deficiency, non-PD covariance)."""

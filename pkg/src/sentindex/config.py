"""Pipeline configuration: one JSON file, validated with field-level messages.

Every run is fully described by a PipelineConfig. CLI flags (--seed,
--workers, --out) override the corresponding config keys; relative input
paths are resolved against the config file's directory so a config and
its data can move together.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .embedding import TrainConfig
from .errors import ConfigError

_PREP_STAGES = ("hp", "minmax", "ma")


@dataclass(frozen=True)
class PathsConfig:
    corpus: Path
    lexicon: Path
    market: Path
    out: Path
    stopwords: Path | None = None
    cleaning_rules: Path | None = None


@dataclass(frozen=True)
class CorpusConfig:
    date_min: date | None = None
    date_max: date | None = None


@dataclass(frozen=True)
class ExpansionConfig:
    seed_word: str = "crisis"
    n_values: tuple[int, ...] = (0, 100, 500, 1000)


@dataclass(frozen=True)
class TsPrepConfig:
    lam: float = 14400.0
    ma_periods: tuple[int, ...] = (1, 3, 6, 12)
    order: tuple[str, ...] = _PREP_STAGES


@dataclass(frozen=True)
class EconConfig:
    i_max: int = 8
    var_lag: int = 4
    max_lag: int = 12
    irf_horizons: int = 24
    ordering: tuple[str, ...] = ("market", "sent0", "sent1000")
    var_ma_period: int = 12
    irf_bootstrap: bool = False


@dataclass(frozen=True)
class PipelineConfig:
    paths: PathsConfig
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    embedding: TrainConfig = field(default_factory=TrainConfig)
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    tsprep: TsPrepConfig = field(default_factory=TsPrepConfig)
    econ: EconConfig = field(default_factory=EconConfig)
    seed: int = 0
    workers: int = 1

    def canonical_dict(self) -> dict:
        """JSON-ready dict with resolved paths; the identity of a run."""
        def path_str(p: Path | None):
            return None if p is None else str(p)
        return {
            "paths": {
                "corpus": path_str(self.paths.corpus),
                "lexicon": path_str(self.paths.lexicon),
                "market": path_str(self.paths.market),
                "out": path_str(self.paths.out),
                "stopwords": path_str(self.paths.stopwords),
                "cleaning_rules": path_str(self.paths.cleaning_rules),
            },
            "corpus": {
                "date_min": None if self.corpus.date_min is None else self.corpus.date_min.isoformat(),
                "date_max": None if self.corpus.date_max is None else self.corpus.date_max.isoformat(),
            },
            "embedding": {
                "dim": self.embedding.dim,
                "window": self.embedding.window,
                "min_count": self.embedding.min_count,
                "epochs": self.embedding.epochs,
                "negative": self.embedding.negative,
                "initial_lr": self.embedding.initial_lr,
            },
            "expansion": {
                "seed_word": self.expansion.seed_word,
                "n_values": list(self.expansion.n_values),
            },
            "tsprep": {
                "lam": self.tsprep.lam,
                "ma_periods": list(self.tsprep.ma_periods),
                "order": list(self.tsprep.order),
            },
            "econ": {
                "i_max": self.econ.i_max,
                "var_lag": self.econ.var_lag,
                "max_lag": self.econ.max_lag,
                "irf_horizons": self.econ.irf_horizons,
                "ordering": list(self.econ.ordering),
                "var_ma_period": self.econ.var_ma_period,
                "irf_bootstrap": self.econ.irf_bootstrap,
            },
            "seed": self.seed,
            "workers": self.workers,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def run_dir(self) -> Path:
        return self.paths.out / f"run-{self.config_hash()[:12]}"

    def variable_series_names(self) -> list[str]:
        """All series the prep stage produces: market plus one per lexicon n."""
        return ["market"] + [f"sent{n}" for n in self.expansion.n_values]


class _Section:
    """Typed key extraction from one config sub-dict, collecting problems."""

    def __init__(self, name: str, raw: dict, known: set[str], problems: list[str]):
        self.name = name
        self.raw = raw
        self.problems = problems
        for key in raw:
            if key not in known:
                prefix = f"{name}.{key}" if name else key
                problems.append(f"{prefix}: unknown key")

    def _fail(self, key: str, message: str) -> None:
        prefix = f"{self.name}.{key}" if self.name else key
        self.problems.append(f"{prefix}: {message}")

    def get(self, key: str, default):
        return self.raw.get(key, default)

    def get_int(self, key: str, default: int, minimum: int | None = None) -> int:
        value = self.raw.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            self._fail(key, f"expected an integer, got {value!r}")
            return default
        if minimum is not None and value < minimum:
            self._fail(key, f"must be >= {minimum}, got {value}")
            return default
        return value

    def get_number(self, key: str, default: float, minimum: float | None = None) -> float:
        value = self.raw.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self._fail(key, f"expected a number, got {value!r}")
            return default
        if minimum is not None and value < minimum:
            self._fail(key, f"must be >= {minimum}, got {value}")
            return default
        return float(value)

    def get_bool(self, key: str, default: bool) -> bool:
        value = self.raw.get(key, default)
        if not isinstance(value, bool):
            self._fail(key, f"expected true/false, got {value!r}")
            return default
        return value

    def get_str(self, key: str, default: str | None, required: bool = False) -> str | None:
        value = self.raw.get(key, default)
        if value is None:
            if required:
                self._fail(key, "required")
            return None
        if not isinstance(value, str) or not value:
            self._fail(key, f"expected a non-empty string, got {value!r}")
            return default
        return value

    def get_int_list(self, key: str, default: tuple[int, ...],
                     minimum: int = 0) -> tuple[int, ...]:
        value = self.raw.get(key, list(default))
        if (not isinstance(value, list) or not value
                or any(isinstance(v, bool) or not isinstance(v, int) for v in value)):
            self._fail(key, f"expected a non-empty list of integers, got {value!r}")
            return default
        if any(v < minimum for v in value):
            self._fail(key, f"every entry must be >= {minimum}, got {value!r}")
            return default
        if len(set(value)) != len(value):
            self._fail(key, f"entries must be distinct, got {value!r}")
            return default
        return tuple(value)

    def get_str_list(self, key: str, default: tuple[str, ...]) -> tuple[str, ...]:
        value = self.raw.get(key, list(default))
        if (not isinstance(value, list) or not value
                or any(not isinstance(v, str) for v in value)):
            self._fail(key, f"expected a non-empty list of strings, got {value!r}")
            return default
        return tuple(value)

    def get_date(self, key: str) -> date | None:
        value = self.raw.get(key)
        if value is None:
            return None
        try:
            return date.fromisoformat(value)
        except (TypeError, ValueError):
            self._fail(key, f"expected an ISO date (YYYY-MM-DD), got {value!r}")
            return None


def _subdict(raw: dict, key: str, problems: list[str]) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        problems.append(f"{key}: expected an object, got {value!r}")
        return {}
    return value


def build_config(raw: dict, base_dir: Path,
                 overrides: dict | None = None) -> PipelineConfig:
    """Validate a parsed config dict; raise ConfigError listing every problem.

    `overrides` may carry CLI-supplied seed/workers/out values, which win
    over the file's keys.
    """
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["config root must be a JSON object"])
    overrides = overrides or {}

    known_top = {"paths", "corpus", "embedding", "expansion", "tsprep", "econ",
                 "seed", "workers"}
    for key in raw:
        if key not in known_top:
            problems.append(f"{key}: unknown key")

    top = _Section("", dict(raw), known_top | set(raw), problems)
    paths_sec = _Section("paths", _subdict(raw, "paths", problems),
                         {"corpus", "lexicon", "market", "out", "stopwords",
                          "cleaning_rules"}, problems)
    corpus_sec = _Section("corpus", _subdict(raw, "corpus", problems),
                          {"date_min", "date_max"}, problems)
    emb_sec = _Section("embedding", _subdict(raw, "embedding", problems),
                       {"dim", "window", "min_count", "epochs", "negative",
                        "initial_lr"}, problems)
    exp_sec = _Section("expansion", _subdict(raw, "expansion", problems),
                       {"seed_word", "n_values"}, problems)
    ts_sec = _Section("tsprep", _subdict(raw, "tsprep", problems),
                      {"lam", "ma_periods", "order"}, problems)
    econ_sec = _Section("econ", _subdict(raw, "econ", problems),
                        {"i_max", "var_lag", "max_lag", "irf_horizons",
                         "ordering", "var_ma_period", "irf_bootstrap"}, problems)

    def resolve(key: str, required: bool) -> Path | None:
        text = paths_sec.get_str(key, None, required=required)
        if text is None:
            return None
        path = Path(text)
        if not path.is_absolute():
            path = base_dir / path
        return path

    corpus_path = resolve("corpus", required=True)
    lexicon_path = resolve("lexicon", required=True)
    market_path = resolve("market", required=True)
    out_path = resolve("out", required=False) or (base_dir / "out")
    stopwords_path = resolve("stopwords", required=False)
    rules_path = resolve("cleaning_rules", required=False)
    if "out" in overrides and overrides["out"] is not None:
        out_path = Path(overrides["out"])
    for label, path in (("corpus", corpus_path), ("lexicon", lexicon_path),
                        ("market", market_path), ("stopwords", stopwords_path),
                        ("cleaning_rules", rules_path)):
        if path is not None and not path.is_file():
            problems.append(f"paths.{label}: file not found: {path}")

    date_min = corpus_sec.get_date("date_min")
    date_max = corpus_sec.get_date("date_max")
    if date_min and date_max and date_min > date_max:
        problems.append("corpus.date_min: must not be after corpus.date_max")

    seed = top.get_int("seed", 0, minimum=0)
    workers = top.get_int("workers", 1, minimum=1)
    if "seed" in overrides and overrides["seed"] is not None:
        seed = int(overrides["seed"])
        if seed < 0:
            problems.append("seed: must be >= 0")
    if "workers" in overrides and overrides["workers"] is not None:
        workers = int(overrides["workers"])
        if workers < 1:
            problems.append("workers: must be >= 1")

    emb_kwargs = dict(
        dim=emb_sec.get_int("dim", 100, minimum=1),
        window=emb_sec.get_int("window", 10, minimum=1),
        min_count=emb_sec.get_int("min_count", 10, minimum=1),
        epochs=emb_sec.get_int("epochs", 300, minimum=1),
        negative=emb_sec.get_int("negative", 5, minimum=0),
        initial_lr=emb_sec.get_number("initial_lr", 0.025),
    )
    if emb_kwargs["initial_lr"] <= 0:
        problems.append("embedding.initial_lr: must be > 0")
        emb_kwargs["initial_lr"] = 0.025

    seed_word = exp_sec.get_str("seed_word", "crisis") or "crisis"
    n_values = exp_sec.get_int_list("n_values", (0, 100, 500, 1000), minimum=0)

    lam = ts_sec.get_number("lam", 14400.0, minimum=0.0)
    ma_periods = ts_sec.get_int_list("ma_periods", (1, 3, 6, 12), minimum=1)
    order = ts_sec.get_str_list("order", _PREP_STAGES)
    if sorted(order) != sorted(_PREP_STAGES):
        problems.append(f"tsprep.order: must be a permutation of {list(_PREP_STAGES)}, "
                        f"got {list(order)!r}")
        order = _PREP_STAGES
    elif order[-1] != "ma":
        problems.append("tsprep.order: 'ma' must come last (it fans out per period)")
        order = _PREP_STAGES

    i_max = econ_sec.get_int("i_max", 8, minimum=0)
    var_lag = econ_sec.get_int("var_lag", 4, minimum=1)
    max_lag = econ_sec.get_int("max_lag", 12, minimum=0)
    irf_horizons = econ_sec.get_int("irf_horizons", 24, minimum=0)
    var_ma_period = econ_sec.get_int("var_ma_period", 12, minimum=1)
    irf_bootstrap = econ_sec.get_bool("irf_bootstrap", False)
    ordering = econ_sec.get_str_list("ordering", ("market", "sent0", "sent1000"))
    valid_names = {"market"} | {f"sent{n}" for n in n_values}
    if len(set(ordering)) != len(ordering):
        problems.append(f"econ.ordering: names must be distinct, got {list(ordering)!r}")
    for name in ordering:
        if name not in valid_names:
            problems.append(f"econ.ordering: {name!r} is not 'market' or a "
                            f"configured sentiment series {sorted(valid_names - {'market'})}")
    if len(ordering) < 2:
        problems.append("econ.ordering: need at least two variables for a VAR")
    if var_ma_period not in ma_periods:
        problems.append(f"econ.var_ma_period: {var_ma_period} is not one of "
                        f"tsprep.ma_periods {list(ma_periods)}")

    if problems:
        raise ConfigError(problems)

    return PipelineConfig(
        paths=PathsConfig(corpus=corpus_path, lexicon=lexicon_path,
                          market=market_path, out=out_path,
                          stopwords=stopwords_path, cleaning_rules=rules_path),
        corpus=CorpusConfig(date_min=date_min, date_max=date_max),
        embedding=TrainConfig(seed=seed, workers=workers, **emb_kwargs),
        expansion=ExpansionConfig(seed_word=seed_word, n_values=n_values),
        tsprep=TsPrepConfig(lam=lam, ma_periods=ma_periods, order=order),
        econ=EconConfig(i_max=i_max, var_lag=var_lag, max_lag=max_lag,
                        irf_horizons=irf_horizons, ordering=ordering,
                        var_ma_period=var_ma_period, irf_bootstrap=irf_bootstrap),
        seed=seed,
        workers=workers,
    )


def load_config(path: str | Path, overrides: dict | None = None) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    return build_config(raw, path.parent.resolve(), overrides)

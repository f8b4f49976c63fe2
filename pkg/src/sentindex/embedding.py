"""Skip-gram word embeddings with negative sampling, trained in numpy.

The training objective for one (target t, context c) pair with negative
draws n_1..n_K from the unigram^0.75 noise distribution is

    -log sigmoid(u_c . v_t) - sum_k log sigmoid(-u_{n_k} . v_t)

with v rows from the input (target) table and u rows from the output
(context) table. Updates are deterministic minibatch SGD in single-worker
mode: per target position a window width is drawn uniformly from
1..window (dynamic window), pairs are collected for a whole epoch,
shuffled, and consumed in fixed-size batches with a learning rate that
decays linearly from initial_lr to initial_lr/100 over the realized total
number of training pairs. The total is known before the first update
because pair generation replays dedicated per-epoch RNG streams.

``sgns_loss`` / ``sgns_grad`` expose the exact objective and its analytic
gradient on explicit pair arrays; the trainer consumes the same batch-math
helper, so a finite-difference check of these functions covers the
training path.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
from scipy.special import expit

from .corpus import Corpus
from .errors import OutOfVocabularyError, TrainingError

_LOSS_SAMPLE_PAIRS = 10_000
_BATCH_PAIRS = 4_096


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    window: int = 10
    min_count: int = 10
    epochs: int = 300
    negative: int = 5
    initial_lr: float = 0.025
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        problems = []
        for name, floor in (("dim", 1), ("window", 1), ("min_count", 1),
                            ("epochs", 1), ("negative", 0), ("workers", 1)):
            if getattr(self, name) < floor:
                problems.append(f"{name} must be >= {floor}")
        if not self.initial_lr > 0:
            problems.append("initial_lr must be > 0")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass
class Vocabulary:
    words: list[str]              # index -> word
    counts: np.ndarray            # index -> corpus frequency
    total_tokens: int             # total retained token count

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __getitem__(self, word: str) -> int:
        return self.index[word]


@dataclass
class EmbeddingModel:
    vocab: Vocabulary
    input_vectors: np.ndarray     # (V, dim) target-word embeddings
    output_vectors: np.ndarray    # (V, dim) context embeddings
    config: TrainConfig | None = None
    loss_initial: float | None = None
    loss_final: float | None = None

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]


def build_vocab(corpus: Corpus, min_count: int) -> Vocabulary:
    """Words with corpus frequency >= min_count, ordered by descending
    frequency then word, with dense indices 0..V-1."""
    freq: dict[str, int] = {}
    for rec in corpus.records:
        for tok in rec.tokens:
            freq[tok] = freq.get(tok, 0) + 1
    kept = sorted(
        ((w, c) for w, c in freq.items() if c >= min_count),
        key=lambda wc: (-wc[1], wc[0]),
    )
    words = [w for w, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(words, counts, int(counts.sum()))


# --- objective ----------------------------------------------------------


def _batch_terms(w_in, w_out, centers, targets, labels):
    """Loss and signed score-gradients for one batch.

    centers: (B,) input-table rows; targets: (B, M) output-table rows;
    labels: (B, M) with 1 for the true context column, 0 for noise.
    Returns (loss_sum, dL/dv (B,dim), dL/du (B,M,dim)).
    """
    v = w_in[centers]
    u = w_out[targets]
    s = np.einsum("bd,bmd->bm", v, u)
    if not np.all(np.isfinite(s)):
        raise FloatingPointError("non-finite scores")
    loss = float(np.logaddexp(0.0, np.where(labels > 0, -s, s)).sum())
    g = expit(s) - labels
    gv = np.einsum("bm,bmd->bd", g, u)
    gu = g[..., None] * v[:, None, :]
    return loss, gv, gu


def _as_pair_arrays(centers, contexts, negatives):
    centers = np.asarray(centers, dtype=np.int64)
    contexts = np.asarray(contexts, dtype=np.int64)
    negatives = np.asarray(negatives, dtype=np.int64)
    if negatives.ndim == 1:
        negatives = negatives.reshape(len(centers), -1)
    targets = np.concatenate([contexts[:, None], negatives], axis=1)
    labels = np.zeros_like(targets, dtype=float)
    labels[:, 0] = 1.0
    return centers, targets, labels


def sgns_loss(input_vectors, output_vectors, centers, contexts, negatives) -> float:
    """Summed negative-sampling loss over explicit (center, context, negatives) pairs."""
    centers, targets, labels = _as_pair_arrays(centers, contexts, negatives)
    loss, _, _ = _batch_terms(input_vectors, output_vectors, centers, targets, labels)
    return loss


def sgns_grad(input_vectors, output_vectors, centers, contexts, negatives):
    """Analytic gradient of sgns_loss w.r.t. both tables (dense arrays)."""
    centers, targets, labels = _as_pair_arrays(centers, contexts, negatives)
    _, gv, gu = _batch_terms(input_vectors, output_vectors, centers, targets, labels)
    grad_in = np.zeros_like(input_vectors)
    grad_out = np.zeros_like(output_vectors)
    np.add.at(grad_in, centers, gv)
    np.add.at(grad_out, targets.ravel(), gu.reshape(-1, input_vectors.shape[1]))
    return grad_in, grad_out


# --- training -----------------------------------------------------------


def _encode(corpus: Corpus, vocab: Vocabulary):
    """Flatten the corpus to retained token ids plus a record id per position."""
    ids: list[int] = []
    sent: list[int] = []
    for r, rec in enumerate(corpus.records):
        for tok in rec.tokens:
            i = vocab.index.get(tok)
            if i is not None:
                ids.append(i)
                sent.append(r)
    return np.asarray(ids, dtype=np.int64), np.asarray(sent, dtype=np.int64)


def _epoch_pairs(ids, sent, window, rng, count_only=False):
    """Dynamic-window pair generation for one epoch.

    Draws one width per position from 1..window; position t is paired with
    every same-record neighbor within its own width. Draw order is fixed so
    a counting pass and the training pass see identical widths.
    """
    n = len(ids)
    weff = rng.integers(1, window + 1, size=n)
    if count_only:
        total = 0
        for d in range(1, window + 1):
            same = sent[:-d] == sent[d:]
            total += int((same & (weff[:-d] >= d)).sum())
            total += int((same & (weff[d:] >= d)).sum())
        return total
    centers, contexts = [], []
    for d in range(1, window + 1):
        same = sent[:-d] == sent[d:]
        left = same & (weff[:-d] >= d)    # t is the center, t+d the context
        right = same & (weff[d:] >= d)    # t+d is the center, t the context
        centers.append(ids[:-d][left])
        contexts.append(ids[d:][left])
        centers.append(ids[d:][right])
        contexts.append(ids[:-d][right])
    return np.concatenate(centers), np.concatenate(contexts)


def _noise_cdf(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(float) ** 0.75
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def _draw_negatives(cdf, rng, shape):
    return np.searchsorted(cdf, rng.random(shape)).astype(np.int64)


def train_skipgram(corpus: Corpus, config: TrainConfig) -> EmbeddingModel:
    """Train a skip-gram model; deterministic for a fixed seed when workers=1."""
    vocab = build_vocab(corpus, config.min_count)
    if len(vocab) == 0:
        raise TrainingError("vocabulary is empty after min_count filtering")
    ids, sent = _encode(corpus, vocab)
    cdf = _noise_cdf(vocab.counts)

    root = np.random.SeedSequence(config.seed)
    streams = root.spawn(2 + 2 * config.epochs)
    init_ss, eval_ss = streams[0], streams[1]
    win_ss = streams[2::2]
    neg_ss = streams[3::2]

    # Counting pre-pass: realized pair totals per epoch, from the same streams
    # the training pass will replay.
    epoch_totals = [
        _epoch_pairs(ids, sent, config.window, np.random.Generator(np.random.PCG64(ss)),
                     count_only=True)
        for ss in win_ss
    ]
    total_pairs = int(sum(epoch_totals))
    if total_pairs == 0:
        raise TrainingError("no (target, context) pairs: corpus records are too short")

    init_rng = np.random.Generator(np.random.PCG64(init_ss))
    dim = config.dim
    w_in = init_rng.uniform(-0.5 / dim, 0.5 / dim, size=(len(vocab), dim))
    w_out = np.zeros((len(vocab), dim))

    # Fixed evaluation sample: leading pairs of the epoch-0 draw plus
    # dedicated noise draws; loss is re-measured on it after training.
    eval_rng = np.random.Generator(np.random.PCG64(eval_ss))
    c0, x0 = _epoch_pairs(ids, sent, config.window,
                          np.random.Generator(np.random.PCG64(win_ss[0])))
    n_eval = min(_LOSS_SAMPLE_PAIRS, len(c0))
    eval_centers, eval_contexts = c0[:n_eval], x0[:n_eval]
    eval_negs = _draw_negatives(cdf, eval_rng, (n_eval, max(config.negative, 1)))
    if config.negative == 0:
        eval_negs = eval_negs[:, :0]

    def sample_loss():
        return sgns_loss(w_in, w_out, eval_centers, eval_contexts, eval_negs) / max(n_eval, 1)

    loss_initial = sample_loss()

    lr0 = config.initial_lr
    lr_floor = lr0 / 100.0

    def lr_at(processed: int) -> float:
        frac = min(processed / total_pairs, 1.0)
        return lr0 + (lr_floor - lr0) * frac

    # One batch is one mean-gradient step per touched row, so small corpora
    # get proportionally smaller batches (more steps per epoch).
    batch_pairs = int(min(_BATCH_PAIRS, max(256, total_pairs // (config.epochs * 32))))

    def run_batches(centers, contexts, neg_rng, processed_base, epoch):
        done = 0
        for lo in range(0, len(centers), batch_pairs):
            hi = min(lo + batch_pairs, len(centers))
            c = centers[lo:hi]
            negs = _draw_negatives(cdf, neg_rng, (hi - lo, config.negative))
            targets = np.concatenate([contexts[lo:hi, None], negs], axis=1)
            labels = np.zeros_like(targets, dtype=float)
            labels[:, 0] = 1.0
            try:
                _, gv, gu = _batch_terms(w_in, w_out, c, targets, labels)
            except FloatingPointError as exc:
                raise TrainingError(f"non-finite loss in epoch {epoch}") from exc
            lr = lr_at(processed_base + done)
            # A row that occurs many times in one batch would otherwise take
            # the summed step and overshoot (unstable for small vocabularies),
            # so each row moves by the mean of its pair gradients instead.
            c_mult = np.bincount(c, minlength=len(w_in))[c]
            np.add.at(w_in, c, (-lr / c_mult)[:, None] * gv)
            flat_t = targets.ravel()
            t_mult = np.bincount(flat_t, minlength=len(w_out))[flat_t]
            np.add.at(w_out, flat_t,
                      (-lr / t_mult)[:, None] * gu.reshape(-1, dim))
            done += hi - lo
        return done

    processed = 0
    for epoch in range(config.epochs):
        win_rng = np.random.Generator(np.random.PCG64(win_ss[epoch]))
        centers, contexts = _epoch_pairs(ids, sent, config.window, win_rng)
        order = win_rng.permutation(len(centers))
        centers, contexts = centers[order], contexts[order]
        if config.workers == 1:
            neg_rng = np.random.Generator(np.random.PCG64(neg_ss[epoch]))
            processed += run_batches(centers, contexts, neg_rng, processed, epoch)
        else:
            # Benign hogwild over shared tables; per-run results may vary.
            chunks = np.array_split(np.arange(len(centers)), config.workers)
            worker_ss = neg_ss[epoch].spawn(config.workers)
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = [
                    pool.submit(run_batches, centers[chunk], contexts[chunk],
                                np.random.Generator(np.random.PCG64(ss)),
                                processed, epoch)
                    for chunk, ss in zip(chunks, worker_ss)
                ]
                processed += sum(f.result() for f in futures)

    loss_final = sample_loss()
    return EmbeddingModel(vocab, w_in, w_out, config, loss_initial, loss_final)


# --- queries ------------------------------------------------------------


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """cos of the angle between u and v, in [-1, 1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("vectors must be 1-D and the same length")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm vectors")
    return float(np.dot(u, v) / (nu * nv))


def top_k_similar(model: EmbeddingModel, word: str, k: int) -> list[tuple[str, float]]:
    """k nearest vocabulary words to `word` by cosine over input vectors.

    Descending similarity; exact ties broken by ascending vocabulary index.
    The query word is excluded; k larger than V-1 returns all other words.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if word not in model.vocab:
        raise OutOfVocabularyError(word)
    q = model.vocab[word]
    w = model.input_vectors
    norms = np.linalg.norm(w, axis=1)
    qv = w[q]
    qn = norms[q]
    if qn == 0.0:
        raise ValueError(f"query vector for {word!r} has zero norm")
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = (w @ qv) / (norms * qn)
    sims[norms == 0.0] = -np.inf
    others = np.delete(np.arange(len(w)), q)
    sims = sims[others]
    order = np.lexsort((others, -sims))
    top = order[: min(k, len(others))]
    return [(model.vocab.words[others[i]], float(sims[i])) for i in top]


def pca_project(vectors: np.ndarray) -> np.ndarray:
    """Project rows onto the top-2 principal components of the centered data."""
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D array with at least 2 rows")
    if x.shape[1] < 2:
        raise ValueError("need at least 2 input dimensions")
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[:2].T


# --- persistence --------------------------------------------------------


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    """Write "<V> <dim>" then one "word v1 .. vdim" line per word.

    Output vectors go to "<path>.outv" (same layout) and the train config
    plus seed to "<path>.json", so a saved model reloads in full.
    """
    path = Path(path)

    def write_table(p: Path, table: np.ndarray) -> None:
        with p.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{len(model.vocab)} {model.dim}\n")
            for word, row in zip(model.vocab.words, table):
                fh.write(word + " " + " ".join(repr(float(x)) for x in row) + "\n")

    write_table(path, model.input_vectors)
    write_table(path.with_suffix(path.suffix + ".outv"), model.output_vectors)
    sidecar = {"counts": model.vocab.counts.tolist(),
               "total_tokens": model.vocab.total_tokens}
    if model.config is not None:
        sidecar["config"] = asdict(model.config)
        sidecar["seed"] = model.config.seed
    if model.loss_initial is not None:
        sidecar["loss_initial"] = model.loss_initial
        sidecar["loss_final"] = model.loss_final
    with path.with_suffix(path.suffix + ".json").open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _read_table(path: Path) -> tuple[list[str], np.ndarray]:
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'V dim' header")
        v, dim = int(header[0]), int(header[1])
        words: list[str] = []
        rows = np.empty((v, dim))
        for i in range(v):
            cells = fh.readline().split()
            if len(cells) != dim + 1:
                raise ValueError(f"{path}: row {i} has {len(cells) - 1} values, expected {dim}")
            words.append(cells[0])
            rows[i] = [float(c) for c in cells[1:]]
    return words, rows


def load_model(path: str | Path) -> EmbeddingModel:
    path = Path(path)
    words, w_in = _read_table(path)
    sidecar_path = path.with_suffix(path.suffix + ".json")
    counts = np.ones(len(words), dtype=np.int64)
    total = len(words)
    config = None
    loss_initial = loss_final = None
    if sidecar_path.exists():
        with sidecar_path.open("r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        counts = np.asarray(sidecar.get("counts", counts), dtype=np.int64)
        total = int(sidecar.get("total_tokens", total))
        if "config" in sidecar:
            config = TrainConfig(**sidecar["config"])
        loss_initial = sidecar.get("loss_initial")
        loss_final = sidecar.get("loss_final")
    out_path = path.with_suffix(path.suffix + ".outv")
    if out_path.exists():
        out_words, w_out = _read_table(out_path)
        if out_words != words:
            raise ValueError(f"{out_path}: word order differs from {path}")
    else:
        warnings.warn(f"{out_path} missing; output vectors set to zero")
        w_out = np.zeros_like(w_in)
    vocab = Vocabulary(words, counts, total)
    return EmbeddingModel(vocab, w_in, w_out, config, loss_initial, loss_final)

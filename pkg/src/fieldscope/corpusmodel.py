"""Per-corpus word-frequency models, top-V cutoff, and self-dissimilarity noise.

Models are plain count tables and merge additively, so corpora can be counted
in shards and combined with bit-identical results.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InsufficientVocabulary

DEFAULT_V = 20000


@dataclass
class FrequencyModel:
    counts: Counter = field(default_factory=Counter)
    total_tokens: int = 0

    @property
    def v_available(self):
        return len(self.counts)

    def check(self):
        if sum(self.counts.values()) != self.total_tokens:
            raise InputError("total_tokens does not match sum of counts")
        if any(c <= 0 for c in self.counts.values()):
            raise InputError("stored counts must be strictly positive")


@dataclass
class ProbabilityVector:
    support: list
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if len(self.support) != len(self.probs):
            raise InputError("support and probability lengths differ")
        if len(set(self.support)) != len(self.support):
            raise InputError("duplicate word types in support")
        if np.any(self.probs <= 0):
            raise InputError("probabilities must be strictly positive")

    def as_dict(self):
        return dict(zip(self.support, self.probs))


def build_model(token_lists):
    counts = Counter()
    for tokens in token_lists:
        counts.update(tokens)
    return FrequencyModel(counts=counts, total_tokens=sum(counts.values()))


def merge(*models):
    """Element-wise sum of count tables; associative and commutative."""
    counts = Counter()
    total = 0
    for model in models:
        counts.update(model.counts)
        total += model.total_tokens
    return FrequencyModel(counts=counts, total_tokens=total)


def _top_v_items(model, v):
    # count descending, then lexicographic on the word type (deterministic
    # tie-break at the cutoff boundary)
    return sorted(model.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:v]


def top_v_probabilities(model, v=DEFAULT_V, renormalize=True):
    """Probability vector over the V most frequent word types.

    With renormalize=True (default) the kept mass is rescaled to sum to 1;
    otherwise raw frequencies count/total over the full corpus are kept.
    """
    if v <= 0:
        raise InputError(f"vocabulary cutoff must be positive, got {v}")
    if model.v_available < v:
        raise InsufficientVocabulary(model.v_available, v)
    items = _top_v_items(model, v)
    support = [w for w, _ in items]
    counts = np.array([c for _, c in items], dtype=float)
    denom = counts.sum() if renormalize else float(model.total_tokens)
    return ProbabilityVector(support=support, probs=counts / denom)


@dataclass
class SelfDissimilarity:
    mean: float
    relative_std: float
    n_splits: int
    degenerate: bool  # True when n_splits == 1 (relative_std is 0 by convention)


def self_dissimilarity(token_lists, v=DEFAULT_V, n_splits=10, seed=0,
                       renormalize=True):
    """Dissimilarity between random halves of the same corpus.

    Repeatedly bipartitions the documents at random, computes the language
    dissimilarity between the two halves' top-V vectors, and reports the mean
    and relative standard deviation (the noise floor of the measure).
    """
    from .language import d_lang

    token_lists = list(token_lists)
    if len(token_lists) < 2:
        raise InputError("need at least two documents to bipartition")
    if n_splits < 1:
        raise InputError(f"n_splits must be >= 1, got {n_splits}")
    rng = np.random.default_rng(seed)
    values = []
    n = len(token_lists)
    for _ in range(n_splits):
        order = rng.permutation(n)
        half = n // 2
        first = build_model(token_lists[i] for i in order[:half])
        second = build_model(token_lists[i] for i in order[half:])
        p = top_v_probabilities(first, v, renormalize=renormalize)
        q = top_v_probabilities(second, v, renormalize=renormalize)
        values.append(d_lang(p, q))
    mean = float(np.mean(values))
    if n_splits == 1:
        return SelfDissimilarity(mean, 0.0, 1, True)
    std = float(np.std(values, ddof=1))
    rel = std / mean if mean > 0 else 0.0
    return SelfDissimilarity(mean, rel, n_splits, False)


# --- persistence -----------------------------------------------------------


def save_model(model, path):
    """Write `word<TAB>count` rows (count desc, then lexicographic) with a header."""
    model.check()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#total_tokens\t{model.total_tokens}\n")
        for word, count in sorted(model.counts.items(), key=lambda kv: (-kv[1], kv[0])):
            fh.write(f"{word}\t{count}\n")


def load_model(path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    counts = Counter()
    total = None
    with fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#total_tokens\t"):
                total = int(line.split("\t")[1])
                continue
            try:
                word, count = line.split("\t")
            except ValueError:
                raise InputError(f"bad model row {line!r} in {path}") from None
            counts[word] = int(count)
    if total is None:
        raise InputError(f"model file {path} missing total_tokens header")
    model = FrequencyModel(counts=counts, total_tokens=total)
    model.check()
    return model

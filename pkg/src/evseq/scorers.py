"""Next-token scorers: the probability models that drive decoding.

These are deliberately small, deterministic stand-ins for a learned
generator: a uniform baseline, an oracle that replays a known target, a
seeded random scorer for fuzzing, and a count-based n-gram model with
hard backoff, additive smoothing, and a copy boost for tokens of the
input sentence.  All of them satisfy the Scorer protocol of the decoder
module and return proper probability distributions.
"""

from __future__ import annotations

import hashlib
import json
import random
from typing import Iterable, Mapping, Sequence

from .schema import EventSchema, split_label
from .span_index import TokenizedInput
from .tokens import BOS, EOS, RESERVED_TOKENS


def decoding_vocab(
    schema: EventSchema, inp: TokenizedInput | None = None
) -> frozenset[str]:
    """Every token decoding can involve: structure, sentinels, labels, input."""
    vocab = set(RESERVED_TOKENS)
    for event_type in schema.types:
        vocab.update(split_label(event_type))
        for role in schema.roles(event_type):
            vocab.update(split_label(role))
    if inp is not None:
        vocab.update(inp.tokens)
    return frozenset(vocab)


class UniformScorer:
    """Assigns 1/V to every vocabulary token, independent of context."""

    def __init__(self, vocab: Iterable[str]):
        self.vocab = tuple(sorted(set(vocab)))
        if not self.vocab:
            raise ValueError("uniform scorer needs a non-empty vocabulary")
        self._dist = {token: 1.0 / len(self.vocab) for token in self.vocab}

    def next_distribution(
        self, inp: TokenizedInput, prefix: Sequence[str]
    ) -> Mapping[str, float]:
        return self._dist


class OracleScorer:
    """Replays a known target sequence.

    While the prefix follows the target, the next target token gets
    probability 1−ε and the rest of the vocabulary shares ε evenly.
    Off the target path (or past its end) the distribution is uniform.
    """

    def __init__(
        self,
        target: Sequence[str],
        epsilon: float = 0.0,
        vocab: Iterable[str] | None = None,
    ):
        if not 0.0 <= epsilon < 1.0:
            raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
        self.stream = (BOS, *target, EOS)
        self.epsilon = epsilon
        self.vocab = tuple(sorted(set(vocab or ()) | set(self.stream)))

    def next_distribution(
        self, inp: TokenizedInput, prefix: Sequence[str]
    ) -> Mapping[str, float]:
        i = len(prefix)
        on_target = i < len(self.stream) and tuple(prefix) == self.stream[:i]
        if not on_target:
            return {token: 1.0 / len(self.vocab) for token in self.vocab}
        target_token = self.stream[i]
        if len(self.vocab) == 1:
            return {target_token: 1.0}
        rest = self.epsilon / (len(self.vocab) - 1)
        dist = {token: rest for token in self.vocab}
        dist[target_token] = 1.0 - self.epsilon
        return dist


def uniform_scorer(vocab: Iterable[str]) -> UniformScorer:
    return UniformScorer(vocab)


def oracle_scorer(
    target: Sequence[str], epsilon: float = 0.0, vocab: Iterable[str] | None = None
) -> OracleScorer:
    return OracleScorer(target, epsilon, vocab)


class RandomScorer:
    """Deterministic pseudo-random distributions for fuzzing.

    The weights depend only on (seed, prefix): the prefix is hashed with
    the seed into an RNG state, so repeated runs and repeated queries
    agree exactly, across platforms.
    """

    def __init__(self, vocab: Iterable[str], seed: int):
        self.vocab = tuple(sorted(set(vocab)))
        if not self.vocab:
            raise ValueError("random scorer needs a non-empty vocabulary")
        self.seed = seed

    def next_distribution(
        self, inp: TokenizedInput, prefix: Sequence[str]
    ) -> Mapping[str, float]:
        key = f"{self.seed}".encode() + b"\x00" + "\x1f".join(prefix).encode()
        rng = random.Random(int.from_bytes(hashlib.sha256(key).digest()[:8], "big"))
        weights = [rng.random() + 1e-6 for _ in self.vocab]
        total = sum(weights)
        return {token: w / total for token, w in zip(self.vocab, weights)}


Counts = dict[int, dict[tuple[str, ...], dict[str, int]]]


class NgramScorer:
    """Count-based n-gram model with hard backoff and additive smoothing.

    ``counts[k][context][token]`` is how often ``token`` followed the
    (k−1)-token ``context`` in training.  A query uses the longest
    context with any counts, backing off one order at a time down to the
    unigram table.  Scores are (count + α), multiplied by ``copy_boost``
    for tokens present in the current input sentence, then normalized
    over the training vocabulary extended with the input tokens.
    """

    def __init__(
        self,
        order: int,
        counts: Counts,
        alpha: float = 0.1,
        copy_boost: float = 4.0,
        extra_vocab: Iterable[str] = (),
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if alpha <= 0.0:
            raise ValueError(f"alpha must be > 0, got {alpha}")
        if copy_boost < 1.0:
            raise ValueError(f"copy_boost must be >= 1, got {copy_boost}")
        self.order = order
        self.counts = counts
        self.alpha = alpha
        self.copy_boost = copy_boost
        # extra_vocab admits tokens never seen in training (smoothing
        # still gives them mass), e.g. label tokens of a schema
        self.vocab = frozenset(counts.get(1, {}).get((), {})) | frozenset(extra_vocab)

    def _table(self, prefix: Sequence[str]) -> Mapping[str, int]:
        k = min(self.order, len(prefix) + 1)
        while k > 1:
            context = tuple(prefix[len(prefix) - (k - 1) :])
            table = self.counts.get(k, {}).get(context)
            if table:
                return table
            k -= 1
        return self.counts.get(1, {}).get((), {})

    def next_distribution(
        self, inp: TokenizedInput, prefix: Sequence[str]
    ) -> Mapping[str, float]:
        table = self._table(prefix)
        input_tokens = inp.token_set
        scores = {}
        total = 0.0
        for token in sorted(self.vocab | input_tokens):
            s = table.get(token, 0) + self.alpha
            if token in input_tokens:
                s *= self.copy_boost
            scores[token] = s
            total += s
        return {token: s / total for token, s in scores.items()}


def train_ngram(
    corpus: Iterable[tuple[TokenizedInput, Sequence[str]]],
    n: int = 3,
    alpha: float = 0.1,
    copy_boost: float = 4.0,
    extra_vocab: Iterable[str] = (),
) -> NgramScorer:
    """Count n-grams of orders 1..n over sentinel-bracketed target sequences.

    Corpus items pair an input sentence with its linearized target; the
    inputs are carried for interface symmetry but only targets are
    counted (input conditioning happens at query time via copy_boost).
    """
    counts: Counts = {k: {} for k in range(1, n + 1)}
    empty = True
    for _inp, target in corpus:
        empty = False
        stream = (BOS, *target, EOS)
        for k in range(1, n + 1):
            tables = counts[k]
            for i in range(k - 1, len(stream)):
                context = stream[i - k + 1 : i]
                table = tables.setdefault(context, {})
                table[stream[i]] = table.get(stream[i], 0) + 1
    if empty:
        raise ValueError("cannot train an n-gram scorer on an empty corpus")
    return NgramScorer(n, counts, alpha, copy_boost, extra_vocab)


NGRAM_FORMAT = "evseq-ngram"
NGRAM_VERSION = 1


def save_scorer(scorer: NgramScorer, path) -> None:
    """Write a trained n-gram scorer as a versioned JSON artifact.

    Contexts and tokens are sorted so identical scorers serialize
    byte-identically.
    """
    counts_blob = [
        [
            k,
            [
                [list(context), sorted(table.items())]
                for context, table in sorted(scorer.counts.get(k, {}).items())
            ],
        ]
        for k in range(1, scorer.order + 1)
    ]
    payload = {
        "format": NGRAM_FORMAT,
        "version": NGRAM_VERSION,
        "order": scorer.order,
        "alpha": scorer.alpha,
        "copy_boost": scorer.copy_boost,
        "vocab": sorted(scorer.vocab),
        "counts": counts_blob,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False)
        handle.write("\n")


def load_scorer(path) -> NgramScorer:
    """Read back an artifact written by ``save_scorer``."""
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, dict) or payload.get("format") != NGRAM_FORMAT:
        raise ValueError(f"{path}: not a scorer artifact")
    if payload.get("version") != NGRAM_VERSION:
        raise ValueError(
            f"{path}: unsupported artifact version {payload.get('version')!r}"
        )
    counts: Counts = {}
    for k, tables in payload["counts"]:
        counts[k] = {
            tuple(context): dict(table) for context, table in tables
        }
    return NgramScorer(
        payload["order"],
        counts,
        payload["alpha"],
        payload["copy_boost"],
        payload.get("vocab", ()),
    )

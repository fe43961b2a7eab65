"""Grammar-constrained decoding over the parenthesized event format.

A pushdown automaton tracks where in the event grammar the generated
prefix sits.  At each step the legal next tokens are computed from the
automaton phase, the schema label tries, and the span trie of the input
sentence; the scorer's distribution is consulted only on those tokens,
so any scorer (even an adversarial one) yields a sequence that parses,
names only schema labels, and copies mentions verbatim from the input.

Candidate probabilities are the scorer's raw values: masking never
renormalizes, and scores accumulate in log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Protocol, Sequence

from .schema import EventSchema, LabelTrie, build_role_tries, build_type_trie
from .span_index import (
    DEFAULT_MAX_SPAN_LEN,
    SpanTrie,
    TokenizedInput,
    build_span_trie,
)
from .tokens import BOS, CLOSE, EOS, OPEN


class DecodeError(Exception):
    """A decoding step could not be carried out."""


class TruncationError(DecodeError):
    """max_length was reached before the end sentinel could be emitted."""


class Scorer(Protocol):
    """Next-token distribution provider conditioned on input and prefix.

    ``prefix`` always starts with the BOS sentinel.  The returned mapping
    assigns a probability to every token the scorer considers possible;
    absent tokens are treated as probability zero.  Distributions must
    be non-negative, finite, and sum to 1 within tolerance.
    """

    def next_distribution(
        self, inp: TokenizedInput, prefix: Sequence[str]
    ) -> Mapping[str, float]: ...


class Phase(Enum):
    AWAIT_ROOT = "await_root"
    AWAIT_EVENT = "await_event_open_or_root_close"
    IN_TYPE_LABEL = "in_type_label"
    IN_TRIGGER_SPAN = "in_trigger_span"
    AWAIT_ARG = "await_arg_open_or_event_close"
    IN_ROLE_LABEL = "in_role_label"
    IN_ARG_SPAN = "in_arg_span"
    AWAIT_END = "await_end"
    DONE = "done"


@dataclass(frozen=True)
class SchemaTries:
    """The label tries a decoder walks: one for types, one per type for roles."""

    type_trie: LabelTrie
    role_tries: Mapping[str, LabelTrie]

    @classmethod
    def from_schema(cls, schema: EventSchema) -> "SchemaTries":
        return cls(build_type_trie(schema), build_role_tries(schema))


@dataclass(frozen=True)
class DecodeState:
    """Immutable automaton state after consuming a token prefix.

    ``tokens`` holds the emitted sequence without sentinels.  While a
    label or mention is being spelled out, ``partial_label`` or
    ``partial_span`` holds the tokens of the unfinished unit; both are
    always valid trie paths.
    """

    tokens: tuple[str, ...] = ()
    depth: int = 0
    phase: Phase = Phase.AWAIT_ROOT
    partial_label: tuple[str, ...] = ()
    partial_span: tuple[str, ...] = ()
    current_type: str | None = None

    @property
    def done(self) -> bool:
        return self.phase is Phase.DONE


@dataclass(frozen=True)
class DecodeConfig:
    mode: str = "greedy"
    beam_width: int = 1
    max_length: int = 128  # counts the sentinels: "( )" costs 4
    constrained: bool = True

    def __post_init__(self):
        if self.mode not in ("greedy", "beam"):
            raise ValueError(f"unknown decode mode {self.mode!r}")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_length < 4:
            raise ValueError("max_length must be >= 4 (shortest legal output)")


def candidate_vocab(
    state: DecodeState, tries: SchemaTries, span_trie: SpanTrie
) -> frozenset[str]:
    """Exactly the tokens legal after ``state``.

    Dead ends are pruned ahead of time: an event is only opened when the
    input supports at least one span, and arguments are only opened for
    event types that permit at least one role.
    """
    phase = state.phase
    if phase is Phase.DONE:
        raise DecodeError("generation has ended; no candidates remain")
    if phase is Phase.AWAIT_ROOT:
        return frozenset({OPEN})
    if phase is Phase.AWAIT_EVENT:
        cands = {CLOSE}
        if not span_trie.is_empty:
            cands.add(OPEN)
        return frozenset(cands)
    if phase is Phase.IN_TYPE_LABEL:
        node = tries.type_trie.node(state.partial_label)
        cands = set(node.children)
        if node.is_leaf:
            # label may end here; the trigger mention starts
            cands |= span_trie.children(())
        return frozenset(cands)
    if phase is Phase.IN_TRIGGER_SPAN:
        cands = set(span_trie.children(state.partial_span))
        if state.partial_span:
            cands.add(CLOSE)
            if not tries.role_tries[state.current_type].is_empty:
                cands.add(OPEN)
        return frozenset(cands)
    if phase is Phase.AWAIT_ARG:
        return frozenset({OPEN, CLOSE})
    if phase is Phase.IN_ROLE_LABEL:
        node = tries.role_tries[state.current_type].node(state.partial_label)
        cands = set(node.children)
        if node.is_leaf:
            cands |= span_trie.children(())
        return frozenset(cands)
    if phase is Phase.IN_ARG_SPAN:
        cands = set(span_trie.children(state.partial_span))
        if state.partial_span:
            cands.add(CLOSE)
        return frozenset(cands)
    assert phase is Phase.AWAIT_END
    return frozenset({EOS})


def step(
    state: DecodeState, token: str, tries: SchemaTries, span_trie: SpanTrie
) -> DecodeState:
    """Advance the automaton by one token; the token must be legal.

    Label commitment is greedy-longest: while the consumed tokens can
    still extend a longer label, the walk continues; the label is
    committed when a leaf with no children is reached or when a span
    token takes over.  This mirrors how ``delinearize`` reads sequences
    back, so decoder and parser always agree on label boundaries.
    """
    if token not in candidate_vocab(state, tries, span_trie):
        raise DecodeError(
            f"token {token!r} is not in the candidate vocabulary "
            f"(phase {state.phase.value}, depth {state.depth})"
        )
    tokens = state.tokens + (token,)
    phase = state.phase

    if phase is Phase.AWAIT_ROOT:
        return replace(state, tokens=tokens, depth=1, phase=Phase.AWAIT_EVENT)

    if phase is Phase.AWAIT_EVENT:
        if token == OPEN:
            return replace(
                state, tokens=tokens, depth=2, phase=Phase.IN_TYPE_LABEL,
                partial_label=(),
            )
        return replace(state, tokens=tokens, depth=0, phase=Phase.AWAIT_END)

    if phase is Phase.IN_TYPE_LABEL:
        return _label_step(state, token, tokens, tries.type_trie, Phase.IN_TRIGGER_SPAN)

    if phase is Phase.IN_TRIGGER_SPAN:
        if token == OPEN:
            return replace(
                state, tokens=tokens, depth=3, phase=Phase.IN_ROLE_LABEL,
                partial_label=(), partial_span=(),
            )
        if token == CLOSE:
            return replace(
                state, tokens=tokens, depth=1, phase=Phase.AWAIT_EVENT,
                partial_span=(), current_type=None,
            )
        return replace(state, tokens=tokens, partial_span=state.partial_span + (token,))

    if phase is Phase.AWAIT_ARG:
        if token == OPEN:
            return replace(
                state, tokens=tokens, depth=3, phase=Phase.IN_ROLE_LABEL,
                partial_label=(),
            )
        return replace(
            state, tokens=tokens, depth=1, phase=Phase.AWAIT_EVENT,
            current_type=None,
        )

    if phase is Phase.IN_ROLE_LABEL:
        trie = tries.role_tries[state.current_type]
        return _label_step(state, token, tokens, trie, Phase.IN_ARG_SPAN)

    if phase is Phase.IN_ARG_SPAN:
        if token == CLOSE:
            return replace(
                state, tokens=tokens, depth=2, phase=Phase.AWAIT_ARG, partial_span=(),
            )
        return replace(state, tokens=tokens, partial_span=state.partial_span + (token,))

    assert phase is Phase.AWAIT_END
    # the end sentinel is not part of the linearized body
    return replace(state, phase=Phase.DONE)


def _label_step(
    state: DecodeState,
    token: str,
    tokens: tuple[str, ...],
    trie: LabelTrie,
    span_phase: Phase,
) -> DecodeState:
    node = trie.node(state.partial_label)
    child = node.children.get(token)
    if child is not None:
        committed = child.is_leaf and not child.children
        if committed and state.phase is Phase.IN_TYPE_LABEL:
            return replace(
                state, tokens=tokens, phase=span_phase, partial_label=(),
                partial_span=(), current_type=child.label,
            )
        if committed:
            return replace(
                state, tokens=tokens, phase=span_phase, partial_label=(),
                partial_span=(),
            )
        return replace(state, tokens=tokens, partial_label=state.partial_label + (token,))
    # token opens the mention; commit the label completed at this node
    if state.phase is Phase.IN_TYPE_LABEL:
        return replace(
            state, tokens=tokens, phase=span_phase, partial_label=(),
            partial_span=(token,), current_type=node.label,
        )
    return replace(
        state, tokens=tokens, phase=span_phase, partial_label=(), partial_span=(token,),
    )


@dataclass(frozen=True)
class DecodeResult:
    """A finished decode: the linearized body plus per-step log-probabilities.

    ``logprobs`` has one entry per generated token, end sentinel
    included, so ``len(logprobs) == len(tokens) + 1``.
    """

    tokens: tuple[str, ...]
    logprobs: tuple[float, ...]

    @property
    def total_logprob(self) -> float:
        return sum(self.logprobs)

    @property
    def nll(self) -> float:
        return -self.total_logprob


def _checked_prob(dist: Mapping[str, float], token: str) -> float:
    p = dist.get(token, 0.0)
    if math.isnan(p) or math.isinf(p) or p < 0.0:
        raise DecodeError(f"scorer produced a non-finite or negative score for {token!r}: {p}")
    return p


def _log(p: float) -> float:
    return math.log(p) if p > 0.0 else float("-inf")


def constrained_decode(
    scorer: Scorer,
    inp: TokenizedInput,
    schema: EventSchema,
    config: DecodeConfig | None = None,
    max_span_len: int = DEFAULT_MAX_SPAN_LEN,
) -> DecodeResult:
    """Decode one sequence for ``inp`` under grammar/schema/span constraints.

    Greedy mode takes the most probable candidate at every step, breaking
    ties toward the lexicographically smallest token.  Beam mode keeps
    ``beam_width`` prefixes and compares finished hypotheses by total
    log-probability without length normalization.  Raises
    TruncationError when ``max_length`` is hit before the end sentinel.
    """
    config = config or DecodeConfig()
    tries = SchemaTries.from_schema(schema)
    span_trie = build_span_trie(inp, max_span_len)
    if not config.constrained:
        return _greedy_unconstrained(scorer, inp, config)
    if config.mode == "greedy":
        return _greedy(scorer, inp, tries, span_trie, config)
    return _beam(scorer, inp, tries, span_trie, config)


def _greedy(
    scorer: Scorer,
    inp: TokenizedInput,
    tries: SchemaTries,
    span_trie: SpanTrie,
    config: DecodeConfig,
) -> DecodeResult:
    state = DecodeState()
    prefix: list[str] = [BOS]
    logprobs: list[float] = []
    while not state.done:
        if len(prefix) >= config.max_length:
            raise TruncationError(
                f"no end sentinel within max_length={config.max_length} tokens"
            )
        dist = scorer.next_distribution(inp, tuple(prefix))
        cands = candidate_vocab(state, tries, span_trie)
        chosen = min(cands, key=lambda t: (-_checked_prob(dist, t), t))
        logprobs.append(_log(_checked_prob(dist, chosen)))
        state = step(state, chosen, tries, span_trie)
        prefix.append(chosen)
    return DecodeResult(state.tokens, tuple(logprobs))


def _greedy_unconstrained(
    scorer: Scorer, inp: TokenizedInput, config: DecodeConfig
) -> DecodeResult:
    """Argmax decoding with no grammar mask; output may not parse."""
    prefix: list[str] = [BOS]
    logprobs: list[float] = []
    while True:
        if len(prefix) >= config.max_length:
            raise TruncationError(
                f"no end sentinel within max_length={config.max_length} tokens"
            )
        dist = scorer.next_distribution(inp, tuple(prefix))
        if not dist:
            raise DecodeError("scorer returned an empty distribution")
        chosen = min(dist, key=lambda t: (-_checked_prob(dist, t), t))
        logprobs.append(_log(_checked_prob(dist, chosen)))
        prefix.append(chosen)
        if chosen == EOS:
            return DecodeResult(tuple(prefix[1:-1]), tuple(logprobs))


@dataclass(frozen=True)
class _Hyp:
    state: DecodeState
    prefix: tuple[str, ...]
    logprobs: tuple[float, ...] = ()

    @property
    def score(self) -> float:
        return sum(self.logprobs)


def _beam(
    scorer: Scorer,
    inp: TokenizedInput,
    tries: SchemaTries,
    span_trie: SpanTrie,
    config: DecodeConfig,
) -> DecodeResult:
    live = [_Hyp(DecodeState(), (BOS,))]
    completed: list[_Hyp] = []
    while live:
        if completed:
            best_done = max(h.score for h in completed)
            # per-step log-probs are <= 0, so live scores cannot recover
            if all(h.score <= best_done for h in live):
                break
        expansions: list[_Hyp] = []
        for hyp in live:
            if len(hyp.prefix) >= config.max_length:
                continue  # cannot finish within the budget; drop
            dist = scorer.next_distribution(inp, hyp.prefix)
            for token in candidate_vocab(hyp.state, tries, span_trie):
                lp = _log(_checked_prob(dist, token))
                expansions.append(
                    _Hyp(
                        step(hyp.state, token, tries, span_trie),
                        hyp.prefix + (token,),
                        hyp.logprobs + (lp,),
                    )
                )
        expansions.sort(key=lambda h: (-h.score, h.prefix))
        live = []
        for hyp in expansions[: config.beam_width]:
            if hyp.state.done:
                completed.append(hyp)
            else:
                live.append(hyp)
    if not completed:
        raise TruncationError(
            f"no hypothesis finished within max_length={config.max_length} tokens"
        )
    best = min(completed, key=lambda h: (-h.score, h.prefix))
    return DecodeResult(best.state.tokens, best.logprobs)


def decode_batch(
    scorer: Scorer | Sequence[Scorer],
    inputs: Sequence[TokenizedInput],
    schema: EventSchema,
    config: DecodeConfig | None = None,
    max_span_len: int = DEFAULT_MAX_SPAN_LEN,
) -> list[DecodeResult]:
    """Decode several inputs, preserving order.

    ``scorer`` may be one shared scorer or one scorer per input.  Items
    are processed independently; if any fail, a BatchDecodeError carries
    every per-item error along with its input index.
    """
    if hasattr(scorer, "next_distribution"):
        scorers = [scorer] * len(inputs)
    else:
        scorers = list(scorer)
        if len(scorers) != len(inputs):
            raise ValueError(
                f"got {len(scorers)} scorers for {len(inputs)} inputs"
            )
    results: list[DecodeResult | None] = []
    errors: list[tuple[int, DecodeError]] = []
    for i, (one, inp) in enumerate(zip(scorers, inputs)):
        try:
            results.append(constrained_decode(one, inp, schema, config, max_span_len))
        except DecodeError as err:
            results.append(None)
            errors.append((i, err))
    if errors:
        raise BatchDecodeError(errors)
    return results


class BatchDecodeError(DecodeError):
    """One or more items of a batch failed; ``errors`` lists (index, error)."""

    def __init__(self, errors: list[tuple[int, DecodeError]]):
        self.errors = errors
        summary = "; ".join(f"item {i}: {err}" for i, err in errors[:3])
        more = f" (+{len(errors) - 3} more)" if len(errors) > 3 else ""
        super().__init__(f"{len(errors)} item(s) failed: {summary}{more}")


def sequence_nll(
    scorer: Scorer, inp: TokenizedInput, target: Sequence[str]
) -> float:
    """Negative log-likelihood of a linearized body under the scorer.

    The body is bracketed with sentinels internally; every token after
    BOS is scored, the end sentinel included.  A zero-probability target
    token makes the whole value +inf.
    """
    stream = (BOS, *target, EOS)
    total = 0.0
    for i in range(1, len(stream)):
        dist = scorer.next_distribution(inp, stream[:i])
        p = _checked_prob(dist, stream[i])
        if p == 0.0:
            return float("inf")
        total -= math.log(p)
    return total

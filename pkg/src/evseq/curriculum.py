"""Substructure curriculum construction and synthetic training corpora.

A substructure unit is one flat "( label span )" fragment: the event
type with its trigger words, or a role with its argument words.  Easy
targets made of such units are trained first, the full nested structures
second.  For the count-based scorer the two passes are weighted by
epoch counts and simply added into one count table.

The synthetic generator plants mentions into filler sentences so that
every mention occurs exactly once per sentence and triggers appear in
record order; grounding therefore reconstructs the planted offsets
exactly, which makes end-to-end pipeline tests deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Sequence

from .codec import Argument, EventRecord, Mention, linearize, to_tree
from .dataio import Example
from .decoder import sequence_nll
from .schema import EventSchema, split_label
from .scorers import NgramScorer, train_ngram
from .span_index import TokenizedInput
from .tokens import CLOSE, OPEN, RESERVED_TOKENS

Pair = tuple[TokenizedInput, Sequence[EventRecord]]
TargetPair = tuple[TokenizedInput, tuple[str, ...]]


def substructure_units(
    records: Sequence[EventRecord],
) -> list[tuple[str, tuple[str, ...]]]:
    """(label, span tokens) units in record order: each trigger, then its args.

    Records follow trigger appearance order and arguments follow span
    appearance order within their record, matching the linearized form.
    """
    units = []
    for event in to_tree(records).children:
        units.append((event.label, event.span))
        for arg in event.children:
            units.append((arg.label, arg.span))
    return units


def extract_substructures(
    inp: TokenizedInput,
    records: Sequence[EventRecord],
    mode: str = "concatenated",
) -> list[TargetPair]:
    """Build flat substructure training pairs for one sentence.

    concatenated: one pair whose target wraps all units in a single
    root, "( ( Transport returned ) ( Artifact The man ) ... )"; a
    sentence with no events yields the target "( )".
    per_unit: one root-wrapped pair per unit.
    """
    if mode not in ("concatenated", "per_unit"):
        raise ValueError(f"unknown substructure mode {mode!r}")
    rendered = [
        (OPEN, *split_label(label), *span, CLOSE)
        for label, span in substructure_units(records)
    ]
    if mode == "per_unit":
        return [(inp, (OPEN, *unit, CLOSE)) for unit in rendered]
    body: list[str] = [OPEN]
    for unit in rendered:
        body.extend(unit)
    body.append(CLOSE)
    return [(inp, tuple(body))]


DEFAULT_WORDS = (
    "alder", "basil", "cedar", "dahlia", "elm", "fennel", "garnet", "hazel",
    "iris", "jasper", "kelp", "laurel", "maple", "nettle", "olive", "poplar",
    "quartz", "rowan", "sage", "tulip", "umber", "violet", "willow", "yarrow",
    "anchor", "bridge", "canal", "dock", "engine", "ferry", "glacier", "harbor",
    "island", "jetty", "keel", "lagoon", "meadow", "north", "orchard", "plaza",
    "quarry", "river", "summit", "tunnel", "upland", "valley", "wharf", "zenith",
)


def generate_synthetic(
    schema: EventSchema,
    vocab: Sequence[str] = DEFAULT_WORDS,
    seed: int = 0,
    n_sentences: int = 100,
    max_events: int = 3,
    max_args: int = 3,
) -> list[Example]:
    """Plant schema-valid events into filler sentences, deterministically.

    Mention words are drawn without replacement within a sentence and
    filler words only from the leftovers, so every mention's token
    sequence occurs exactly once.  Event count per sentence is uniform
    on 0..max_events, so a fraction of sentences carry no events.
    """
    label_tokens = set()
    for event_type in schema.types:
        label_tokens.update(split_label(event_type))
        for role in schema.roles(event_type):
            label_tokens.update(split_label(role))
    words = [w for w in vocab if w not in label_tokens and w not in RESERVED_TOKENS]
    if len(words) < 12:
        raise ValueError(
            f"need at least 12 usable filler words, got {len(words)} "
            "after removing schema label tokens"
        )
    rng = random.Random(seed)
    examples = []
    for i in range(n_sentences):
        pool = list(words)
        rng.shuffle(pool)
        planned = []  # (event_type, trigger tokens, [(role, arg tokens)])
        for _ in range(rng.randint(0, max_events)):
            event_type = rng.choice(schema.types)
            roles = schema.roles(event_type)
            n_args = rng.randint(0, min(max_args, len(roles)))
            # keep a few words back so filler positions stay fillable
            if len(pool) < 2 + 2 * n_args + 4:
                break
            trigger = [pool.pop() for _ in range(rng.randint(1, 2))]
            args = [
                (role, [pool.pop() for _ in range(rng.randint(1, 2))])
                for role in rng.sample(roles, n_args)
            ]
            planned.append((event_type, trigger, args))

        spans = []  # (event index, arg index or None, tokens)
        for ei, (_, trigger, args) in enumerate(planned):
            spans.append((ei, None, trigger))
            for ai, (_, toks) in enumerate(args):
                spans.append((ei, ai, toks))
        rng.shuffle(spans)
        sentence: list[str] = []
        starts: dict[tuple[int, int | None], int] = {}
        for ei, ai, toks in spans:
            for _ in range(rng.randint(0, 2)):
                sentence.append(rng.choice(pool))
            starts[(ei, ai)] = len(sentence)
            sentence.extend(toks)
        for _ in range(rng.randint(0, 2)):
            sentence.append(rng.choice(pool))
        if not sentence:
            sentence = [rng.choice(pool) for _ in range(rng.randint(1, 3))]

        inp = TokenizedInput.from_tokens(sentence)

        def mention(toks: list[str], start: int) -> Mention:
            return Mention(" ".join(toks), start, inp.char_spans[start][0])

        records = []
        for ei, (event_type, trigger, args) in enumerate(planned):
            arguments = tuple(
                Argument(role, mention(toks, starts[(ei, ai)]))
                for ai, (role, toks) in enumerate(args)
            )
            arguments = tuple(
                sorted(arguments, key=lambda a: (a.mention.token_start, a.role))
            )
            records.append(
                EventRecord(event_type, mention(trigger, starts[(ei, None)]), arguments)
            )
        records.sort(key=lambda r: (r.trigger.token_start, r.type))
        examples.append(Example(f"synth-{seed}-{i:04d}", inp, tuple(records)))
    return examples


def dataset_stats(examples: Sequence[Example]) -> dict:
    """Corpus shape summary: sentence, event, and argument totals."""
    n_events = sum(len(ex.records) for ex in examples)
    n_args = sum(len(r.args) for ex in examples for r in ex.records)
    return {
        "sentences": len(examples),
        "sentences_with_events": sum(1 for ex in examples if ex.records),
        "events": n_events,
        "arguments": n_args,
        "event_types": len({r.type for ex in examples for r in ex.records}),
    }


def split_corpus(
    pairs: Sequence[Pair], heldout_fraction: float = 0.2, seed: int = 0
) -> tuple[list[Pair], list[Pair]]:
    """Deterministic shuffle split into (train, heldout); both non-empty."""
    items = list(pairs)
    if len(items) < 2:
        raise ValueError("need at least 2 sentences to split off a held-out set")
    if not 0.0 < heldout_fraction < 1.0:
        raise ValueError("heldout_fraction must be in (0, 1)")
    order = list(range(len(items)))
    random.Random(seed).shuffle(order)
    n_held = min(max(1, round(heldout_fraction * len(items))), len(items) - 1)
    held_idx = set(order[:n_held])
    train = [items[i] for i in range(len(items)) if i not in held_idx]
    heldout = [items[i] for i in range(len(items)) if i in held_idx]
    return train, heldout


@dataclass(frozen=True)
class CurriculumResult:
    """Both training regimes plus their held-out NLLs, side by side."""

    scorer_curriculum: NgramScorer
    scorer_direct: NgramScorer
    heldout_nll_curriculum: float
    heldout_nll_direct: float
    n_train: int
    n_heldout: int

    def format_text(self) -> str:
        return (
            f"train sentences:    {self.n_train}\n"
            f"held-out sentences: {self.n_heldout}\n"
            f"held-out NLL (curriculum): {self.heldout_nll_curriculum:.4f}\n"
            f"held-out NLL (direct):     {self.heldout_nll_direct:.4f}"
        )


def _label_vocab(pairs: Iterable[Pair]) -> set[str]:
    vocab: set[str] = set()
    for _, records in pairs:
        for record in records:
            vocab.update(split_label(record.type))
            for arg in record.args:
                vocab.update(split_label(arg.role))
    return vocab


def curriculum_train(
    corpus: Sequence[Pair],
    n: int = 3,
    alpha: float = 0.1,
    copy_boost: float = 4.0,
    sub_epochs: int = 5,
    full_epochs: int = 30,
    heldout_fraction: float = 0.2,
    seed: int = 0,
    mode: str = "concatenated",
) -> CurriculumResult:
    """Train curriculum and direct regimes, score both on held-out NLL.

    The curriculum scorer counts substructure targets ``sub_epochs``
    times and full targets ``full_epochs`` times (epochs act as pass
    weights for a count model); the direct scorer is exactly one pass
    over full targets.  Label tokens from the whole corpus are folded
    into the vocabulary so held-out NLLs stay finite under smoothing.
    """
    train, heldout = split_corpus(corpus, heldout_fraction, seed)
    extra_vocab = _label_vocab(corpus)
    full = [(inp, linearize(records)) for inp, records in train]
    subs: list[TargetPair] = []
    for inp, records in train:
        subs.extend(extract_substructures(inp, records, mode))
    scorer_curriculum = train_ngram(
        subs * sub_epochs + full * full_epochs, n, alpha, copy_boost, extra_vocab
    )
    scorer_direct = train_ngram(full, n, alpha, copy_boost, extra_vocab)
    heldout_targets = [(inp, linearize(records)) for inp, records in heldout]
    nll_curriculum = fmean(
        sequence_nll(scorer_curriculum, inp, target) for inp, target in heldout_targets
    )
    nll_direct = fmean(
        sequence_nll(scorer_direct, inp, target) for inp, target in heldout_targets
    )
    return CurriculumResult(
        scorer_curriculum,
        scorer_direct,
        nll_curriculum,
        nll_direct,
        len(train),
        len(heldout),
    )

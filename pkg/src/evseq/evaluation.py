"""Trigger and argument identification/classification scoring.

Four micro-averaged metrics over a corpus of (gold, predicted) record
lists aligned by sentence id:

  Trig-I  trigger token span matches
  Trig-C  Trig-I and the event type matches
  Arg-I   argument token span and the containing event type match
  Arg-C   Arg-I and the role matches

Matching is one-to-one and greedy in reading order: each predicted item
claims the first still-unmatched gold item with an equal key.  Because
keys are compared by equality only, this greedy scheme is optimal (it
matches min(gold, predicted) occurrences of every key); the test suite
verifies that against an exhaustive matcher.

Gold mentions must be grounded.  Ungrounded predictions are kept and
simply never match, which charges them to precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .codec import EventRecord


def safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class MetricCounts:
    gold: int = 0
    predicted: int = 0
    matched: int = 0

    def __post_init__(self):
        if self.matched > min(self.gold, self.predicted):
            raise ValueError("matched count exceeds gold or predicted count")

    def __add__(self, other: "MetricCounts") -> "MetricCounts":
        return MetricCounts(
            self.gold + other.gold,
            self.predicted + other.predicted,
            self.matched + other.matched,
        )

    @property
    def precision(self) -> float:
        return safe_div(self.matched, self.predicted)

    @property
    def recall(self) -> float:
        return safe_div(self.matched, self.gold)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return safe_div(2 * p * r, p + r)


METRIC_NAMES = ("trig_i", "trig_c", "arg_i", "arg_c")
_METRIC_LABELS = {
    "trig_i": "Trig-I",
    "trig_c": "Trig-C",
    "arg_i": "Arg-I",
    "arg_c": "Arg-C",
}


@dataclass(frozen=True)
class EvalReport:
    trig_i: MetricCounts
    trig_c: MetricCounts
    arg_i: MetricCounts
    arg_c: MetricCounts

    def counts(self, metric: str) -> MetricCounts:
        if metric not in METRIC_NAMES:
            raise KeyError(f"unknown metric {metric!r}")
        return getattr(self, metric)

    def as_dict(self) -> dict:
        out = {}
        for metric in METRIC_NAMES:
            c = self.counts(metric)
            out[metric] = {
                "gold": c.gold,
                "predicted": c.predicted,
                "matched": c.matched,
                "precision": c.precision,
                "recall": c.recall,
                "f1": c.f1,
            }
        return out

    def format_text(self) -> str:
        lines = []
        for metric in METRIC_NAMES:
            c = self.counts(metric)
            lines.append(
                f"{_METRIC_LABELS[metric]:7s} P={c.precision:.4f} R={c.recall:.4f} "
                f"F1={c.f1:.4f}  (gold {c.gold}, predicted {c.predicted}, "
                f"matched {c.matched})"
            )
        return "\n".join(lines)


def _trigger_items(records: Sequence[EventRecord], classified: bool) -> list[tuple]:
    items = []
    for record in records:
        key = (record.trigger.token_start, record.trigger.token_end)
        items.append(key + (record.type,) if classified else key)
    return items


def _argument_items(records: Sequence[EventRecord], classified: bool) -> list[tuple]:
    items = []
    for record in records:
        for arg in record.args:
            key = (arg.mention.token_start, arg.mention.token_end, record.type)
            items.append(key + (arg.role,) if classified else key)
    return items


def _greedy_match(gold_items: list[tuple], pred_items: list[tuple]) -> int:
    """Reading-order one-to-one matching; each gold item used at most once."""
    used = [False] * len(gold_items)
    matched = 0
    for pred in pred_items:
        for j, gold in enumerate(gold_items):
            if not used[j] and gold == pred:
                used[j] = True
                matched += 1
                break
    return matched


def _require_grounded(records: Sequence[EventRecord], sent_id: str) -> None:
    for record in records:
        if not record.trigger.grounded:
            raise ValueError(
                f"gold trigger {record.trigger.text!r} in sentence {sent_id!r} "
                "has no offsets"
            )
        for arg in record.args:
            if not arg.mention.grounded:
                raise ValueError(
                    f"gold argument {arg.mention.text!r} in sentence {sent_id!r} "
                    "has no offsets"
                )


SentencePair = tuple[str, Sequence[EventRecord]]


def evaluate(
    gold: Iterable[SentencePair], predicted: Iterable[SentencePair]
) -> EvalReport:
    """Score predictions against gold; both are (sentence_id, records) pairs.

    The two sequences must be aligned: same length, same ids in the same
    order.  Gold records must carry offsets; ungrounded predicted
    mentions count as unmatched predictions.
    """
    gold = list(gold)
    predicted = list(predicted)
    if len(gold) != len(predicted):
        raise ValueError(
            f"gold has {len(gold)} sentences but predictions have {len(predicted)}"
        )
    totals = {metric: MetricCounts() for metric in METRIC_NAMES}
    extractors = {
        "trig_i": lambda recs: _trigger_items(recs, classified=False),
        "trig_c": lambda recs: _trigger_items(recs, classified=True),
        "arg_i": lambda recs: _argument_items(recs, classified=False),
        "arg_c": lambda recs: _argument_items(recs, classified=True),
    }
    for (gold_id, gold_records), (pred_id, pred_records) in zip(gold, predicted):
        if gold_id != pred_id:
            raise ValueError(
                f"sentence id mismatch: gold {gold_id!r} vs predicted {pred_id!r}"
            )
        _require_grounded(gold_records, gold_id)
        for metric, extract in extractors.items():
            gold_items = extract(gold_records)
            pred_items = extract(pred_records)
            counts = MetricCounts(
                len(gold_items),
                len(pred_items),
                _greedy_match(gold_items, pred_items),
            )
            totals[metric] = totals[metric] + counts
    return EvalReport(**totals)

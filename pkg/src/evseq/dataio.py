"""Line-delimited dataset files: one sentence and its event records per line.

Each line is a JSON object:

    {"id": "s1", "text": "...", "events": [
        {"type": "Transport",
         "trigger": {"text": "returned", "start": 2},
         "args": [{"role": "Artifact", "text": "The man", "start": 0}]}]}

``start`` is a token index into the tokenization of ``text``; null marks
an ungrounded mention (predictions may contain those, gold should not).
Offsets are validated on read: the tokens at ``start`` must equal the
mention's own tokens.  Files are UTF-8, one object per line, and are
written deterministically so identical data produces identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .codec import Argument, EventRecord, Mention
from .span_index import TokenizedInput, tokenize


class DataError(ValueError):
    """Malformed dataset content; carries a ``location`` such as file:line."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True)
class Example:
    """One dataset row: a sentence with its (possibly empty) record list."""

    id: str
    inp: TokenizedInput
    records: tuple[EventRecord, ...]

    @property
    def pair(self) -> tuple[TokenizedInput, tuple[EventRecord, ...]]:
        return (self.inp, self.records)


def _mention_from_obj(
    obj, inp: TokenizedInput, what: str, location: str
) -> Mention:
    if not isinstance(obj, dict) or "text" not in obj:
        raise DataError(f"{what} must be an object with a 'text' field", location)
    text = obj["text"]
    start = obj.get("start")
    if not isinstance(text, str) or not text:
        raise DataError(f"{what} text must be a non-empty string", location)
    if start is None:
        return Mention(text)
    if not isinstance(start, int) or start < 0:
        raise DataError(f"{what} start must be a non-negative token index", location)
    toks = tokenize(text).tokens
    if tuple(inp.tokens[start : start + len(toks)]) != toks:
        raise DataError(
            f"{what} {text!r} does not match the input tokens at index {start}",
            location,
        )
    return Mention(text, start, inp.char_spans[start][0])


def _example_from_obj(obj, location: str) -> Example:
    if not isinstance(obj, dict):
        raise DataError("each line must be a JSON object", location)
    for field in ("id", "text", "events"):
        if field not in obj:
            raise DataError(f"missing field {field!r}", location)
    inp = tokenize(obj["text"])
    records = []
    for event in obj["events"]:
        if not isinstance(event, dict) or "type" not in event or "trigger" not in event:
            raise DataError("event must have 'type' and 'trigger' fields", location)
        trigger = _mention_from_obj(event["trigger"], inp, "trigger", location)
        args = []
        for arg in event.get("args", ()):
            if not isinstance(arg, dict) or "role" not in arg:
                raise DataError("argument must have a 'role' field", location)
            args.append(
                Argument(
                    arg["role"],
                    _mention_from_obj(arg, inp, f"argument {arg['role']!r}", location),
                )
            )
        records.append(EventRecord(event["type"], trigger, tuple(args)))
    return Example(str(obj["id"]), inp, tuple(records))


def read_dataset(path) -> list[Example]:
    examples = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            location = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataError(f"invalid JSON: {err}", location) from None
            examples.append(_example_from_obj(obj, location))
    return examples


def _mention_to_obj(mention: Mention) -> dict:
    return {"text": mention.text, "start": mention.token_start}


def example_to_obj(example: Example) -> dict:
    return {
        "id": example.id,
        "text": example.inp.text,
        "events": [
            {
                "type": record.type,
                "trigger": _mention_to_obj(record.trigger),
                "args": [
                    {"role": arg.role, **_mention_to_obj(arg.mention)}
                    for arg in record.args
                ],
            }
            for record in example.records
        ],
    }


def write_dataset(examples: Iterable[Example], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps(example_to_obj(example), ensure_ascii=False))
            handle.write("\n")


def scored_pairs(
    examples: Sequence[Example],
) -> list[tuple[str, tuple[EventRecord, ...]]]:
    """The (sentence id, records) view the evaluator consumes."""
    return [(example.id, example.records) for example in examples]

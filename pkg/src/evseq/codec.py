"""Event records and their linearized parenthesized form.

An extraction result is a list of event records; each record names an
event type, a trigger mention and a list of role-labelled argument
mentions.  The linearized form wraps the whole list in one pair of
parentheses and each event and argument in its own pair:

    ( ( Transport returned ( Artifact The man ) ( Origin Mexico ) ) )

Multi-token labels contribute one token per word part, so the event
type "Arrest-Jail" appears as the two tokens "Arrest Jail".  An empty
record list linearizes to "( )".  Sibling order is span appearance
order: events sort by trigger offset, arguments within an event by
argument offset, which is why linearization requires grounded mentions.

``delinearize`` inverts ``linearize`` on well-formed sequences, up to
the offsets (a surface parse cannot know them).  When a label is a
token-prefix of another label the boundary between label and mention is
ambiguous; both this parser and the constrained decoder resolve the tie
by taking the longest matching label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .schema import EventSchema, LabelTrie, build_role_tries, build_type_trie, split_label
from .span_index import tokenize
from .tokens import BOS, CLOSE, EOS, OPEN, RESERVED_TOKENS, SENTINEL_TOKENS


class CodecError(ValueError):
    """Malformed records or token sequence; ``position`` indexes the input."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


@dataclass(frozen=True)
class Mention:
    """A surface text span, optionally anchored in the source sentence.

    ``token_start`` is the index of the mention's first token in the
    tokenized source; ``char_start`` the character offset of that token.
    Both are None while the mention is ungrounded.
    """

    text: str
    token_start: int | None = None
    char_start: int | None = None

    def __post_init__(self):
        if not self.text:
            raise CodecError("mention text must be non-empty")

    @property
    def tokens(self) -> tuple[str, ...]:
        return tokenize(self.text).tokens

    @property
    def token_end(self) -> int | None:
        """Exclusive end token index, when grounded."""
        if self.token_start is None:
            return None
        return self.token_start + len(self.tokens)

    @property
    def grounded(self) -> bool:
        return self.token_start is not None


@dataclass(frozen=True)
class Argument:
    role: str
    mention: Mention


@dataclass(frozen=True)
class EventRecord:
    type: str
    trigger: Mention
    args: tuple[Argument, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


def mention_tokens(text: str) -> tuple[str, ...]:
    """Token form of a mention; rejects empty and reserved-token mentions."""
    toks = tokenize(text).tokens
    if not toks:
        raise CodecError(f"mention text {text!r} contains no tokens")
    for tok in toks:
        if tok in RESERVED_TOKENS:
            raise CodecError(f"mention text {text!r} contains reserved token {tok!r}")
    return toks


def add_sentinels(tokens: Sequence[str]) -> tuple[str, ...]:
    return (BOS, *tokens, EOS)


def strip_sentinels(tokens: Sequence[str]) -> tuple[str, ...]:
    """Drop a leading BOS and trailing EOS; both must be present."""
    if len(tokens) < 2 or tokens[0] != BOS or tokens[-1] != EOS:
        raise CodecError(f"sequence is not bracketed by {BOS} and {EOS}")
    return tuple(tokens[1:-1])


def _require_offset(mention: Mention, what: str) -> int:
    if mention.token_start is None:
        raise CodecError(f"{what} {mention.text!r} is missing its token offset")
    return mention.token_start


def _mention_sort_key(mention: Mention, name: str) -> tuple:
    # appearance order; ties by span end, then by label name
    return (_require_offset(mention, "mention"), mention.token_end, name)


def _ordered_records(records: Iterable[EventRecord]) -> list[EventRecord]:
    ordered = []
    for record in records:
        _require_offset(record.trigger, f"trigger of {record.type}")
        args = sorted(record.args, key=lambda a: _mention_sort_key(a.mention, a.role))
        ordered.append(EventRecord(record.type, record.trigger, tuple(args)))
    ordered.sort(key=lambda r: _mention_sort_key(r.trigger, r.type))
    return ordered


def _check_against_schema(record: EventRecord, schema: EventSchema | None) -> None:
    if schema is None:
        return
    if record.type not in schema:
        raise CodecError(f"unknown event type {record.type!r}")
    allowed = schema.roles(record.type)
    for arg in record.args:
        if arg.role not in allowed:
            raise CodecError(
                f"role {arg.role!r} not permitted for event type {record.type!r}"
            )


def linearize(
    records: Iterable[EventRecord], schema: EventSchema | None = None
) -> tuple[str, ...]:
    """Encode ``records`` as one balanced parenthesized token sequence.

    Every mention must carry a token offset: siblings are emitted in
    span appearance order (ties broken by span end, then label name).
    Types and roles are validated when a schema is supplied.
    """
    out: list[str] = [OPEN]
    for record in _ordered_records(records):
        _check_against_schema(record, schema)
        out.append(OPEN)
        out.extend(split_label(record.type))
        out.extend(mention_tokens(record.trigger.text))
        for arg in record.args:
            out.append(OPEN)
            out.extend(split_label(arg.role))
            out.extend(mention_tokens(arg.mention.text))
            out.append(CLOSE)
        out.append(CLOSE)
    out.append(CLOSE)
    return tuple(out)


@dataclass(frozen=True)
class TreeNode:
    """Labeled tree form: a label, its mention tokens, and child nodes.

    The root carries no label and no span; its children are event nodes
    whose children are argument nodes.
    """

    label: str | None
    span: tuple[str, ...]
    children: tuple["TreeNode", ...] = ()


def to_tree(
    records: Iterable[EventRecord], schema: EventSchema | None = None
) -> TreeNode:
    """Arrange records as a labeled tree under a virtual root."""
    events = []
    for record in _ordered_records(records):
        _check_against_schema(record, schema)
        args = tuple(
            TreeNode(arg.role, mention_tokens(arg.mention.text)) for arg in record.args
        )
        events.append(TreeNode(record.type, mention_tokens(record.trigger.text), args))
    return TreeNode(None, (), tuple(events))


def tree_to_seq(tree: TreeNode) -> tuple[str, ...]:
    """Render a labeled tree depth-first into the parenthesized form."""
    out: list[str] = []

    def render(node: TreeNode) -> None:
        out.append(OPEN)
        if node.label is not None:
            out.extend(split_label(node.label))
        out.extend(node.span)
        for child in node.children:
            render(child)
        out.append(CLOSE)

    render(tree)
    return tuple(out)


class _Parser:
    """Cursor-based parser over one linearized token sequence."""

    def __init__(self, tokens: Sequence[str], schema: EventSchema):
        self.tokens = tuple(tokens)
        self.schema = schema
        self.type_trie = build_type_trie(schema)
        self.role_tries = build_role_tries(schema)
        self.pos = 0

    def fail(self, message: str, position: int | None = None) -> CodecError:
        return CodecError(message, self.pos if position is None else position)

    def peek(self) -> str:
        if self.pos >= len(self.tokens):
            raise CodecError("unexpected end of sequence", len(self.tokens))
        return self.tokens[self.pos]

    def expect(self, token: str) -> None:
        got = self.peek()
        if got != token:
            raise self.fail(f"expected {token!r}, found {got!r}")
        self.pos += 1

    def parse(self) -> tuple[EventRecord, ...]:
        self.expect(OPEN)
        records = []
        while self.peek() != CLOSE:
            records.append(self.parse_event())
        self.pos += 1  # root CLOSE
        if self.pos != len(self.tokens):
            raise self.fail(f"trailing token {self.tokens[self.pos]!r} after root close")
        return tuple(records)

    def parse_event(self) -> EventRecord:
        self.expect(OPEN)
        event_type = self.match_label(self.type_trie, "event type")
        trigger = self.parse_span("trigger", stop={OPEN, CLOSE})
        args = []
        while self.peek() == OPEN:
            self.pos += 1
            role = self.match_label(self.role_tries[event_type], "role")
            span = self.parse_span("argument", stop={CLOSE})
            self.expect(CLOSE)
            args.append(Argument(role, Mention(" ".join(span))))
        self.expect(CLOSE)
        return EventRecord(event_type, Mention(" ".join(trigger)), tuple(args))

    def match_label(self, trie: LabelTrie, kind: str) -> str:
        """Consume the longest label the trie matches from the cursor."""
        start = self.pos
        node = trie.root
        best: str | None = None
        best_end = start
        i = start
        while i < len(self.tokens) and self.tokens[i] in node.children:
            node = node.children[self.tokens[i]]
            i += 1
            if node.label is not None:
                best = node.label
                best_end = i
        if best is None:
            found = self.tokens[start] if start < len(self.tokens) else "<end>"
            raise self.fail(f"unknown {kind} {found!r}", start)
        self.pos = best_end
        return best

    def parse_span(self, kind: str, stop: set[str]) -> tuple[str, ...]:
        span: list[str] = []
        while True:
            token = self.peek()
            if token in stop:
                break
            if token in SENTINEL_TOKENS:
                raise self.fail(f"sentinel {token!r} inside {kind} mention")
            if token == OPEN:
                raise self.fail(f"unexpected {OPEN!r} inside {kind} mention")
            span.append(token)
            self.pos += 1
        if not span:
            raise self.fail(f"empty {kind} mention")
        return tuple(span)


def delinearize(tokens: Sequence[str], schema: EventSchema) -> tuple[EventRecord, ...]:
    """Parse a linearized sequence back into event records.

    Total over arbitrary token sequences: either the records come back
    or a CodecError pinpoints the first offending token position.  The
    sequence must not include sentinels (see ``strip_sentinels``).
    Mention offsets are unknown at this level, so every mention comes
    back with ``token_start=None``.
    """
    return _Parser(tokens, schema).parse()

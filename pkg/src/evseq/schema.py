"""Event schemas and tries over multi-token label names.

A schema maps each event-type name to the argument roles it permits.
Label names are split into word tokens (hyphens and whitespace are
separators), and the resulting token sequences are indexed in tries so
that a decoder can walk label names one token at a time.  Schemas and
tries are immutable after construction and safe to share across
concurrent decoders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

LabelTokenizer = Callable[[str], tuple[str, ...]]

_NAME_RE = re.compile(r"[A-Za-z0-9-]+\Z")


class SchemaError(ValueError):
    """Invalid schema content; carries a ``location`` such as ``file:line``."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def split_label(label: str) -> tuple[str, ...]:
    """Split a label name into word tokens at hyphens and whitespace.

    This is the default label tokenizer; any callable with the same
    signature can be supplied to the trie builders to swap in e.g. a
    subword tokenizer.

    >>> split_label("Transfer-Ownership")
    ('Transfer', 'Ownership')
    """
    return tuple(part for part in re.split(r"[-\s]+", label) if part)


def _check_name(name: str, kind: str, location: str | None = None) -> None:
    if not name:
        raise SchemaError(f"empty {kind} name", location)
    if not _NAME_RE.match(name):
        raise SchemaError(
            f"invalid {kind} name {name!r}: only letters, digits and hyphen allowed",
            location,
        )
    if not split_label(name):
        raise SchemaError(f"{kind} name {name!r} contains no word tokens", location)


@dataclass(frozen=True)
class EventSchema:
    """Ordered mapping from event-type names to their permitted role names.

    Declaration order is preserved and defines iteration order everywhere.
    """

    event_types: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        if not self.event_types:
            raise SchemaError("empty schema: at least one event type required")
        normalized: dict[str, tuple[str, ...]] = {}
        for type_name, roles in self.event_types.items():
            _check_name(type_name, "event type")
            seen: set[str] = set()
            for role in roles:
                _check_name(role, "role")
                if role in seen:
                    raise SchemaError(
                        f"duplicate role {role!r} in event type {type_name!r}"
                    )
                seen.add(role)
            normalized[type_name] = tuple(roles)
        object.__setattr__(self, "event_types", normalized)

    @property
    def types(self) -> tuple[str, ...]:
        return tuple(self.event_types)

    def roles(self, event_type: str) -> tuple[str, ...]:
        try:
            return self.event_types[event_type]
        except KeyError:
            raise SchemaError(f"unknown event type {event_type!r}") from None

    def __contains__(self, event_type: str) -> bool:
        return event_type in self.event_types

    def __iter__(self) -> Iterator[str]:
        return iter(self.event_types)


def parse_schema(text: str, source_name: str = "<schema>") -> EventSchema:
    """Parse the line-oriented schema document format.

    One event type per line: ``TypeName: Role1, Role2``.  The role list
    may be empty.  Lines starting with ``#`` and blank lines are ignored.
    """
    event_types: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        location = f"{source_name}:{lineno}"
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if ":" not in stripped:
            raise SchemaError(
                f"malformed line {stripped!r}: expected 'TypeName: Role1, Role2, ...'",
                location,
            )
        name_part, _, roles_part = stripped.partition(":")
        type_name = name_part.strip()
        _check_name(type_name, "event type", location)
        if type_name in event_types:
            raise SchemaError(f"duplicate event type {type_name!r}", location)
        roles: list[str] = []
        roles_part = roles_part.strip()
        if roles_part:
            for raw_role in roles_part.split(","):
                role = raw_role.strip()
                _check_name(role, "role", location)
                if role in roles:
                    raise SchemaError(
                        f"duplicate role {role!r} in event type {type_name!r}",
                        location,
                    )
                roles.append(role)
        event_types[type_name] = tuple(roles)
    if not event_types:
        raise SchemaError("empty schema: no event types declared", source_name)
    return EventSchema(event_types)


def load_schema(path) -> EventSchema:
    """Read and validate a schema document from ``path``."""
    with open(path, encoding="utf-8") as handle:
        return parse_schema(handle.read(), source_name=str(path))


class TrieNode:
    """One trie node: a token, its children, and the label it completes."""

    __slots__ = ("token", "children", "label")

    def __init__(self, token: str | None = None):
        self.token = token
        self.children: dict[str, TrieNode] = {}
        self.label: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


@dataclass(frozen=True)
class LabelTrie:
    """Immutable trie whose root-to-leaf paths spell label token sequences.

    A node may be both a leaf and an inner node when one label is a
    strict token-prefix of another; the shorter label keeps its explicit
    leaf marker and both continuations remain reachable.
    """

    root: TrieNode = field(default_factory=TrieNode)

    @classmethod
    def build(
        cls,
        labels: Iterable[str],
        tokenizer: LabelTokenizer = split_label,
    ) -> "LabelTrie":
        root = TrieNode()
        for label in labels:
            tokens = tokenizer(label)
            if not tokens:
                raise SchemaError(f"label {label!r} tokenizes to zero tokens")
            node = root
            for token in tokens:
                node = node.children.setdefault(token, TrieNode(token))
            if node.label is not None and node.label != label:
                raise SchemaError(
                    f"labels {node.label!r} and {label!r} tokenize identically"
                )
            node.label = label
        return cls(root)

    @property
    def is_empty(self) -> bool:
        return not self.root.children

    def node(self, prefix: Sequence[str]) -> TrieNode:
        """Return the node reached by ``prefix``; KeyError if no such path."""
        node = self.root
        for i, token in enumerate(prefix):
            try:
                node = node.children[token]
            except KeyError:
                raise KeyError(
                    f"prefix {list(prefix[: i + 1])!r} is not a path in the trie"
                ) from None
        return node

    def children(self, prefix: Sequence[str]) -> Mapping[str, TrieNode]:
        return self.node(prefix).children

    def lookup(self, tokens: Sequence[str]) -> str | None:
        """The label completed by exactly ``tokens``, or None."""
        try:
            return self.node(tokens).label
        except KeyError:
            return None

    def paths(self) -> Iterator[tuple[tuple[str, ...], str]]:
        """Yield every (token path, label) pair for nodes marking a label."""

        def walk(node: TrieNode, path: tuple[str, ...]):
            if node.label is not None:
                yield path, node.label
            for token in node.children:
                yield from walk(node.children[token], path + (token,))

        yield from walk(self.root, ())


def tokenize_label(label: str, tokenizer: LabelTokenizer = split_label) -> tuple[str, ...]:
    """Deterministic token sequence for a type or role name."""
    if not label:
        raise SchemaError("cannot tokenize an empty label")
    return tokenizer(label)


def build_type_trie(
    schema: EventSchema, tokenizer: LabelTokenizer = split_label
) -> LabelTrie:
    """Trie whose leaves enumerate exactly the schema's event-type labels."""
    return LabelTrie.build(schema.types, tokenizer)


def build_role_trie(
    schema: EventSchema,
    event_type: str,
    tokenizer: LabelTokenizer = split_label,
) -> LabelTrie:
    """Trie over the roles permitted for ``event_type``.

    A type with zero roles yields a root-only trie.
    """
    return LabelTrie.build(schema.roles(event_type), tokenizer)


def build_role_tries(
    schema: EventSchema, tokenizer: LabelTokenizer = split_label
) -> dict[str, LabelTrie]:
    """Per-type role tries for every event type in the schema."""
    return {t: build_role_trie(schema, t, tokenizer) for t in schema.types}


def trie_children(
    trie: LabelTrie, prefix: Sequence[str]
) -> frozenset[tuple[str, bool]]:
    """Child tokens reachable from ``prefix``, flagged when they complete a label.

    Raises KeyError when ``prefix`` is not a path in the trie.
    """
    return frozenset(
        (token, child.is_leaf) for token, child in trie.children(prefix).items()
    )

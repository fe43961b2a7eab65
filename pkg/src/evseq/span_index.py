"""Input tokenization and the trie of contiguous token spans.

The decoder may only emit mention text that appears verbatim in the
input sentence.  We index every contiguous token subsequence of the
input (up to a length cap) in a trie; walking the trie token by token
enumerates exactly the spans the input supports.

Tokens that collide with the reserved structure tokens never enter the
trie, so a stray "(" in the input text cannot be copied into a mention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .tokens import RESERVED_TOKENS

# Word characters group together; every other non-space character is its
# own token.  "Los Angeles, CA" -> ["Los", "Angeles", ",", "CA"]
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

DEFAULT_MAX_SPAN_LEN = 16


@dataclass(frozen=True)
class TokenizedInput:
    """A sentence with its token sequence and per-token character spans."""

    text: str
    tokens: tuple[str, ...]
    char_spans: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.char_spans):
            raise ValueError("tokens and char_spans must have equal length")

    @classmethod
    def from_text(cls, text: str) -> "TokenizedInput":
        tokens = []
        spans = []
        for match in _TOKEN_RE.finditer(text):
            tokens.append(match.group())
            spans.append(match.span())
        return cls(text, tuple(tokens), tuple(spans))

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "TokenizedInput":
        """Build from a pre-tokenized sentence, joining with single spaces."""
        spans = []
        offset = 0
        for token in tokens:
            spans.append((offset, offset + len(token)))
            offset += len(token) + 1
        return cls(" ".join(tokens), tuple(tokens), tuple(spans))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.tokens)


def tokenize(text: str) -> TokenizedInput:
    """Tokenize ``text`` into word and punctuation tokens with char offsets."""
    return TokenizedInput.from_text(text)


class SpanTrie:
    """Trie over the contiguous token subsequences of one input sentence.

    Nodes are plain nested dicts mapping a token to its child node.  Any
    non-empty path from the root is a span that occurs verbatim in the
    input, so there is no separate terminal marker: a span may always
    end once at least one token has been consumed.  Paths are capped at
    ``max_span_len`` tokens and never cross a reserved token.
    """

    def __init__(self, tokens: Sequence[str], max_span_len: int = DEFAULT_MAX_SPAN_LEN):
        if max_span_len < 1:
            raise ValueError(f"max_span_len must be >= 1, got {max_span_len}")
        self.max_span_len = max_span_len
        self.tokens = tuple(tokens)
        self._root: dict = {}
        for start, token in enumerate(self.tokens):
            if token in RESERVED_TOKENS:
                continue
            node = self._root
            for offset in range(max_span_len):
                pos = start + offset
                if pos >= len(self.tokens):
                    break
                step = self.tokens[pos]
                if step in RESERVED_TOKENS:
                    break
                node = node.setdefault(step, {})

    @property
    def is_empty(self) -> bool:
        """True when the input supports no spans at all."""
        return not self._root

    def _node(self, prefix: Sequence[str]) -> dict:
        node = self._root
        for i, token in enumerate(prefix):
            try:
                node = node[token]
            except KeyError:
                raise KeyError(
                    f"{list(prefix[: i + 1])!r} is not a span prefix of the input"
                ) from None
        return node

    def children(self, prefix: Sequence[str]) -> frozenset[str]:
        """Tokens that can extend ``prefix`` while staying a valid span.

        Raises KeyError when ``prefix`` itself is not a path in the trie.
        """
        return frozenset(self._node(prefix))

    def is_span(self, tokens: Sequence[str]) -> bool:
        """True when ``tokens`` is a non-empty in-vocabulary span."""
        if not tokens or len(tokens) > self.max_span_len:
            return False
        try:
            self._node(tokens)
        except KeyError:
            return False
        return True

    def spans(self) -> Iterator[tuple[str, ...]]:
        """Enumerate every distinct span in the trie (depth-first)."""

        def walk(node: dict, path: tuple[str, ...]):
            for token, child in node.items():
                yield path + (token,)
                yield from walk(child, path + (token,))

        yield from walk(self._root, ())


def build_span_trie(
    inp: TokenizedInput, max_span_len: int = DEFAULT_MAX_SPAN_LEN
) -> SpanTrie:
    """Index every contiguous token subsequence of ``inp`` up to the cap."""
    return SpanTrie(inp.tokens, max_span_len)


def span_continuations(trie: SpanTrie, partial: Sequence[str]) -> frozenset[str]:
    """Tokens that extend ``partial`` to a longer span of the same input."""
    return trie.children(partial)


def find_occurrences(
    haystack: Sequence[str], needle: Sequence[str]
) -> list[int]:
    """Start indices of every occurrence of ``needle`` in ``haystack``."""
    if not needle or len(needle) > len(haystack):
        return []
    needle = tuple(needle)
    width = len(needle)
    return [
        i
        for i in range(len(haystack) - width + 1)
        if tuple(haystack[i : i + width]) == needle
    ]

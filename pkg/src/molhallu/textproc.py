"""Tokenization, n-gram extraction, and entity-span extraction.

All text matching in this toolkit runs over normalized token sequences
produced here. The tokenizer also tracks character offsets into the
original string so that transforms (entity masking, entity substitution)
can splice replacements into the raw text without disturbing casing or
punctuation outside the replaced span.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

if TYPE_CHECKING:  # pragma: no cover
    from .lexicon import EntityLexicon

MAX_NGRAM_ORDER = 4

# Sentence punctuation split off the end of a token. Hyphens and
# parentheses are deliberately absent: chemical names depend on them
# ("(-oh)", "sn-1" stay single tokens).
_TERMINAL_PUNCT = frozenset(".,;:!?")

_CHUNK_RE = re.compile(r"\S+")


def normalize_surface(raw: str) -> str:
    """Canonicalize a surface string for matching.

    Unicode NFKC, lowercase, runs of whitespace collapsed to single
    spaces, surrounding whitespace stripped. Hyphens and parentheses are
    preserved. Idempotent; may return an empty string.
    """
    folded = unicodedata.normalize("NFKC", raw).lower()
    return " ".join(folded.split())


class TokenSpan(NamedTuple):
    """One token plus its character extent in the original string."""

    text: str
    start: int
    end: int


def _is_terminal_punct(ch: str) -> bool:
    return unicodedata.normalize("NFKC", ch).lower() in _TERMINAL_PUNCT


def token_spans(text: str) -> list[TokenSpan]:
    """Tokenize ``text``, keeping character offsets.

    Whitespace-delimited chunks are split further: terminal sentence
    punctuation (. , ; : ! ?) peels off into its own tokens, and the
    remainder is normalized via :func:`normalize_surface`. Chunks that
    normalize to nothing (e.g. stray zero-width characters) are dropped.
    """
    spans: list[TokenSpan] = []
    for m in _CHUNK_RE.finditer(text):
        chunk_start, chunk_end = m.start(), m.end()
        cut = chunk_end
        peeled: list[TokenSpan] = []
        while cut > chunk_start and _is_terminal_punct(text[cut - 1]):
            cut -= 1
            peeled.append(
                TokenSpan(normalize_surface(text[cut]), cut, cut + 1)
            )
        peeled.reverse()
        word = normalize_surface(text[chunk_start:cut])
        if word:
            # NFKC can, for rare compatibility characters, introduce a
            # space; such sub-tokens share the chunk's character extent.
            for part in word.split(" "):
                spans.append(TokenSpan(part, chunk_start, cut))
        spans.extend(peeled)
    return spans


@dataclass(frozen=True)
class TokenizedText:
    """Normalized tokens and the string they came from."""

    tokens: tuple[str, ...]
    source: str = ""


def tokenize(text: str) -> TokenizedText:
    """Normalize and split ``text`` into tokens.

    Empty input yields an empty token tuple. Deterministic: tokenizing
    the stored source always reproduces the same tokens.
    """
    return TokenizedText(
        tokens=tuple(s.text for s in token_spans(text)), source=text
    )


@dataclass
class NGramMultiset:
    """Sliding-window n-gram counts for a single order."""

    order: int
    counts: Counter = field(default_factory=Counter)

    def total(self) -> int:
        return sum(self.counts.values())


def extract_ngrams(text: TokenizedText, order: int) -> NGramMultiset:
    """Count the order-``order`` n-grams of ``text``.

    Texts shorter than ``order`` yield an empty multiset. Raises
    ``ValueError`` for orders outside 1..4.
    """
    if not 1 <= order <= MAX_NGRAM_ORDER:
        raise ValueError(f"n-gram order must be in 1..{MAX_NGRAM_ORDER}, got {order}")
    toks = text.tokens
    counts = Counter(
        tuple(toks[i : i + order]) for i in range(len(toks) - order + 1)
    )
    return NGramMultiset(order=order, counts=counts)


@dataclass(frozen=True, order=True)
class EntitySpan:
    """A lexicon hit over a token range: ``tokens[start : start+length]``."""

    start: int
    length: int
    record_id: int


def extract_entities(
    text: TokenizedText, lexicon: "EntityLexicon"
) -> list[EntitySpan]:
    """Greedy leftmost-longest dictionary matching over ``text``.

    Scans left to right; at each position takes the longest lexicon
    match and jumps past it, otherwise advances one token. The returned
    spans are non-overlapping and sorted by start.
    """
    tokens = text.tokens
    spans: list[EntitySpan] = []
    i = 0
    n = len(tokens)
    while i < n:
        hit = lexicon.lookup_longest_at(tokens, i)
        if hit is not None:
            record_id, length = hit
            spans.append(EntitySpan(start=i, length=length, record_id=record_id))
            i += length
        else:
            i += 1
    return spans


def covered_token_indices(
    spans: list[EntitySpan], n_tokens: int
) -> list[bool]:
    """Boolean mask of token indices covered by any entity span."""
    mask = [False] * n_tokens
    for span in spans:
        for j in range(span.start, span.start + span.length):
            mask[j] = True
    return mask


def ngrams_outside_spans(
    text: TokenizedText, spans: list[EntitySpan], order: int
) -> NGramMultiset:
    """N-grams of ``text`` whose windows touch no entity-span token."""
    if not 1 <= order <= MAX_NGRAM_ORDER:
        raise ValueError(f"n-gram order must be in 1..{MAX_NGRAM_ORDER}, got {order}")
    toks = text.tokens
    mask = covered_token_indices(spans, len(toks))
    counts: Counter = Counter()
    for i in range(len(toks) - order + 1):
        if not any(mask[i : i + order]):
            counts[tuple(toks[i : i + order])] += 1
    return NGramMultiset(order=order, counts=counts)

"""Chemical-entity lexicon: loading, validation, indexing, typed sampling.

The lexicon is the toolkit's single named-entity resource. Records carry
one of four type labels (Application, Property, Source, Structure) and
are indexed by their normalized token sequence for longest-match
segmentation. Lexicons are immutable after load and safe to share across
threads; random sampling takes a caller-owned random source.

File formats:
  TSV    one record per line, ``surface<TAB>type``
  JSONL  one record per line, ``{"surface": ..., "type": ...}``
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from random import Random
from typing import Iterable, Iterator, Optional

from .textproc import normalize_surface, tokenize

logger = logging.getLogger(__name__)


class EntityType(str, Enum):
    """The four entity categories a lexicon record may carry."""

    APPLICATION = "Application"
    PROPERTY = "Property"
    SOURCE = "Source"
    STRUCTURE = "Structure"


class LexiconError(Exception):
    """Raised when a lexicon file cannot produce a valid lexicon."""


class NoReplacementError(Exception):
    """No same-type candidate is available for a replacement draw.

    Signals the caller to skip perturbing that entity.
    """


@dataclass(frozen=True)
class EntityRecord:
    """One lexicon entry.

    ``id`` is assigned by load order and is stable for a given file.
    ``normalized`` is non-empty with no surrounding whitespace.
    """

    id: int
    surface: str
    normalized: str
    entity_type: EntityType


@dataclass
class LoadReport:
    """Row accounting for one :func:`load_lexicon` call."""

    loaded: int = 0
    skipped_unknown_type: int = 0
    skipped_empty: int = 0
    duplicates: int = 0

    def to_dict(self) -> dict:
        return {
            "loaded": self.loaded,
            "skipped_unknown_type": self.skipped_unknown_type,
            "skipped_empty": self.skipped_empty,
            "duplicates": self.duplicates,
        }


@dataclass
class EntityLexicon:
    """Indexed set of entity records.

    ``records[i].id == i`` always holds; the token index maps each
    record's normalized token sequence back to its id.
    """

    records: list[EntityRecord] = field(default_factory=list)
    load_report: LoadReport = field(default_factory=LoadReport)
    _by_tokens: dict[tuple[str, ...], int] = field(default_factory=dict)
    _by_type: dict[EntityType, list[int]] = field(default_factory=dict)
    _max_tokens: int = 0

    def __len__(self) -> int:
        return len(self.records)

    @property
    def type_counts(self) -> dict[EntityType, int]:
        counts = {etype: 0 for etype in EntityType}
        for etype, ids in self._by_type.items():
            counts[etype] = len(ids)
        return counts

    def add(self, surface: str, entity_type: EntityType) -> Optional[EntityRecord]:
        """Add one record; returns None for empty or duplicate entries."""
        normalized = normalize_surface(surface)
        if not normalized:
            return None
        key = tuple(tokenize(normalized).tokens)
        if not key or key in self._by_tokens:
            return None
        record = EntityRecord(
            id=len(self.records),
            surface=surface.strip(),
            normalized=normalized,
            entity_type=entity_type,
        )
        self.records.append(record)
        self._by_tokens[key] = record.id
        self._by_type.setdefault(entity_type, []).append(record.id)
        self._max_tokens = max(self._max_tokens, len(key))
        return record

    def lookup_longest_at(
        self, tokens: tuple[str, ...] | list[str], start: int
    ) -> Optional[tuple[int, int]]:
        """Longest record whose token sequence begins at ``tokens[start]``.

        Returns ``(record_id, match_length)`` or None. ``start`` must be
        inside the token sequence.
        """
        if start >= len(tokens):
            raise IndexError(f"start {start} out of range for {len(tokens)} tokens")
        limit = min(self._max_tokens, len(tokens) - start)
        for k in range(limit, 0, -1):
            hit = self._by_tokens.get(tuple(tokens[start : start + k]))
            if hit is not None:
                return hit, k
        return None

    def ids_of_type(self, entity_type: EntityType) -> list[int]:
        return list(self._by_type.get(entity_type, []))


def lookup_longest(
    tokens: tuple[str, ...] | list[str], start: int, lexicon: EntityLexicon
) -> Optional[tuple[int, int]]:
    """Module-level alias for :meth:`EntityLexicon.lookup_longest_at`."""
    return lexicon.lookup_longest_at(tokens, start)


def _iter_tsv(path: Path) -> Iterator[tuple[str, str]]:
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            surface = parts[0]
            etype = parts[1] if len(parts) > 1 else ""
            yield surface, etype


def _iter_jsonl(path: Path) -> Iterator[tuple[str, str]]:
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            yield str(row.get("surface", "")), str(row.get("type", ""))


def build_lexicon(rows: Iterable[tuple[str, str]]) -> EntityLexicon:
    """Assemble a lexicon from (surface, type-label) pairs.

    Rows with an unknown type or an empty normalized surface are skipped
    and counted; duplicate normalized token sequences keep the first
    occurrence. Raises :class:`LexiconError` when no row survives.
    """
    lex = EntityLexicon()
    report = lex.load_report
    for surface, type_label in rows:
        try:
            etype = EntityType(type_label.strip())
        except ValueError:
            report.skipped_unknown_type += 1
            logger.warning("skipping entity %r: unknown type %r", surface, type_label)
            continue
        normalized = normalize_surface(surface)
        if not normalized:
            report.skipped_empty += 1
            continue
        record = lex.add(surface, etype)
        if record is None:
            report.duplicates += 1
            logger.warning("duplicate entity %r (normalized %r)", surface, normalized)
            continue
        report.loaded += 1
    if not lex.records:
        raise LexiconError("lexicon file produced zero valid records")
    return lex


def load_lexicon(path: str | Path, fmt: Optional[str] = None) -> EntityLexicon:
    """Load a lexicon file.

    ``fmt`` is "tsv" or "jsonl"; when omitted it is inferred from the
    file suffix (anything not .jsonl/.json reads as TSV).
    """
    p = Path(path)
    if fmt is None:
        fmt = "jsonl" if p.suffix.lower() in {".jsonl", ".json"} else "tsv"
    if fmt == "tsv":
        rows: Iterator[tuple[str, str]] = _iter_tsv(p)
    elif fmt == "jsonl":
        rows = _iter_jsonl(p)
    else:
        raise ValueError(f"unknown lexicon format {fmt!r}")
    return build_lexicon(rows)


def sample_replacement(
    entity_type: EntityType,
    exclude: set[int],
    rng: Random,
    lexicon: EntityLexicon,
) -> EntityRecord:
    """Uniformly draw a record of ``entity_type`` with id outside ``exclude``.

    Deterministic for a given random state. Raises
    :class:`NoReplacementError` when the candidate pool is empty.
    """
    candidates = [i for i in lexicon.ids_of_type(entity_type) if i not in exclude]
    if not candidates:
        raise NoReplacementError(
            f"no {entity_type.value} record available outside the excluded set"
        )
    return lexicon.records[rng.choice(candidates)]


def lexicon_stats(lexicon: EntityLexicon) -> dict[str, float]:
    """Per-type percentage of records (0-100, summing to 100)."""
    total = len(lexicon.records)
    if total == 0:
        raise LexiconError("cannot compute stats for an empty lexicon")
    counts = lexicon.type_counts
    return {etype.value: 100.0 * counts[etype] / total for etype in EntityType}

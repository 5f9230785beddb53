"""Question-side perturbations that probe whether answers depend on the
molecule or on memorised names.

Three transforms over a corpus file:

* ``drug-mask`` replaces every lexicon entity in the question with the
  neutral phrase ``"this molecule"``.
* ``drug-distract`` swaps each question entity for a random different
  entity of the same type, so the surface form stays plausible while the
  referent becomes wrong.
* ``molecule-mask`` blanks the SMILES string and leaves the text alone.

Edits are spliced into the original string by character offsets, so
casing and punctuation outside the replaced spans survive untouched.
Ground-truth answers are never modified. A manifest records, per sample,
exactly what was replaced with what.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from random import Random
from typing import Optional, Sequence

from .corpus import CorpusRecord, read_corpus, write_corpus
from .lexicon import (
    EntityLexicon,
    EntityRecord,
    EntityType,
    NoReplacementError,
    sample_replacement,
)
from .textproc import TokenizedText, extract_entities, token_spans

logger = logging.getLogger(__name__)

MASK_PHRASE = "this molecule"


class AttackKind(str, Enum):
    DRUG_MASK = "drug-mask"
    DRUG_DISTRACT = "drug-distract"
    MOLECULE_MASK = "molecule-mask"


@dataclass(frozen=True)
class CharSpan:
    """An entity occurrence located by character offsets in the raw text."""

    start: int
    end: int
    record: EntityRecord


@dataclass(frozen=True)
class Replacement:
    """One applied (or skipped) substitution. ``substitute`` is None when
    no same-type alternative existed and the span was left unchanged."""

    original: str
    substitute: Optional[str]

    def to_dict(self) -> dict:
        return {"original": self.original, "substitute": self.substitute}


@dataclass
class SampleEdit:
    id: str
    count: int
    replaced: list[Replacement] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "count": self.count,
            "replaced": [r.to_dict() for r in self.replaced],
        }


@dataclass
class AttackManifest:
    kind: str
    seed: Optional[int]
    per_sample: list[SampleEdit] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "per_sample": [s.to_dict() for s in self.per_sample],
        }

    def write(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, sort_keys=True, indent=2)
            fh.write("\n")


def find_entity_char_spans(
    text: str,
    lexicon: EntityLexicon,
    types: Optional[Sequence[EntityType]] = None,
) -> list[CharSpan]:
    """Locate lexicon entities in raw text, returned left to right as
    character spans. ``types`` restricts matches to the given entity
    types after extraction, so a longer match of an excluded type still
    shadows shorter included ones, mirroring how the scorer would read
    the text."""
    spans = token_spans(text)
    tokens = tuple(s.text for s in spans)
    matches = extract_entities(TokenizedText(tokens, text), lexicon)
    wanted = None if types is None else set(types)
    out: list[CharSpan] = []
    for m in matches:
        record = lexicon.records[m.record_id]
        if wanted is not None and record.entity_type not in wanted:
            continue
        first = spans[m.start]
        last = spans[m.start + m.length - 1]
        out.append(CharSpan(start=first.start, end=last.end, record=record))
    return out


def _splice(text: str, edits: Sequence[tuple[CharSpan, str]]) -> str:
    # Apply right to left so earlier offsets stay valid.
    result = text
    for span, new_text in sorted(edits, key=lambda e: e[0].start, reverse=True):
        result = result[: span.start] + new_text + result[span.end :]
    return result


def _mask_spans(
    question: str,
    lexicon: EntityLexicon,
    types: Optional[Sequence[EntityType]] = None,
) -> tuple[str, list[Replacement]]:
    spans = find_entity_char_spans(question, lexicon, types)
    edits = [(s, MASK_PHRASE) for s in spans]
    replaced = [
        Replacement(original=question[s.start : s.end], substitute=MASK_PHRASE)
        for s in spans
    ]
    return _splice(question, edits), replaced


def mask_drug_names(
    question: str,
    lexicon: EntityLexicon,
    types: Optional[Sequence[EntityType]] = None,
) -> tuple[str, int]:
    """Replace each entity occurrence with ``MASK_PHRASE``; returns the
    masked question and how many spans were replaced."""
    masked, replaced = _mask_spans(question, lexicon, types)
    return masked, len(replaced)


def distract_drug_names(
    question: str,
    lexicon: EntityLexicon,
    rng: Random,
    types: Optional[Sequence[EntityType]] = None,
) -> tuple[str, list[Replacement]]:
    """Swap each entity occurrence for a uniformly sampled different
    entity of the same type. Spans whose type has no alternative are kept
    verbatim and reported with ``substitute=None``."""
    spans = find_entity_char_spans(question, lexicon, types)
    edits: list[tuple[CharSpan, str]] = []
    replaced: list[Replacement] = []
    # Draw left to right so the rng stream has a stable meaning.
    for span in spans:
        original = question[span.start : span.end]
        try:
            sub = sample_replacement(
                span.record.entity_type, {span.record.id}, rng, lexicon
            )
        except NoReplacementError:
            replaced.append(Replacement(original=original, substitute=None))
            continue
        edits.append((span, sub.surface))
        replaced.append(Replacement(original=original, substitute=sub.surface))
    return _splice(question, edits), replaced


def mask_molecule(record):
    """Blank the SMILES field of a record-like dataclass."""
    return dataclasses.replace(record, smiles="")


def apply_attack(
    record: CorpusRecord,
    kind: AttackKind,
    lexicon: Optional[EntityLexicon],
    seed: Optional[int],
    types: Optional[Sequence[EntityType]] = None,
) -> tuple[CorpusRecord, SampleEdit]:
    """Transform a single record; the ground-truth answer is left as is."""
    if kind is AttackKind.MOLECULE_MASK:
        changed = 1 if record.smiles else 0
        return mask_molecule(record), SampleEdit(id=record.id, count=changed)
    if lexicon is None:
        raise ValueError(f"attack {kind.value} requires a lexicon")
    if kind is AttackKind.DRUG_MASK:
        question, replaced = _mask_spans(record.question, lexicon, types)
    elif kind is AttackKind.DRUG_DISTRACT:
        if seed is None:
            raise ValueError("drug-distract requires a seed")
        rng = Random(f"{seed}:{record.id}")
        question, replaced = distract_drug_names(record.question, lexicon, rng, types)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown attack kind: {kind}")
    applied = sum(1 for r in replaced if r.substitute is not None)
    edit = SampleEdit(id=record.id, count=applied, replaced=list(replaced))
    return dataclasses.replace(record, question=question), edit


def attack_corpus(
    in_path: str | Path,
    out_path: str | Path,
    kind: AttackKind,
    lexicon: Optional[EntityLexicon] = None,
    seed: Optional[int] = None,
    types: Optional[Sequence[EntityType]] = None,
    manifest_path: Optional[str | Path] = None,
) -> AttackManifest:
    """Apply one attack to every record of a corpus file and write the
    transformed corpus plus a manifest of the edits."""
    records = read_corpus(in_path)
    manifest = AttackManifest(kind=kind.value, seed=seed)
    transformed: list[CorpusRecord] = []
    for record in records:
        new_record, edit = apply_attack(record, kind, lexicon, seed, types)
        transformed.append(new_record)
        manifest.per_sample.append(edit)
    write_corpus(transformed, out_path)
    if manifest_path is None:
        manifest_path = Path(str(out_path) + ".manifest.json")
    manifest.write(manifest_path)
    total = sum(e.count for e in manifest.per_sample)
    logger.info("%s: %d edits across %d records", kind.value, total, len(records))
    return manifest

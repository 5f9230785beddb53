"""Builders for supervised and preference-pair training data.

Two outputs, both JSONL:

* an SFT set of ``{"question", "answer"}`` pairs where questions have
  their entity mentions masked with a neutral phrase, and
* a preference set of ``{"id", "question", "g_plus", "g_minus"}``
  triples, where ``g_plus`` is the ground-truth answer and each entry of
  ``g_minus`` is a dispreferred answer tagged with its provenance:
  ``entity-perturbed`` negatives are ground-truth answers with some
  entity mentions swapped for random same-type ones, and
  ``external-sampled`` negatives are caller-supplied texts (for example
  high-temperature model generations) passed through verbatim.

All randomness is derived from one integer seed. Sample selection uses
its own stream and each selected record gets a stream keyed by its id,
so output bytes are a pure function of (inputs, seed, parameters).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Iterable, Optional, Sequence, Union

from .attacks import MASK_PHRASE, find_entity_char_spans, mask_drug_names
from .corpus import CorpusRecord
from .lexicon import EntityLexicon, NoReplacementError, sample_replacement

logger = logging.getLogger(__name__)

PROVENANCE_PERTURBED = "entity-perturbed"
PROVENANCE_EXTERNAL = "external-sampled"


class PerturbationError(Exception):
    """Raised when an answer has no entity span that can be swapped."""


@dataclass(frozen=True)
class Negative:
    text: str
    provenance: str

    def to_dict(self) -> dict:
        return {"text": self.text, "provenance": self.provenance}


@dataclass(frozen=True)
class PreferenceTriple:
    id: str
    question: str
    g_plus: str
    g_minus: tuple[Negative, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "g_plus": self.g_plus,
            "g_minus": [n.to_dict() for n in self.g_minus],
        }


@dataclass
class BuildReport:
    requested: int
    selected: int
    emitted: int
    dropped_no_negatives: int = 0

    def to_dict(self) -> dict:
        return {
            "requested": self.requested,
            "selected": self.selected,
            "emitted": self.emitted,
            "dropped_no_negatives": self.dropped_no_negatives,
        }


def perturb_entities(
    answer: str,
    lexicon: EntityLexicon,
    k: Union[int, str],
    rng: Random,
) -> tuple[str, list[tuple[str, str]]]:
    """Swap ``k`` entity mentions in ``answer`` for random same-type
    entities. ``k`` may be the string ``"random"``, meaning uniform on
    1..ceil(n/2) for n entity mentions. Returns the perturbed text and
    the (original, substitute) pairs actually applied.

    Raises PerturbationError when the answer has no entity mention, or
    when every chosen mention lacked a same-type alternative (the text
    would have come back unchanged).
    """
    spans = find_entity_char_spans(answer, lexicon)
    if not spans:
        raise PerturbationError("answer contains no lexicon entity")
    n = len(spans)
    if k == "random":
        k_eff = rng.randint(1, math.ceil(n / 2))
    else:
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"k must be a positive int or 'random', got {k!r}")
        k_eff = min(k, n)
    chosen = sorted(rng.sample(range(n), k_eff))
    edits = []
    applied: list[tuple[str, str]] = []
    for i in chosen:
        span = spans[i]
        original = answer[span.start : span.end]
        try:
            sub = sample_replacement(
                span.record.entity_type, {span.record.id}, rng, lexicon
            )
        except NoReplacementError:
            continue
        edits.append((span, sub.surface))
        applied.append((original, sub.surface))
    if not applied:
        raise PerturbationError("no chosen entity had a same-type alternative")
    result = answer
    for span, new_text in sorted(edits, key=lambda e: e[0].start, reverse=True):
        result = result[: span.start] + new_text + result[span.end :]
    return result, applied


def build_sft_pairs(
    records: Iterable[CorpusRecord], lexicon: EntityLexicon
) -> list[dict]:
    """Question-masked SFT pairs, in corpus order."""
    pairs = []
    for record in records:
        masked, _ = mask_drug_names(record.question, lexicon)
        pairs.append({"question": masked, "answer": record.answer_gt})
    return pairs


def load_external_negatives(path: str | Path) -> dict[str, list[str]]:
    """Read ``{"id": ..., "texts": [...]}`` JSONL into an id -> texts map."""
    out: dict[str, list[str]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            rid = str(row["id"])
            texts = [str(t) for t in row.get("texts", [])]
            out.setdefault(rid, []).extend(texts)
    return out


def build_preference_dataset(
    records: Sequence[CorpusRecord],
    lexicon: EntityLexicon,
    sample_count: int = 2000,
    negatives_per_sample: int = 1,
    seed: int = 0,
    external_negatives: Optional[dict[str, list[str]]] = None,
    allow_smaller: bool = False,
) -> tuple[list[PreferenceTriple], BuildReport]:
    """Select ``sample_count`` records uniformly without replacement and
    build one preference triple per selected record. Records yielding no
    negative at all (no entity in the answer and no external text) are
    dropped and counted. With ``allow_smaller`` a corpus shorter than
    ``sample_count`` is used in full instead of raising."""
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    if negatives_per_sample < 0:
        raise ValueError("negatives_per_sample must be >= 0")
    n = len(records)
    if n < sample_count:
        if not allow_smaller:
            raise ValueError(
                f"corpus has {n} records but {sample_count} were requested; "
                "pass allow_smaller to use the whole corpus"
            )
        take = n
    else:
        take = sample_count
    select_rng = Random(f"{seed}:select")
    chosen = sorted(select_rng.sample(range(n), take))
    external = external_negatives or {}

    triples: list[PreferenceTriple] = []
    dropped = 0
    for idx in chosen:
        record = records[idx]
        rng = Random(f"{seed}:{record.id}")
        negatives: list[Negative] = []
        for _ in range(negatives_per_sample):
            try:
                text, _ = perturb_entities(record.answer_gt, lexicon, "random", rng)
            except PerturbationError:
                break
            negatives.append(Negative(text=text, provenance=PROVENANCE_PERTURBED))
        for text in external.get(record.id, []):
            negatives.append(Negative(text=text, provenance=PROVENANCE_EXTERNAL))
        if not negatives:
            dropped += 1
            continue
        masked_question, _ = mask_drug_names(record.question, lexicon)
        triples.append(
            PreferenceTriple(
                id=record.id,
                question=masked_question,
                g_plus=record.answer_gt,
                g_minus=tuple(negatives),
            )
        )
    report = BuildReport(
        requested=sample_count,
        selected=take,
        emitted=len(triples),
        dropped_no_negatives=dropped,
    )
    logger.info(
        "preference build: %d/%d emitted, %d dropped for lack of negatives",
        report.emitted,
        report.selected,
        report.dropped_no_negatives,
    )
    return triples, report


SFT_README = """\
# SFT dataset

One JSON object per line with two fields:

* `question`: the source question with every recognised chemical entity
  mention replaced by the phrase "{mask}". Masking removes name cues so
  a model trained on these pairs must read the molecule itself.
* `answer`: the unmodified reference answer.

Use as standard supervised fine-tuning data: the question is the prompt,
the answer is the target.
"""

PREFS_README = """\
# Preference dataset

One JSON object per line with four fields:

* `id`: the source record id.
* `question`: the source question with every recognised chemical entity
  mention replaced by the phrase "{mask}".
* `g_plus`: the preferred answer (the reference answer, unmodified).
* `g_minus`: a list of dispreferred answers. Each entry has `text` and a
  `provenance` tag: `{perturbed}` means the reference answer with some
  entity mentions swapped for random same-type entities;
  `{external}` means a caller-supplied text (for example a
  high-temperature model sample) passed through verbatim.

Use with any pairwise preference objective: `g_plus` is the chosen
response and each element of `g_minus` is a rejected response for the
same prompt.
"""


def write_sft_dataset(
    records: Iterable[CorpusRecord],
    lexicon: EntityLexicon,
    out_path: str | Path,
) -> int:
    """Write SFT pairs as JSONL plus a sibling README; returns the count."""
    pairs = build_sft_pairs(records, lexicon)
    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    readme = out_path.with_name(out_path.name + ".README.md")
    readme.write_text(SFT_README.format(mask=MASK_PHRASE), encoding="utf-8")
    return len(pairs)


def write_preference_dataset(
    triples: Iterable[PreferenceTriple], out_path: str | Path
) -> int:
    """Write preference triples as JSONL plus a sibling README."""
    out_path = Path(out_path)
    n = 0
    with out_path.open("w", encoding="utf-8") as fh:
        for triple in triples:
            fh.write(json.dumps(triple.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    readme = out_path.with_name(out_path.name + ".README.md")
    readme.write_text(
        PREFS_README.format(
            mask=MASK_PHRASE,
            perturbed=PROVENANCE_PERTURBED,
            external=PROVENANCE_EXTERNAL,
        ),
        encoding="utf-8",
    )
    return n

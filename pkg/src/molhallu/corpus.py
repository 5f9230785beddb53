"""JSONL corpus interchange: one QA record per line.

Record schema: ``{"id": str, "smiles": str, "question": str,
"answer_gt": str, "answer_pred": str | null, "description": str}``.
``answer_pred`` is null for unscored rows (an empty string is a scored,
empty prediction). Ids are unique within a file and ``answer_gt`` is
never empty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional

from .scoring import ScoringSample


class CorpusError(Exception):
    """Raised for malformed corpus files."""


@dataclass(frozen=True)
class CorpusRecord:
    """One QA record as stored on disk."""

    id: str
    smiles: str
    question: str
    answer_gt: str
    answer_pred: Optional[str] = None
    description: str = ""

    def to_scoring_sample(self) -> ScoringSample:
        if self.answer_pred is None:
            raise CorpusError(f"record {self.id!r} has no answer_pred to score")
        return ScoringSample(
            id=self.id,
            smiles=self.smiles,
            question=self.question,
            answer_pred=self.answer_pred,
            answer_gt=self.answer_gt,
            description=self.description,
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "smiles": self.smiles,
            "question": self.question,
            "answer_gt": self.answer_gt,
            "answer_pred": self.answer_pred,
            "description": self.description,
        }


def record_from_dict(row: dict, line_no: int = 0) -> CorpusRecord:
    where = f"line {line_no}" if line_no else "record"
    try:
        rid = str(row["id"])
        question = str(row["question"])
        answer_gt = str(row["answer_gt"])
    except KeyError as exc:
        raise CorpusError(f"{where}: missing required field {exc}") from None
    if not answer_gt:
        raise CorpusError(f"{where}: answer_gt must be non-empty")
    pred = row.get("answer_pred")
    return CorpusRecord(
        id=rid,
        smiles=str(row.get("smiles", "")),
        question=question,
        answer_gt=answer_gt,
        answer_pred=None if pred is None else str(pred),
        description=str(row.get("description") or ""),
    )


def read_corpus(path: str | Path) -> list[CorpusRecord]:
    """Read and validate a JSONL corpus; ids must be unique."""
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON ({exc.msg})") from None
            record = record_from_dict(row, line_no)
            if record.id in seen:
                raise CorpusError(f"line {line_no}: duplicate id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    if not records:
        raise CorpusError(f"{path}: corpus contains no records")
    return records


def write_corpus(records: Iterable[CorpusRecord], path: str | Path) -> int:
    """Write records as JSONL in the given order; returns the row count."""
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def with_smiles(record: CorpusRecord, smiles: str) -> CorpusRecord:
    return replace(record, smiles=smiles)


def with_question(record: CorpusRecord, question: str) -> CorpusRecord:
    return replace(record, question=question)

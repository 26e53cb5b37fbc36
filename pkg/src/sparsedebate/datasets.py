"""JSONL dataset ingestion.

One record per line: ``{"id": ..., "question": ..., "gold": ...,
"choices": [...], "task_kind": ...}``.  ``gold`` and ``choices`` are
optional; ``task_kind`` defaults to free_text and multiple-choice
records must carry choices.  Malformed lines are collected with their
line numbers and either skipped with a warning or, in strict mode,
rejected wholesale.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .core import Question, TaskKind

logger = logging.getLogger(__name__)

_CHOICE_LABELS = "ABCDEFGHIJ"


class DatasetError(ValueError):
    """Unreadable file or, in strict mode, any schema violation."""

    def __init__(self, message: str, issues: list[tuple[int, str]] | None = None):
        super().__init__(message)
        self.issues = issues or []


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    question: str
    gold: str | None = None
    choices: tuple[str, ...] | None = None
    task_kind: TaskKind = TaskKind.FREE_TEXT

    def __post_init__(self) -> None:
        if not isinstance(self.task_kind, TaskKind):
            object.__setattr__(self, "task_kind", TaskKind(self.task_kind))
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.question or not self.question.strip():
            raise ValueError(f"record {self.id}: question must be non-empty")
        if self.task_kind is TaskKind.MULTIPLE_CHOICE and not self.choices:
            raise ValueError(f"record {self.id}: multiple_choice requires choices")
        if self.choices is not None and len(self.choices) > len(_CHOICE_LABELS):
            raise ValueError(f"record {self.id}: at most {len(_CHOICE_LABELS)} choices supported")

    def to_question(self) -> Question:
        """Build the debate question; choices are rendered into the
        question text as labeled options."""
        text = self.question
        if self.choices:
            options = "\n".join(
                f"{_CHOICE_LABELS[i]}) {choice}" for i, choice in enumerate(self.choices)
            )
            text = f"{text}\n{options}"
        return Question(
            question_id=self.id,
            text=text,
            gold=self.gold,
            task_kind=self.task_kind,
        )


@dataclass
class LoadResult:
    records: list[DatasetRecord]
    issues: list[tuple[int, str]] = field(default_factory=list)


def _parse_record(line_no: int, data: dict) -> DatasetRecord:
    if "id" not in data:
        raise ValueError("missing 'id'")
    if "question" not in data:
        raise ValueError("missing 'question'")
    kind = TaskKind(data.get("task_kind", "free_text"))
    choices = data.get("choices")
    gold = data.get("gold")
    return DatasetRecord(
        id=str(data["id"]),
        question=str(data["question"]),
        gold=None if gold is None else str(gold),
        choices=None if choices is None else tuple(str(c) for c in choices),
        task_kind=kind,
    )


def load_dataset(path: str | Path, strict: bool = False) -> list[DatasetRecord]:
    """Load and validate a JSONL dataset.

    Non-strict mode skips bad lines (including duplicate ids, keeping
    the first) with warnings; strict mode raises a DatasetError listing
    every issue with its line number.
    """
    result = load_dataset_report(path)
    if result.issues:
        if strict:
            raise DatasetError(
                f"{path}: {len(result.issues)} invalid line(s)", issues=result.issues
            )
        for line_no, message in result.issues:
            logger.warning("%s line %d skipped: %s", path, line_no, message)
    return result.records


def load_dataset_report(path: str | Path) -> LoadResult:
    """Load a JSONL dataset, returning records plus per-line issues."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    records: list[DatasetRecord] = []
    issues: list[tuple[int, str]] = []
    seen: set[str] = set()
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            if not isinstance(data, dict):
                raise ValueError("line is not a JSON object")
            record = _parse_record(line_no, data)
        except ValueError as exc:
            issues.append((line_no, str(exc)))
            continue
        if record.id in seen:
            issues.append((line_no, f"duplicate id {record.id!r}"))
            continue
        seen.add(record.id)
        records.append(record)
    return LoadResult(records=records, issues=issues)

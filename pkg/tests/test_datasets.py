"""Unit tests for JSONL dataset loading."""

import pytest

from sparsedebate.core import TaskKind
from sparsedebate.datasets import (
    DatasetError,
    DatasetRecord,
    load_dataset,
    load_dataset_report,
)

from conftest import write_jsonl


def test_load_valid_file(tmp_path):
    path = tmp_path / "data.jsonl"
    write_jsonl(
        path,
        [
            {"id": "q1", "question": "2+2?", "gold": "4", "task_kind": "numeric"},
            {"id": "q2", "question": "capital of France?", "gold": "Paris"},
            {
                "id": "q3",
                "question": "pick one",
                "gold": "B",
                "task_kind": "multiple_choice",
                "choices": ["red", "green"],
            },
        ],
    )
    records = load_dataset(path)
    assert len(records) == 3
    assert records[0].task_kind is TaskKind.NUMERIC
    assert records[1].task_kind is TaskKind.FREE_TEXT
    assert records[2].choices == ("red", "green")


def test_missing_question_skipped_with_line_number(tmp_path):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "q1", "question": "fine"}, {"id": "q2"}])
    result = load_dataset_report(path)
    assert len(result.records) == 1
    assert result.issues == [(2, "missing 'question'")]
    # non-strict load still returns the good record
    assert len(load_dataset(path)) == 1


def test_strict_mode_raises_with_issues(tmp_path):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "q1", "question": "fine"}, {"question": "no id"}])
    with pytest.raises(DatasetError) as excinfo:
        load_dataset(path, strict=True)
    assert excinfo.value.issues[0][0] == 2


def test_duplicate_ids(tmp_path):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "q1", "question": "a"}, {"id": "q1", "question": "b"}])
    records = load_dataset(path)  # non-strict keeps the first
    assert len(records) == 1 and records[0].question == "a"
    with pytest.raises(DatasetError):
        load_dataset(path, strict=True)


def test_invalid_json_line_collected(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text('{"id": "q1", "question": "ok"}\nnot json at all\n')
    result = load_dataset_report(path)
    assert len(result.records) == 1
    assert result.issues[0][0] == 2


def test_unreadable_file_aborts(tmp_path):
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "nope.jsonl")


def test_multiple_choice_requires_choices(tmp_path):
    path = tmp_path / "data.jsonl"
    write_jsonl(path, [{"id": "q1", "question": "pick", "task_kind": "multiple_choice"}])
    result = load_dataset_report(path)
    assert result.records == []
    assert "choices" in result.issues[0][1]


def test_blank_lines_ignored(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text('{"id": "q1", "question": "ok"}\n\n\n{"id": "q2", "question": "ok2"}\n')
    assert len(load_dataset(path)) == 2


def test_to_question_renders_choices():
    record = DatasetRecord(
        id="q1",
        question="Which color?",
        gold="B",
        choices=("red", "green", "blue"),
        task_kind=TaskKind.MULTIPLE_CHOICE,
    )
    question = record.to_question()
    assert question.text == "Which color?\nA) red\nB) green\nC) blue"
    assert question.gold == "B"
    assert question.task_kind is TaskKind.MULTIPLE_CHOICE


def test_to_question_plain():
    record = DatasetRecord(id="q1", question="why?")
    question = record.to_question()
    assert question.text == "why?"
    assert question.gold is None


def test_record_validation():
    with pytest.raises(ValueError):
        DatasetRecord(id="", question="x")
    with pytest.raises(ValueError):
        DatasetRecord(id="q", question="   ")

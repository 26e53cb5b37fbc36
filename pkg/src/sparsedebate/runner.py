"""Batch experiment runner with resumable transcript persistence.

Transcripts land one JSON file per question under
``<out>/<dataset>/<question_id>.json``; reruns skip questions whose
files already exist unless forced, so an interrupted batch can simply
be restarted.  The aggregate report is always rebuilt from the files on
disk, which makes it a pure function of the persisted transcripts by
construction.
"""

from __future__ import annotations

import json
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import RunConfig
from .core import Transcript
from .datasets import DatasetRecord
from .metrics import RunReport, build_report
from .orchestrator import DebateAborted, run_debate

logger = logging.getLogger(__name__)

FAILURES_FILE = "failures.json"


def transcript_path(out_dir: str | Path, dataset: str, question_id: str) -> Path:
    return Path(out_dir) / dataset / f"{_safe_name(question_id)}.json"


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def _write_transcript(path: Path, transcript: Transcript) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(transcript.to_json())
    tmp.replace(path)


def load_transcripts(directory: str | Path) -> list[Transcript]:
    """Read every persisted transcript under a dataset directory."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"transcript directory {directory} does not exist")
    transcripts = []
    for path in sorted(directory.glob("*.json")):
        if path.name == FAILURES_FILE:
            continue
        transcripts.append(Transcript.from_json(path.read_text()))
    return transcripts


def load_failures(directory: str | Path) -> dict[str, str]:
    path = Path(directory) / FAILURES_FILE
    if not path.exists():
        return {}
    return json.loads(path.read_text())


def run_batch(
    records: list[DatasetRecord],
    config: RunConfig,
    out_dir: str | Path,
    dataset: str,
    parallel: int = 1,
    force: bool = False,
) -> RunReport:
    """Debate every dataset record and aggregate the results.

    Questions run independently (in parallel up to ``parallel``); each
    finished debate is persisted immediately.  Failed debates are
    recorded in a sidecar file and excluded from the aggregates.
    """
    if not records:
        raise ValueError("cannot run a batch over zero records")
    started = time.monotonic()
    dataset_dir = Path(out_dir) / dataset
    dataset_dir.mkdir(parents=True, exist_ok=True)
    failures = load_failures(dataset_dir)

    todo: list[DatasetRecord] = []
    for record in records:
        path = transcript_path(out_dir, dataset, record.id)
        if path.exists() and not force:
            logger.info("skipping %s: transcript already exists", record.id)
            continue
        todo.append(record)

    def debate(record: DatasetRecord) -> tuple[str, str | None]:
        try:
            transcript = run_debate(record.to_question(), config.roster, config)
        except DebateAborted as exc:
            logger.error("debate %s aborted: %s", record.id, exc)
            return record.id, str(exc)
        _write_transcript(transcript_path(out_dir, dataset, record.id), transcript)
        return record.id, None

    if parallel <= 1:
        results = [debate(r) for r in todo]
    else:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(debate, todo))

    for question_id, error in results:
        if error is not None:
            failures[question_id] = error
        elif question_id in failures:
            del failures[question_id]
    failures_path = dataset_dir / FAILURES_FILE
    if failures:
        failures_path.write_text(json.dumps(failures, indent=2, sort_keys=True))
    elif failures_path.exists():
        failures_path.unlink()

    _spill_embedding_cache(config)
    report = report_from_directory(dataset_dir, dataset)
    report.wall_time_s = time.monotonic() - started
    return report


def _spill_embedding_cache(config: RunConfig) -> None:
    cache_path = config.embedder_spec.get("cache_path")
    if not cache_path:
        return
    embedder = config.get_embedder()
    cache = getattr(embedder, "cache", None)
    if cache is not None and len(cache) > 0:
        cache.save(cache_path)
        logger.info("spilled %d cached embeddings to %s", len(cache), cache_path)


def report_from_directory(directory: str | Path, dataset: str | None = None) -> RunReport:
    """Rebuild the aggregate report purely from persisted transcripts."""
    directory = Path(directory)
    if dataset is None:
        dataset = directory.name
    transcripts = load_transcripts(directory)
    if not transcripts:
        raise ValueError(f"no transcripts found under {directory}")
    failures = load_failures(directory)
    return build_report(transcripts, dataset, failed_questions=len(failures))

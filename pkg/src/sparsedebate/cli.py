"""Command-line interface.

Subcommands: ``run`` executes a debate batch over a JSONL dataset,
``report`` rebuilds the aggregate report from persisted transcripts,
and ``simulate`` runs a self-contained scripted scenario offline.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import RunConfig
from .datasets import DatasetRecord, load_dataset
from .orchestrator import run_debate
from .report import emit_report
from .runner import load_transcripts, report_from_directory, run_batch

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsedebate",
        description="Multi-agent debate over a sparse, trust-weighted debating graph.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a debate batch over a JSONL dataset")
    run_p.add_argument("--dataset", required=True, help="JSONL dataset path")
    run_p.add_argument("--config", required=True, help="run config JSON path")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--parallel", type=int, default=1, help="questions in flight")
    run_p.add_argument("--force", action="store_true", help="redo existing transcripts")
    run_p.add_argument("--strict", action="store_true", help="reject malformed dataset lines")
    run_p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    rep_p = sub.add_parser("report", help="rebuild the report from persisted transcripts")
    rep_p.add_argument("--transcripts", required=True, help="directory of transcript JSON files")
    rep_p.add_argument("--out", required=True, help="output directory for report artifacts")
    rep_p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    sim_p = sub.add_parser("simulate", help="run a scripted-only scenario offline")
    sim_p.add_argument("--scenario", required=True, help="scenario JSON path")
    sim_p.add_argument("--out", help="optional output directory for transcripts and report")
    sim_p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = RunConfig.from_file(args.config)
    records = load_dataset(args.dataset, strict=args.strict)
    if not records:
        print("dataset contains no usable records", file=sys.stderr)
        return 1
    dataset_name = Path(args.dataset).stem
    report = run_batch(
        records,
        config,
        out_dir=args.out,
        dataset=dataset_name,
        parallel=args.parallel,
        force=args.force,
    )
    transcripts = load_transcripts(Path(args.out) / dataset_name)
    emit_report(report, Path(args.out), transcripts, figures=not args.no_figures)
    _print_report(report)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    directory = Path(args.transcripts)
    report = report_from_directory(directory)
    transcripts = load_transcripts(directory)
    emit_report(report, Path(args.out), transcripts, figures=not args.no_figures)
    _print_report(report)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = json.loads(Path(args.scenario).read_text())
    config = RunConfig.from_dict(scenario["config"])
    if not config.scripted_only():
        print("simulate requires a scripted-only roster", file=sys.stderr)
        return 1
    questions = scenario.get("questions", [])
    if not questions:
        print("scenario contains no questions", file=sys.stderr)
        return 1
    records = [
        DatasetRecord(
            id=str(q["id"]),
            question=str(q["question"]),
            gold=None if q.get("gold") is None else str(q["gold"]),
            choices=None if q.get("choices") is None else tuple(q["choices"]),
            task_kind=q.get("task_kind", "free_text"),
        )
        for q in questions
    ]
    if args.out:
        name = Path(args.scenario).stem
        report = run_batch(records, config, out_dir=args.out, dataset=name, force=True)
        transcripts = load_transcripts(Path(args.out) / name)
        emit_report(report, Path(args.out), transcripts, figures=not args.no_figures)
        _print_report(report)
        return 0
    for record in records:
        transcript = run_debate(record.to_question(), config.roster, config)
        outcome = transcript.final_outcome
        verdict = (
            f"answer={outcome.answer!r} supporters={outcome.supporters}"
            if outcome.is_answer
            else f"no majority ({outcome.reason.value})"
        )
        print(
            f"{record.id}: rounds_used={transcript.rounds_used} "
            f"early_stop={transcript.terminated_early} {verdict}"
        )
    return 0


def _print_report(report) -> None:
    def pct(x):
        return "n/a" if x is None else f"{x:.2f}%"

    print(f"dataset={report.dataset} questions={report.n_questions} "
          f"failed={report.failed_questions}")
    print(f"RA={pct(report.ra_pct)} EM={pct(report.em_pct)} "
          f"avg_prompt_tokens={report.avg_prompt_tokens:.1f} ({report.tokenizer})")
    if report.per_round_score_pct:
        score = ", ".join(f"{v:.1f}" for v in report.per_round_score_pct)
        agree = ", ".join(f"{v:.1f}" for v in report.per_round_consensus_pct)
        print(f"per-round score %: [{score}]")
        print(f"per-round consensus %: [{agree}]")
    cvr = "n/a" if report.cvr_mean is None else f"{report.cvr_mean:.2f}"
    print(f"DVC/question={report.dvc_mean:.2f} CVR/question={cvr}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    commands = {"run": _cmd_run, "report": _cmd_report, "simulate": _cmd_simulate}
    try:
        return commands[args.command](args)
    except (ValueError, OSError) as exc:
        # config/dataset/transcript problems surface as messages, not tracebacks
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

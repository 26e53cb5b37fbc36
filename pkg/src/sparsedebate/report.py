"""Report emission: JSON, plot-ready CSV, and rendered figures.

The CSV is long-format (metric, round, value) so each per-round curve
plots directly; the figures mirror it (score and consensus against the
debate round, plus per-agent prompt-token totals when transcripts are
available).
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

from .core import Transcript
from .metrics import RunReport, prompt_tokens_per_agent

logger = logging.getLogger(__name__)


def write_report_json(report: RunReport, path: str | Path) -> Path:
    import json

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2))
    return path


def write_report_csv(report: RunReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "round", "value"])
        writer.writerow(["ra_pct", "", report.ra_pct])
        writer.writerow(["em_pct", "", report.em_pct])
        writer.writerow(["avg_prompt_tokens", "", report.avg_prompt_tokens])
        writer.writerow(["dvc_mean", "", report.dvc_mean])
        writer.writerow(["cvr_mean", "", report.cvr_mean])
        writer.writerow(["n_questions", "", report.n_questions])
        writer.writerow(["failed_questions", "", report.failed_questions])
        for d, value in enumerate(report.per_round_score_pct, start=1):
            writer.writerow(["round_score_pct", d, value])
        for d, value in enumerate(report.per_round_consensus_pct, start=1):
            writer.writerow(["round_consensus_pct", d, value])
    return path


def render_figures(
    report: RunReport,
    fig_dir: str | Path,
    transcripts: list[Transcript] | None = None,
) -> list[Path]:
    """Render the report's curves to PNG files and return their paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rounds = list(range(1, len(report.per_round_score_pct) + 1))
    if rounds:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(rounds, report.per_round_score_pct, marker="o", label="score")
        ax.plot(rounds, report.per_round_consensus_pct, marker="s", label="consensus")
        ax.set_xlabel("debate round")
        ax.set_ylabel("percent")
        ax.set_ylim(-5, 105)
        ax.set_xticks(rounds)
        ax.set_title(f"{report.dataset}: per-round score and consensus")
        ax.legend()
        ax.grid(True, alpha=0.3)
        path = fig_dir / "rounds.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    if transcripts:
        totals: dict[str, float] = {}
        for transcript in transcripts:
            for aid, tokens in prompt_tokens_per_agent(transcript).items():
                totals[aid] = totals.get(aid, 0.0) + tokens
        agents = sorted(totals)
        values = [totals[a] / len(transcripts) for a in agents]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(agents, values)
        ax.set_xlabel("agent")
        ax.set_ylabel(f"avg prompt tokens per debate ({report.tokenizer})")
        ax.set_title(f"{report.dataset}: prompt load per agent")
        ax.grid(True, axis="y", alpha=0.3)
        path = fig_dir / "tokens_per_agent.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    return written


def emit_report(
    report: RunReport,
    out_dir: str | Path,
    transcripts: list[Transcript] | None = None,
    figures: bool = True,
) -> dict[str, list[Path]]:
    """Write report.json, report.csv, and figures under ``out_dir``."""
    out_dir = Path(out_dir)
    paths = {
        "json": [write_report_json(report, out_dir / "report.json")],
        "csv": [write_report_csv(report, out_dir / "report.csv")],
        "figures": [],
    }
    if figures:
        paths["figures"] = render_figures(report, out_dir / "figures", transcripts)
    for kind, files in paths.items():
        for f in files:
            logger.info("wrote %s report artifact: %s", kind, f)
    return paths

"""Robust parsing of structured agent replies and answer normalization.

Replies are expected in the three-field format

    Answer: (...)
    Explanation: (...)
    Confidence Score: (...)

but real model output drifts, so the parser never hard-fails: missing
or malformed fields degrade to documented defaults and the degradation
is reported through flags.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .core import TaskKind


class ParseFlag(str, Enum):
    MISSING_CONFIDENCE = "missing_confidence"
    CLAMPED_CONFIDENCE = "clamped_confidence"
    MISSING_EXPLANATION = "missing_explanation"
    FALLBACK_WHOLE_TEXT = "fallback_whole_text"


# Midpoint of the recalibration identity band; used when a reply carries
# no parsable confidence.
DEFAULT_CONFIDENCE = 0.5
DEFAULT_PEER_SCORE = 0.5

_LABEL_RE = re.compile(
    r"^[ \t]*(answer|explanation|confidence(?:[ \t]+score)?)[ \t]*:",
    re.IGNORECASE | re.MULTILINE,
)
_NUMBER_RE = re.compile(r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)")
_SCORE_LABEL_RE = re.compile(r"^[ \t]*score[ \t]*:", re.IGNORECASE | re.MULTILINE)
# First number token, allowing thousands separators ("1,000.50").
_NUMERIC_ANSWER_RE = re.compile(r"[-+]?(?:\d[\d,]*(?:\.\d+)?|\.\d+)")
_CHOICE_RE = re.compile(r"\b([A-Ja-j])\b")
_EDGE_PUNCT = ".,:;!?\"'`()[]{}"


@dataclass
class ParsedReply:
    answer: str
    explanation: str
    confidence_raw: float
    flags: set[ParseFlag] = field(default_factory=set)


def _sections(raw: str) -> dict[str, str]:
    """Split a reply into its labeled sections.

    A label only counts at the start of a line; each section runs until
    the next label or the end of the text.  The first occurrence of a
    label wins.
    """
    found: dict[str, str] = {}
    matches = list(_LABEL_RE.finditer(raw))
    for idx, m in enumerate(matches):
        name = re.sub(r"\s+", " ", m.group(1).lower())
        if name.startswith("confidence"):
            name = "confidence"
        start = m.end()
        end = matches[idx + 1].start() if idx + 1 < len(matches) else len(raw)
        if name not in found:
            found[name] = raw[start:end].strip()
    return found


def _strip_parens(text: str) -> str:
    """Drop one balanced outer parenthesis pair, if present."""
    if len(text) >= 2 and text[0] == "(" and text[-1] == ")":
        return text[1:-1].strip()
    return text


def _first_float(text: str) -> float | None:
    m = _NUMBER_RE.search(text)
    if m is None:
        return None
    try:
        return float(m.group(0))
    except ValueError:
        return None


def _clamp_unit(value: float, flags: set[ParseFlag]) -> float:
    if value < 0.0:
        flags.add(ParseFlag.CLAMPED_CONFIDENCE)
        return 0.0
    if value > 1.0:
        flags.add(ParseFlag.CLAMPED_CONFIDENCE)
        return 1.0
    return value


def parse_reply(raw: str) -> ParsedReply:
    """Extract answer, explanation and confidence from a reply.

    Fallbacks: no Answer label means the whole text becomes the answer
    (flagged); no explanation flags and yields an empty string; a
    missing or unparsable confidence defaults to 0.5 (flagged); values
    outside [0, 1] are clamped (flagged).
    """
    flags: set[ParseFlag] = set()
    sections = _sections(raw or "")

    if "answer" in sections:
        answer = _strip_parens(sections["answer"])
    else:
        answer = (raw or "").strip()
        flags.add(ParseFlag.FALLBACK_WHOLE_TEXT)

    if "explanation" in sections:
        explanation = _strip_parens(sections["explanation"])
    else:
        explanation = ""
        flags.add(ParseFlag.MISSING_EXPLANATION)

    if "confidence" in sections:
        value = _first_float(_strip_parens(sections["confidence"]))
        if value is None:
            confidence = DEFAULT_CONFIDENCE
            flags.add(ParseFlag.MISSING_CONFIDENCE)
        else:
            confidence = _clamp_unit(value, flags)
    else:
        confidence = DEFAULT_CONFIDENCE
        flags.add(ParseFlag.MISSING_CONFIDENCE)

    return ParsedReply(answer=answer, explanation=explanation, confidence_raw=confidence, flags=flags)


def parse_score_reply(raw: str) -> tuple[float, set[ParseFlag]]:
    """Extract a peer-evaluation score from a "Score: (...)" reply.

    Unparseable replies default to 0.5 with a missing-confidence flag;
    out-of-range scores are clamped and flagged.
    """
    flags: set[ParseFlag] = set()
    m = _SCORE_LABEL_RE.search(raw or "")
    text = raw[m.end():] if m else (raw or "")
    value = _first_float(_strip_parens(text.strip()))
    if value is None:
        flags.add(ParseFlag.MISSING_CONFIDENCE)
        return DEFAULT_PEER_SCORE, flags
    return _clamp_unit(value, flags), flags


def _normalize_free_text(text: str) -> str:
    collapsed = " ".join(text.split()).casefold()
    return collapsed.strip(_EDGE_PUNCT + " ")


def _canonical_decimal(token: str) -> str:
    """Canonical decimal string: no commas, no leading/trailing zero fat."""
    token = token.replace(",", "")
    sign = ""
    if token and token[0] in "+-":
        sign = "-" if token[0] == "-" else ""
        token = token[1:]
    if "." in token:
        int_part, frac = token.split(".", 1)
        frac = frac.rstrip("0")
    else:
        int_part, frac = token, ""
    int_part = int_part.lstrip("0") or "0"
    out = f"{int_part}.{frac}" if frac else int_part
    if out == "0":
        return "0"
    return sign + out


def normalize_answer(answer: str, task_kind: TaskKind = TaskKind.FREE_TEXT) -> str:
    """Normalize an answer for equality checks in consensus and voting.

    free_text: trim, collapse whitespace, casefold, and strip surrounding
    punctuation.  numeric: the first number, commas removed, in canonical
    decimal form.  multiple_choice: the first standalone letter A-J,
    uppercased.  Unparsable numeric/choice answers fall back to free-text
    normalization.
    """
    normalized, _ = normalize_answer_checked(answer, task_kind)
    return normalized


def normalize_answer_checked(
    answer: str, task_kind: TaskKind = TaskKind.FREE_TEXT
) -> tuple[str, bool]:
    """Like :func:`normalize_answer`, also reporting fallback use."""
    text = answer or ""
    if task_kind is TaskKind.NUMERIC:
        m = _NUMERIC_ANSWER_RE.search(text)
        if m is not None:
            return _canonical_decimal(m.group(0)), False
        return _normalize_free_text(text), True
    if task_kind is TaskKind.MULTIPLE_CHOICE:
        m = _CHOICE_RE.search(text)
        if m is not None:
            return m.group(1).upper(), False
        return _normalize_free_text(text), True
    return _normalize_free_text(text), False

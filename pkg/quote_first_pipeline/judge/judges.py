"""Judges score one item against a reference set and return a value in [0, 1]."""
from __future__ import annotations

import logging
import re
from typing import Any, Dict, Optional, Protocol, Sequence, Tuple

from ..errors import JudgeParseError
from ..llm import ChatEndpoint, ChatRequest
from ..pipeline.prompts import JUDGE_ANSWER, JUDGE_QUOTE, JUDGE_SETS, PromptTemplate, load_template
from ..quotes import QuoteSet, collapse_whitespace, render_quote_block
from .scores import JudgeScore

logger = logging.getLogger(__name__)

ROLES = ("quote", "answer")

_NUMBER = re.compile(r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)")
_RECALL = re.compile(r"recall\s*[:=]\s*([-+]?(?:\d+(?:\.\d*)?|\.\d+))", re.IGNORECASE)
_PRECISION = re.compile(r"precision\s*[:=]\s*([-+]?(?:\d+(?:\.\d*)?|\.\d+))", re.IGNORECASE)

RETRY_NUDGE = "Reply with a single decimal number between 0 and 1 and nothing else."
SETS_RETRY_NUDGE = "Reply with exactly two lines: 'recall: <number>' and 'precision: <number>'."


class Judge(Protocol):
    kind: str
    parallelism: int

    def score(self, item: str, references: Sequence[str], role: str) -> JudgeScore: ...

    def describe(self) -> Dict[str, Any]: ...


def _check_role(role: str) -> None:
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got '{role}'")


def _normalize(text: str) -> str:
    return collapse_whitespace(text).casefold()


def judge_oracle(item: str, references: Sequence[str], role: str = "quote") -> JudgeScore:
    """1.0 when the item and some reference contain one another after normalization."""
    _check_role(role)
    needle = _normalize(item)
    if not needle:
        return JudgeScore(0.0)
    for ref in references:
        hay = _normalize(ref)
        if hay and (needle in hay or hay in needle):
            return JudgeScore(1.0)
    return JudgeScore(0.0)


class OracleJudge:
    kind = "oracle"
    parallelism = 1

    def score(self, item: str, references: Sequence[str], role: str) -> JudgeScore:
        return judge_oracle(item, references, role)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "model": None, "prompt_hash": None}


class ConstantJudge:
    """Returns the same score for every pair. Used to check the metric arithmetic."""

    kind = "constant"
    parallelism = 1

    def __init__(self, value: float):
        self.value = JudgeScore(value)
        self.calls = 0

    def score(self, item: str, references: Sequence[str], role: str) -> JudgeScore:
        _check_role(role)
        self.calls += 1
        return self.value

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "model": None, "prompt_hash": None, "value": self.value.value}


def parse_score(text: str) -> Optional[float]:
    match = _NUMBER.search(text)
    return float(match.group(0)) if match else None


def parse_set_scores(text: str) -> Optional[Tuple[float, float]]:
    """Return (precision, recall) from a two-line judge reply, or None."""
    recall = _RECALL.search(text)
    precision = _PRECISION.search(text)
    if not recall or not precision:
        return None
    return float(precision.group(1)), float(recall.group(1))


def render_reference(references: Sequence[str], role: str) -> str:
    if role == "answer":
        return "\n".join(references)
    return render_quote_block(QuoteSet.from_texts(references))


def _ask_with_retry(endpoint: ChatEndpoint, req: ChatRequest, parse, nudge: str):
    first = endpoint.complete(req)
    value = parse(first.text)
    if value is not None:
        return value
    logger.warning("Judge reply had no score, asking once more: %r", first.text[:80])
    second = endpoint.complete(req.followed_by(first.text, nudge))
    value = parse(second.text)
    if value is None:
        raise JudgeParseError(second.text)
    return value


def judge_llm(
    item: str,
    reference_set: str,
    role: str,
    endpoint: ChatEndpoint,
    template: Optional[PromptTemplate] = None,
) -> JudgeScore:
    _check_role(role)
    template = template or load_template(JUDGE_QUOTE if role == "quote" else JUDGE_ANSWER)
    req = endpoint.request(template.render(reference=reference_set, item=item))
    value = _ask_with_retry(endpoint, req, parse_score, RETRY_NUDGE)
    return JudgeScore.clamped(value, source=f"judge {endpoint.model}")


class LLMJudge:
    kind = "llm"

    def __init__(self, endpoint: ChatEndpoint):
        self.endpoint = endpoint
        self.templates = {
            "quote": load_template(JUDGE_QUOTE),
            "answer": load_template(JUDGE_ANSWER),
            "sets": load_template(JUDGE_SETS),
        }

    @property
    def parallelism(self) -> int:
        return self.endpoint.parallelism

    def score(self, item: str, references: Sequence[str], role: str) -> JudgeScore:
        if not references:
            return JudgeScore(0.0)
        return judge_llm(item, render_reference(references, role), role, self.endpoint, self.templates[role])

    def score_sets(self, model_quotes: Sequence[str], gold_quotes: Sequence[str]) -> Tuple[JudgeScore, JudgeScore]:
        """One call per sample: the judge reports (precision, recall) for the whole pair of sets."""
        prompt = self.templates["sets"].render(
            reference=render_quote_block(QuoteSet.from_texts(gold_quotes)),
            item=render_quote_block(QuoteSet.from_texts(model_quotes)),
        )
        precision, recall = _ask_with_retry(
            self.endpoint, self.endpoint.request(prompt), parse_set_scores, SETS_RETRY_NUDGE
        )
        source = f"judge {self.endpoint.model}"
        return JudgeScore.clamped(precision, source), JudgeScore.clamped(recall, source)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "model": self.endpoint.model,
            "prompt_hash": {name: t.digest for name, t in self.templates.items()},
        }

"""Answer generation from either gold quotes or the full context."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from ..dataset.records import RawSample
from ..errors import TransportError
from ..llm import ChatEndpoint, ChatRequest
from ..quotes import QuoteSet, render_quote_block
from .batch import run_batch
from .prompts import ANSWER, PromptTemplate, load_template
from .records import EVIDENCE_MODES, AnswerRecord, FailureRecord, GoldSample

logger = logging.getLogger(__name__)

STAGE = "answer"


@dataclass
class AnswerRunResult:
    answers: List[AnswerRecord] = field(default_factory=list)
    failures: List[FailureRecord] = field(default_factory=list)


def build_answer_request(
    s: RawSample,
    evidence: str,
    evidence_quotes: Optional[QuoteSet],
    base: ChatEndpoint,
    template: Optional[PromptTemplate] = None,
) -> ChatRequest:
    if evidence not in EVIDENCE_MODES:
        raise ValueError(f"evidence must be one of {EVIDENCE_MODES}")
    if evidence == "quotes":
        if evidence_quotes is None or evidence_quotes.is_empty:
            raise ValueError(f"Sample '{s.id}': quotes evidence needs a non-empty quote set.")
        text = render_quote_block(evidence_quotes)
    else:
        text = s.context
    template = template or load_template(ANSWER)
    return base.request(template.render(question=s.question, evidence=text))


def answer_with(
    s: RawSample,
    evidence: str,
    evidence_quotes: Optional[QuoteSet],
    base: ChatEndpoint,
    template: Optional[PromptTemplate] = None,
) -> AnswerRecord:
    response = base.complete(build_answer_request(s, evidence, evidence_quotes, base, template))
    answer = response.text.strip()
    if not answer:
        logger.warning("Sample '%s': %s returned an empty answer (%s evidence)", s.id, base.model, evidence)
    return AnswerRecord(s.id, evidence, base.model, answer, refused=not answer)


def answer_batch(
    gold: Sequence[GoldSample],
    evidence: str,
    base: ChatEndpoint,
    template: Optional[PromptTemplate] = None,
    on_result: Optional[Callable[[str, AnswerRecord], None]] = None,
    progress: bool = True,
) -> AnswerRunResult:
    template = template or load_template(ANSWER)
    batch = run_batch(
        gold,
        lambda g: answer_with(g.sample, evidence, g.quotes, base, template),
        key=lambda g: g.id,
        parallelism=base.parallelism,
        desc=f"answer[{base.model}/{evidence}]",
        on_result=on_result,
        progress=progress,
    )
    failures = [
        FailureRecord(sample_id, STAGE, str(err), retryable=isinstance(err, TransportError))
        for sample_id, err in batch.ordered_errors()
    ]
    return AnswerRunResult(answers=batch.ordered_results(), failures=failures)

"""Quoter inference: f_small sees question and context, never the answer."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from ..dataset.records import RawSample
from ..errors import QuoteContractError, QuoteParseError, TransportError
from ..llm import ChatEndpoint, ChatRequest
from ..quotes import QuoteSet, parse_quote_block, verify_quote_set
from .batch import run_batch
from .prompts import QUOTER, PromptTemplate, load_template
from .records import FailureRecord, QuoterPrediction
from .training import render_quoter_prompt

logger = logging.getLogger(__name__)

STAGE = "quote"


@dataclass
class QuoterRunResult:
    predictions: List[QuoterPrediction] = field(default_factory=list)
    failures: List[FailureRecord] = field(default_factory=list)


def build_quoter_request(s: RawSample, quoter: ChatEndpoint, template: Optional[PromptTemplate] = None) -> ChatRequest:
    return quoter.request(render_quoter_prompt(s, template))


def run_quoter(
    s: RawSample,
    quoter: ChatEndpoint,
    parse_mode: str = "lenient",
    template: Optional[PromptTemplate] = None,
) -> QuoterPrediction:
    """Run the quoter on one sample. An empty surviving set is a valid prediction."""
    response = quoter.complete(build_quoter_request(s, quoter, template))
    parsed = parse_quote_block(response.text, mode=parse_mode)
    verified, dropped = verify_quote_set(parsed, s.context, s.id)
    return QuoterPrediction(
        sample_id=s.id,
        quotes=verified,
        parse_mode_used=parse_mode,
        verbatim_failures=len(dropped),
        quoter_model=quoter.model,
        raw_completion=response.text,
    )


def _predict_or_score_zero(
    s: RawSample, quoter: ChatEndpoint, parse_mode: str, template: PromptTemplate
) -> QuoterPrediction:
    try:
        return run_quoter(s, quoter, parse_mode, template)
    except (QuoteParseError, QuoteContractError) as exc:
        # A broken completion still counts against the model downstream.
        logger.warning("Sample '%s': quoter output unparseable, scored as empty: %s", s.id, exc)
        return QuoterPrediction(s.id, QuoteSet(), parse_mode, quoter_model=quoter.model, parse_error=str(exc))


def run_quoter_batch(
    samples: Sequence[RawSample],
    quoter: ChatEndpoint,
    parse_mode: str = "lenient",
    template: Optional[PromptTemplate] = None,
    on_result: Optional[Callable[[str, QuoterPrediction], None]] = None,
    progress: bool = True,
) -> QuoterRunResult:
    template = template or load_template(QUOTER)
    batch = run_batch(
        samples,
        lambda s: _predict_or_score_zero(s, quoter, parse_mode, template),
        key=lambda s: s.id,
        parallelism=quoter.parallelism,
        desc="quote",
        on_result=on_result,
        progress=progress,
    )
    predictions = batch.ordered_results()
    failures = [
        FailureRecord(p.sample_id, STAGE, p.parse_error) for p in predictions if p.parse_error
    ] + [
        FailureRecord(sample_id, STAGE, str(err), retryable=isinstance(err, TransportError))
        for sample_id, err in batch.ordered_errors()
    ]
    return QuoterRunResult(predictions=predictions, failures=failures)

"""Gold quote distillation: the teacher sees question, context and answer."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from ..dataset.records import RawSample
from ..errors import AllSamplesFailedError, DistillationError, QuoteParseError, TransportError
from ..llm import ChatEndpoint, ChatRequest, EndpointConfig, ResponseCache
from ..quotes import parse_quote_block, verify_quote_set
from .batch import run_batch
from .prompts import DISTILL, PromptTemplate, load_template
from .records import FailureRecord, GoldSample

logger = logging.getLogger(__name__)

STAGE = "distill"


@dataclass
class GoldBuildResult:
    gold: List[GoldSample] = field(default_factory=list)
    failures: List[FailureRecord] = field(default_factory=list)


def build_distill_prompt(
    s: RawSample,
    teacher: EndpointConfig,
    template: Optional[PromptTemplate] = None,
) -> ChatRequest:
    if not s.answer.strip():
        raise ValueError(f"Sample '{s.id}' has no answer to distill against.")
    template = template or load_template(DISTILL)
    prompt = template.render(question=s.question, context=s.context, answer=s.answer)
    return teacher.request(prompt)


def distill_sample(
    s: RawSample,
    teacher: ChatEndpoint,
    template: Optional[PromptTemplate] = None,
) -> GoldSample:
    response = teacher.complete(build_distill_prompt(s, teacher.config, template))
    try:
        parsed = parse_quote_block(response.text, mode="lenient")
    except QuoteParseError as exc:
        raise DistillationError(s.id, f"unparseable teacher output: {exc}") from exc

    verified, dropped = verify_quote_set(parsed, s.context, s.id)
    if dropped:
        logger.warning("Sample '%s': dropped %d of %d teacher quotes as non-verbatim",
                       s.id, len(dropped), len(parsed))
    if verified.is_empty:
        reason = "teacher returned no quotes" if parsed.is_empty else "no teacher quote is verbatim in the context"
        raise DistillationError(s.id, reason)
    return GoldSample(
        sample=s,
        quotes=verified,
        teacher_model=teacher.model,
        raw_completion=response.text,
        verbatim_failures=len(dropped),
    )


def build_gold_dataset(
    samples: Sequence[RawSample],
    teacher: ChatEndpoint,
    cache: Optional[ResponseCache] = None,
    template: Optional[PromptTemplate] = None,
    on_result: Optional[Callable[[str, GoldSample], None]] = None,
    progress: bool = True,
) -> GoldBuildResult:
    """Distill every sample; output follows input order, failures are listed separately."""
    if cache is not None and teacher.cache is None:
        teacher.cache = cache
    template = template or load_template(DISTILL)

    batch = run_batch(
        samples,
        lambda s: distill_sample(s, teacher, template),
        key=lambda s: s.id,
        parallelism=teacher.parallelism,
        desc="distill",
        on_result=on_result,
        progress=progress,
    )
    failures = [
        FailureRecord(sample_id, STAGE, str(err), retryable=isinstance(err, TransportError))
        for sample_id, err in batch.ordered_errors()
    ]
    if samples and not batch.results:
        raise AllSamplesFailedError(STAGE, failures)
    return GoldBuildResult(gold=batch.ordered_results(), failures=failures)

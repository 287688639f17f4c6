"""Judge-scored quote precision/recall/F1 and semantic accuracy over answers."""
from __future__ import annotations

import logging
import math
from collections import Counter
from typing import Dict, List, Mapping, Optional, Sequence

from ..errors import DataError, JudgeParseError, MetricIncompleteError, TransportError
from ..pipeline.batch import run_batch
from ..pipeline.records import AnswerRecord, GoldSample, QuoterPrediction
from ..quotes import QuoteSet
from .judges import Judge
from .scores import AccuracyReport, JudgeScore, QuoteEvaluation, QuoteMetrics, SampleQuoteMetrics

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


def _judged_sum(metric: str, items: Sequence[str], references: Sequence[str], judge: Judge, role: str) -> float:
    scores: List[float] = []
    for item in items:
        try:
            scores.append(judge.score(item, references, role).value)
        except JudgeParseError as exc:
            raise MetricIncompleteError(metric, math.fsum(scores), len(scores), len(items), exc) from exc
    return math.fsum(scores)


def precision(r_model: QuoteSet, r_gold: QuoteSet, judge: Judge) -> float:
    if r_model.is_empty:
        return 1.0 if r_gold.is_empty else 0.0
    if r_gold.is_empty:
        return 0.0
    return _judged_sum("precision", r_model.texts(), r_gold.texts(), judge, "quote") / len(r_model)


def recall(r_model: QuoteSet, r_gold: QuoteSet, judge: Judge) -> float:
    if r_gold.is_empty:
        raise DataError("Recall is undefined for an empty gold quote set.")
    if r_model.is_empty:
        return 0.0
    return _judged_sum("recall", r_gold.texts(), r_model.texts(), judge, "quote") / len(r_gold)


def f1(p: float, r: float) -> float:
    if not (0.0 <= p <= 1.0 and 0.0 <= r <= 1.0):
        raise ValueError(f"precision and recall must lie in [0, 1], got ({p}, {r})")
    if p + r == 0:
        return 0.0
    # Harmonic mean can drift a hair past max(p, r) in floating point.
    return min(max(p, r), 2 * p * r / (p + r))


def score_sample(
    sample_id: str,
    r_model: QuoteSet,
    r_gold: QuoteSet,
    judge: Judge,
    set_level: bool = False,
) -> SampleQuoteMetrics:
    counts = dict(n_model=len(r_model), n_gold=len(r_gold))
    if r_model.is_empty and r_gold.is_empty:
        logger.warning("Sample '%s': model and gold quote sets are both empty", sample_id)
        return SampleQuoteMetrics(sample_id, QuoteMetrics(1.0, 1.0, 1.0, **counts), flagged=True)
    if r_gold.is_empty:
        raise DataError(f"Sample '{sample_id}' has no gold quotes.")

    if set_level and not r_model.is_empty and hasattr(judge, "score_sets"):
        try:
            p_score, r_score = judge.score_sets(r_model.texts(), r_gold.texts())
        except JudgeParseError as exc:
            raise MetricIncompleteError("set-level precision/recall", 0.0, 0, 1, exc) from exc
        p, r = p_score.value, r_score.value
    else:
        p = precision(r_model, r_gold, judge)
        r = recall(r_model, r_gold, judge)
    return SampleQuoteMetrics(sample_id, QuoteMetrics(p, r, f1(p, r), **counts))


def aggregate_quote_metrics(per_sample: Sequence[SampleQuoteMetrics]) -> QuoteMetrics:
    """Unweighted mean over samples. fsum keeps the result independent of order."""
    if not per_sample:
        raise DataError("No scored samples to aggregate.")
    n = len(per_sample)
    return QuoteMetrics(
        precision=math.fsum(s.metrics.precision for s in per_sample) / n,
        recall=math.fsum(s.metrics.recall for s in per_sample) / n,
        f1=math.fsum(s.metrics.f1 for s in per_sample) / n,
        n_model=sum(s.metrics.n_model for s in per_sample),
        n_gold=sum(s.metrics.n_gold for s in per_sample),
    )


def _check_alignment(pred_ids: Sequence[str], gold_ids: Sequence[str]) -> None:
    dupes = sorted(i for i, c in Counter(pred_ids).items() if c > 1)
    if dupes:
        raise DataError(f"Duplicate prediction ids: {', '.join(dupes)}")
    unknown = sorted(set(pred_ids) - set(gold_ids))
    missing = sorted(set(gold_ids) - set(pred_ids))
    if unknown or missing:
        parts = []
        if unknown:
            parts.append(f"predictions without gold: {', '.join(unknown)}")
        if missing:
            parts.append(f"gold without predictions: {', '.join(missing)}")
        raise DataError("Prediction and gold ids do not line up; " + "; ".join(parts))


def _raise_transport(errors) -> None:
    for sample_id, err in errors:
        if isinstance(err, TransportError):
            raise err


def evaluate_quoter(
    preds: Sequence[QuoterPrediction],
    gold: Sequence[GoldSample],
    judge: Judge,
    set_level: bool = False,
    label: str = "",
    progress: bool = True,
) -> QuoteEvaluation:
    """Score every prediction against its gold set and macro-average the results.

    Samples whose judge output cannot be parsed are excluded from the aggregate
    and listed in ``excluded``. Transport failures abort the evaluation.
    """
    _check_alignment([p.sample_id for p in preds], [g.id for g in gold])
    by_id: Dict[str, QuoterPrediction] = {p.sample_id: p for p in preds}

    batch = run_batch(
        gold,
        lambda g: score_sample(g.id, by_id[g.id].quotes, g.quotes, judge, set_level),
        key=lambda g: g.id,
        parallelism=judge.parallelism,
        desc=f"eval {label}".strip(),
        progress=progress,
    )
    errors = batch.ordered_errors()
    _raise_transport(errors)
    for sample_id, err in errors:
        logger.warning("Sample '%s' excluded from quote metrics: %s", sample_id, err)

    per_sample = batch.ordered_results()
    flagged = sum(1 for s in per_sample if s.flagged)
    if flagged:
        logger.warning("%d samples had empty model and gold sets", flagged)
    evaluation = QuoteEvaluation(
        aggregate=aggregate_quote_metrics(per_sample),
        per_sample=per_sample,
        excluded=[sample_id for sample_id, _ in errors],
        judge={**judge.describe(), "set_level": set_level},
        label=label,
    )
    logger.info(
        "Quote metrics%s: P=%.3f R=%.3f F1=%.3f over %d samples (%d excluded)",
        f" [{label}]" if label else "",
        evaluation.aggregate.precision,
        evaluation.aggregate.recall,
        evaluation.aggregate.f1,
        len(per_sample),
        len(evaluation.excluded),
    )
    return evaluation


def _answer_score(record: AnswerRecord, gold_answer: str, judge: Judge, threshold: Optional[float]) -> JudgeScore:
    if record.refused or not record.answer.strip():
        return JudgeScore(0.0)
    score = judge.score(record.answer, [gold_answer], "answer")
    if threshold is None:
        return score
    return JudgeScore(1.0 if score.value >= threshold else 0.0)


def semantic_accuracy(
    answers: Sequence[AnswerRecord],
    golds: Mapping[str, str],
    judge: Judge,
    threshold: Optional[float] = None,
    progress: bool = True,
) -> AccuracyReport:
    """Mean judge score of answers against gold answers; refused answers score 0."""
    if not answers:
        raise DataError("Semantic accuracy is undefined for an empty answer list.")
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    missing = sorted(a.sample_id for a in answers if a.sample_id not in golds)
    if missing:
        raise DataError(f"No gold answer for: {', '.join(missing)}")
    modes = {(a.evidence_mode, a.base_model) for a in answers}
    if len(modes) > 1:
        raise DataError(f"Answers mix evidence modes or base models: {sorted(modes)}")
    evidence_mode, base_model = modes.pop()

    batch = run_batch(
        answers,
        lambda a: _answer_score(a, golds[a.sample_id], judge, threshold),
        key=lambda a: a.sample_id,
        parallelism=judge.parallelism,
        desc=f"accuracy {base_model}/{evidence_mode}",
        progress=progress,
    )
    errors = batch.ordered_errors()
    _raise_transport(errors)
    for sample_id, err in errors:
        logger.warning("Answer '%s' excluded from semantic accuracy: %s", sample_id, err)

    per_sample = [(key, batch.results[key]) for key in batch.order if key in batch.results]
    if not per_sample:
        raise DataError("Every answer failed to score; semantic accuracy is undefined.")
    s_acc = math.fsum(score.value for _, score in per_sample) / len(per_sample)
    logger.info("Semantic accuracy %s/%s: %.3f over %d answers", base_model, evidence_mode, s_acc, len(per_sample))
    return AccuracyReport(
        per_sample=per_sample,
        s_acc=min(1.0, s_acc),
        evidence_mode=evidence_mode,
        base_model=base_model,
        excluded=[sample_id for sample_id, _ in errors],
        threshold=threshold,
    )

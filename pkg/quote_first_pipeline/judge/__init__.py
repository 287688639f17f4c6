"""Judges and the metrics computed with them."""
from .scores import AccuracyReport, JudgeScore, QuoteEvaluation, QuoteMetrics, SampleQuoteMetrics
from .judges import ConstantJudge, Judge, LLMJudge, OracleJudge, judge_llm, judge_oracle, parse_score, parse_set_scores
from .metrics import (
    DEFAULT_THRESHOLD,
    aggregate_quote_metrics,
    evaluate_quoter,
    f1,
    precision,
    recall,
    score_sample,
    semantic_accuracy,
)

__all__ = [
    "AccuracyReport",
    "ConstantJudge",
    "DEFAULT_THRESHOLD",
    "Judge",
    "JudgeScore",
    "LLMJudge",
    "OracleJudge",
    "QuoteEvaluation",
    "QuoteMetrics",
    "SampleQuoteMetrics",
    "aggregate_quote_metrics",
    "evaluate_quoter",
    "f1",
    "judge_llm",
    "judge_oracle",
    "parse_score",
    "parse_set_scores",
    "precision",
    "recall",
    "score_sample",
    "semantic_accuracy",
]

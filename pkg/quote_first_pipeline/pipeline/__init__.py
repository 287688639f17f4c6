"""Pipeline stages: distillation, training export, quoter inference, answering."""
from .records import AnswerRecord, FailureRecord, GoldSample, QuoterPrediction
from .distill import GoldBuildResult, build_distill_prompt, build_gold_dataset, distill_sample
from .training import export_training_file, render_quoter_prompt
from .quoter import QuoterRunResult, build_quoter_request, run_quoter, run_quoter_batch
from .answer import AnswerRunResult, answer_batch, answer_with, build_answer_request

__all__ = [
    "AnswerRecord",
    "AnswerRunResult",
    "FailureRecord",
    "GoldBuildResult",
    "GoldSample",
    "QuoterPrediction",
    "QuoterRunResult",
    "answer_batch",
    "answer_with",
    "build_answer_request",
    "build_distill_prompt",
    "build_gold_dataset",
    "build_quoter_request",
    "distill_sample",
    "export_training_file",
    "render_quoter_prompt",
    "run_quoter",
    "run_quoter_batch",
]

"""Exception hierarchy shared by every stage.

Each family carries the CLI exit code it maps to, so commands can raise
freely and ``cli.main`` turns the failure into the documented exit status.
"""
from __future__ import annotations

from typing import Any, Dict, Iterable, List, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3
EXIT_PARTIAL = 4


class QuotePipelineError(Exception):
    exit_code = EXIT_DATA


class ConfigError(QuotePipelineError):
    exit_code = EXIT_USAGE


class UsageError(QuotePipelineError):
    exit_code = EXIT_USAGE


class CredentialError(ConfigError):
    def __init__(self, env_var: str, endpoint: str):
        super().__init__(f"Credential variable '{env_var}' for endpoint '{endpoint}' is not set.")
        self.env_var = env_var
        self.endpoint = endpoint


class DataError(QuotePipelineError):
    exit_code = EXIT_DATA


class CorpusFormatError(DataError):
    def __init__(self, index: int, field: str, detail: str = "missing or empty"):
        super().__init__(f"Record {index}: field '{field}' {detail}.")
        self.index = index
        self.field = field


class DuplicateIdError(DataError):
    def __init__(self, ids: Iterable[str]):
        self.ids = sorted(set(ids))
        super().__init__(f"Duplicate sample ids: {', '.join(self.ids)}")


class SplitRangeError(DataError):
    pass


class QuoteFormatError(DataError):
    pass


class QuoteParseError(DataError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class QuoteContractError(DataError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class NonVerbatimError(DataError):
    def __init__(self, quote: str, matched_prefix: str, context_position: Optional[int]):
        preview = quote if len(quote) <= 60 else quote[:57] + "..."
        super().__init__(
            f"Quote not found in context: '{preview}'. "
            f"Longest matching prefix ({len(matched_prefix)} chars) at position {context_position}."
        )
        self.quote = quote
        self.matched_prefix = matched_prefix
        self.context_position = context_position


class DistillationError(DataError):
    def __init__(self, sample_id: str, reason: str):
        super().__init__(f"Distillation failed for '{sample_id}': {reason}")
        self.sample_id = sample_id
        self.reason = reason


class AllSamplesFailedError(DataError):
    def __init__(self, stage: str, failures: List[Any], report_path: Optional[str] = None):
        where = f"; see {report_path}" if report_path else ""
        super().__init__(f"Every sample failed in stage '{stage}' ({len(failures)} failures){where}.")
        self.stage = stage
        self.failures = failures
        self.report_path = report_path


class JudgeParseError(DataError):
    def __init__(self, response: str):
        preview = response if len(response) <= 80 else response[:77] + "..."
        super().__init__(f"No score in judge response: '{preview}'")
        self.response = response


class MetricIncompleteError(DataError):
    def __init__(self, metric: str, partial_sum: float, scored: int, total: int, cause: Exception):
        super().__init__(
            f"{metric} incomplete after {scored}/{total} judge calls (partial sum {partial_sum}): {cause}"
        )
        self.metric = metric
        self.partial_sum = partial_sum
        self.scored = scored
        self.total = total


class ReplayMissError(DataError):
    def __init__(self, digest: str, nearest: Optional[str]):
        super().__init__(f"No recorded response for request {digest}; nearest recorded digest: {nearest}")
        self.digest = digest
        self.nearest = nearest


class TransportError(QuotePipelineError):
    exit_code = EXIT_TRANSPORT


class RequestError(TransportError):
    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"Endpoint rejected request with HTTP {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class PartialRunError(QuotePipelineError):
    exit_code = EXIT_PARTIAL

    def __init__(self, run_id: str, pending: int, detail: Optional[Dict[str, Any]] = None):
        super().__init__(f"Run {run_id} stopped with {pending} samples pending; rerun with --resume {run_id}.")
        self.run_id = run_id
        self.pending = pending
        self.detail = detail or {}

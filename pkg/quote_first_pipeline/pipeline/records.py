"""Records produced by the pipeline stages, with their flat-jsonl shapes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

from ..dataset.records import RawSample
from ..quotes import Quote, QuoteSet, verify_quote_set

EVIDENCE_MODES = ("quotes", "context")


@dataclass
class GoldSample:
    sample: RawSample
    quotes: QuoteSet
    teacher_model: str
    raw_completion: str = ""
    verbatim_failures: int = 0

    def __post_init__(self) -> None:
        if self.quotes.is_empty:
            raise ValueError(f"GoldSample '{self.sample.id}' has no quotes.")
        for quote in self.quotes:
            if quote.match is None:
                raise ValueError(f"GoldSample '{self.sample.id}' holds an unverified quote.")

    @property
    def id(self) -> str:
        return self.sample.id

    def to_dict(self) -> Dict[str, Any]:
        return {
            **self.sample.to_dict(),
            "quotes": self.quotes.texts(),
            "teacher_model": self.teacher_model,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GoldSample":
        sample = RawSample.from_dict(data)
        verified, dropped = verify_quote_set(QuoteSet.from_texts(data["quotes"]), sample.context, sample.id)
        if dropped:
            raise ValueError(f"Stored gold sample '{sample.id}' has {len(dropped)} non-verbatim quotes.")
        return cls(sample=sample, quotes=verified, teacher_model=data.get("teacher_model", ""))


@dataclass
class QuoterPrediction:
    sample_id: str
    quotes: QuoteSet
    parse_mode_used: str
    verbatim_failures: int = 0
    quoter_model: str = ""
    raw_completion: str = ""
    parse_error: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.sample_id,
            "quotes": self.quotes.texts(),
            "parse_mode": self.parse_mode_used,
            "verbatim_failures": self.verbatim_failures,
            "quoter_model": self.quoter_model,
            "raw_completion": self.raw_completion,
            "parse_error": self.parse_error,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QuoterPrediction":
        return cls(
            sample_id=data["id"],
            quotes=QuoteSet(Quote(t) for t in data.get("quotes", [])),
            parse_mode_used=data.get("parse_mode", "lenient"),
            verbatim_failures=int(data.get("verbatim_failures", 0)),
            quoter_model=data.get("quoter_model", ""),
            raw_completion=data.get("raw_completion", ""),
            parse_error=data.get("parse_error", ""),
        )


@dataclass
class AnswerRecord:
    sample_id: str
    evidence_mode: str
    base_model: str
    answer: str
    refused: bool = False

    def __post_init__(self) -> None:
        if self.evidence_mode not in EVIDENCE_MODES:
            raise ValueError(f"evidence_mode must be one of {EVIDENCE_MODES}")
        if not self.answer.strip() and not self.refused:
            raise ValueError("An empty answer must be marked refused.")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.sample_id,
            "evidence_mode": self.evidence_mode,
            "base_model": self.base_model,
            "answer": self.answer,
            "refused": self.refused,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AnswerRecord":
        return cls(
            sample_id=data["id"],
            evidence_mode=data["evidence_mode"],
            base_model=data["base_model"],
            answer=data.get("answer", ""),
            refused=bool(data.get("refused", False)),
        )


@dataclass(frozen=True)
class FailureRecord:
    id: str
    stage: str
    reason: str
    retryable: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "stage": self.stage, "reason": self.reason}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FailureRecord":
        return cls(id=data["id"], stage=data["stage"], reason=data["reason"])

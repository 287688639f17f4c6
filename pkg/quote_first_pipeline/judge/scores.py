"""Score and metric value types."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JudgeScore:
    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"JudgeScore must lie in [0, 1], got {self.value}")

    @classmethod
    def clamped(cls, value: float, source: str = "judge") -> "JudgeScore":
        if value < 0.0 or value > 1.0:
            bounded = min(1.0, max(0.0, value))
            logger.warning("%s returned %s outside [0, 1]; clamped to %s", source, value, bounded)
            value = bounded
        return cls(float(value))


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class QuoteMetrics:
    precision: float
    recall: float
    f1: float
    n_model: int = 0
    n_gold: int = 0

    def __post_init__(self) -> None:
        for name in ("precision", "recall", "f1"):
            _check_unit(name, getattr(self, name))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "n_model": self.n_model,
            "n_gold": self.n_gold,
        }


@dataclass(frozen=True)
class SampleQuoteMetrics:
    id: str
    metrics: QuoteMetrics
    flagged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, **self.metrics.to_dict(), "flagged": self.flagged}


@dataclass
class QuoteEvaluation:
    aggregate: QuoteMetrics
    per_sample: List[SampleQuoteMetrics]
    excluded: List[str] = field(default_factory=list)
    judge: Dict[str, Any] = field(default_factory=dict)
    label: str = ""
    aggregation: str = "macro"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "aggregate": {
                "precision": self.aggregate.precision,
                "recall": self.aggregate.recall,
                "f1": self.aggregate.f1,
            },
            "per_sample": [s.to_dict() for s in self.per_sample],
            "excluded": list(self.excluded),
            "judge": dict(self.judge),
            "aggregation": self.aggregation,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QuoteEvaluation":
        per_sample = [
            SampleQuoteMetrics(
                id=row["id"],
                metrics=QuoteMetrics(row["precision"], row["recall"], row["f1"], row.get("n_model", 0), row.get("n_gold", 0)),
                flagged=row.get("flagged", False),
            )
            for row in data.get("per_sample", [])
        ]
        agg = data["aggregate"]
        return cls(
            aggregate=QuoteMetrics(
                agg["precision"], agg["recall"], agg["f1"],
                sum(s.metrics.n_model for s in per_sample),
                sum(s.metrics.n_gold for s in per_sample),
            ),
            per_sample=per_sample,
            excluded=list(data.get("excluded", [])),
            judge=dict(data.get("judge", {})),
            label=data.get("label", ""),
            aggregation=data.get("aggregation", "macro"),
        )


@dataclass
class AccuracyReport:
    per_sample: List[Tuple[str, JudgeScore]]
    s_acc: float
    evidence_mode: str
    base_model: str
    excluded: List[str] = field(default_factory=list)
    threshold: Optional[float] = None

    def __post_init__(self) -> None:
        _check_unit("s_acc", self.s_acc)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s_acc": self.s_acc,
            "evidence_mode": self.evidence_mode,
            "base_model": self.base_model,
            "threshold": self.threshold,
            "per_sample": [{"id": i, "score": s.value} for i, s in self.per_sample],
            "excluded": list(self.excluded),
        }

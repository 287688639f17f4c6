"""Comparison tables for quote metrics and answer accuracy."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from ..judge.scores import QuoteMetrics

METRIC_LABELS = (("recall", "Recall"), ("precision", "Precision"), ("f1", "F1-Score"))


def pct(value: Optional[float]) -> str:
    return "" if value is None else f"{value * 100:.1f}%"


def delta_points(before: Optional[float], after: Optional[float]) -> Optional[float]:
    if before is None or after is None:
        return None
    return round((after - before) * 100, 1)


def fmt_delta(before: Optional[float], after: Optional[float]) -> str:
    points = delta_points(before, after)
    if points is None:
        return ""
    # round() can hand back -0.0
    return f"{points + 0.0:+.1f}"


@dataclass
class MetricRow:
    metric: str
    after: float
    before: Optional[float] = None

    @property
    def delta(self) -> Optional[float]:
        return delta_points(self.before, self.after)


@dataclass
class AccuracyRow:
    model: str
    context_accuracy: float
    quotes_accuracy: float

    @property
    def delta(self) -> Optional[float]:
        return delta_points(self.context_accuracy, self.quotes_accuracy)


@dataclass
class ComparisonReport:
    rows: List[AccuracyRow] = field(default_factory=list)
    metrics_rows: List[MetricRow] = field(default_factory=list)
    labels: List[str] = field(default_factory=lambda: ["before", "after"])
    provenance: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_quote_metrics(
        cls,
        evaluations: Sequence[QuoteMetrics],
        labels: Optional[Sequence[str]] = None,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "ComparisonReport":
        """One evaluation gives a single column; two give before/after with deltas."""
        if not 1 <= len(evaluations) <= 2:
            raise ValueError("Quote metric reports compare one or two evaluations.")
        before = evaluations[0] if len(evaluations) == 2 else None
        after = evaluations[-1]
        rows = [
            MetricRow(label, getattr(after, name), getattr(before, name) if before else None)
            for name, label in METRIC_LABELS
        ]
        default = ["before", "after"] if before else ["score"]
        return cls(metrics_rows=rows, labels=list(labels or default), provenance=dict(provenance or {}))

    def merge(self, other: "ComparisonReport") -> "ComparisonReport":
        return ComparisonReport(
            rows=self.rows + other.rows,
            metrics_rows=self.metrics_rows + other.metrics_rows,
            labels=self.labels,
            provenance={**self.provenance, **other.provenance},
        )

    def metrics_frame(self) -> pd.DataFrame:
        compare = any(r.before is not None for r in self.metrics_rows)
        before_label, after_label = self.labels[0], self.labels[-1]
        if compare and (before_label == after_label or {before_label, after_label} & {"Metric", "Delta"}):
            before_label, after_label = "before", "after"
        records = []
        for r in self.metrics_rows:
            row = {"Metric": r.metric}
            if compare:
                row[before_label] = pct(r.before)
                row[after_label] = pct(r.after)
                row["Delta"] = fmt_delta(r.before, r.after)
            else:
                row[self.labels[-1]] = pct(r.after)
            records.append(row)
        return pd.DataFrame.from_records(records)

    def accuracy_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(
            [
                {
                    "Model": r.model,
                    "Context": pct(r.context_accuracy),
                    "Quotes": pct(r.quotes_accuracy),
                    "Delta": fmt_delta(r.context_accuracy, r.quotes_accuracy),
                }
                for r in self.rows
            ]
        )

    def render(self) -> str:
        parts = []
        if self.metrics_rows:
            parts.append("Quote extraction\n" + self.metrics_frame().to_string(index=False))
        if self.rows:
            parts.append("Semantic accuracy\n" + self.accuracy_frame().to_string(index=False))
        return "\n\n".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "labels": list(self.labels),
            "metrics_rows": [
                {"metric": r.metric, "before": r.before, "after": r.after, "delta": r.delta}
                for r in self.metrics_rows
            ],
            "rows": [
                {
                    "model": r.model,
                    "context_accuracy": r.context_accuracy,
                    "quotes_accuracy": r.quotes_accuracy,
                    "delta": r.delta,
                }
                for r in self.rows
            ],
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ComparisonReport":
        # Stored deltas are informational; they are always recomputed.
        return cls(
            rows=[AccuracyRow(r["model"], r["context_accuracy"], r["quotes_accuracy"]) for r in data.get("rows", [])],
            metrics_rows=[MetricRow(r["metric"], r["after"], r.get("before")) for r in data.get("metrics_rows", [])],
            labels=list(data.get("labels", ["before", "after"])),
            provenance=dict(data.get("provenance", {})),
        )


def provenance_footer(provenance: Dict[str, Any]) -> str:
    lines = ["Provenance"]
    for key in sorted(provenance):
        value = provenance[key]
        if isinstance(value, dict):
            value = ", ".join(f"{k}={v}" for k, v in sorted(value.items()))
        lines.append(f"  {key}: {value}")
    return "\n".join(lines)


def render_document(report: ComparisonReport) -> str:
    return report.render() + "\n\n" + provenance_footer(report.provenance) + "\n"

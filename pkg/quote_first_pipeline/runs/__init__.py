"""Run manifests, checkpoints, reports and the stage commands."""
from .manifest import RunManifest, RunStatus, list_runs, load_manifest, new_run_id, save_manifest
from .checkpoint import JsonlCheckpoint
from .report import AccuracyRow, ComparisonReport, MetricRow, render_document
from .commands import (
    RunContext,
    cmd_ab_test,
    cmd_distill,
    cmd_eval_quotes,
    cmd_export_train,
    cmd_quote,
    cmd_report,
)

__all__ = [
    "AccuracyRow",
    "ComparisonReport",
    "JsonlCheckpoint",
    "MetricRow",
    "RunContext",
    "RunManifest",
    "RunStatus",
    "cmd_ab_test",
    "cmd_distill",
    "cmd_eval_quotes",
    "cmd_export_train",
    "cmd_quote",
    "cmd_report",
    "list_runs",
    "load_manifest",
    "new_run_id",
    "render_document",
    "save_manifest",
]

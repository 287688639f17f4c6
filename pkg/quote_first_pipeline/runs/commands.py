"""Stage commands behind the CLI. Each one writes its outputs and a run manifest."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..config import DEFAULT_CACHE_DIR, PipelineConfig
from ..dataset import corpus_digest, load_corpus, save_split, split_dataset
from ..errors import AllSamplesFailedError, DataError, PartialRunError, UsageError
from ..judge import Judge, LLMJudge, OracleJudge, evaluate_quoter, semantic_accuracy
from ..judge.scores import QuoteEvaluation
from ..llm import ChatEndpoint, EndpointConfig, ResponseCache, build_endpoint
from ..llm.client import ChatBackend
from ..pipeline import (
    AnswerRecord,
    FailureRecord,
    GoldSample,
    QuoterPrediction,
    answer_batch,
    build_gold_dataset,
    export_training_file,
    run_quoter_batch,
)
from ..pipeline.prompts import ANSWER, DISTILL, JUDGE_ANSWER, JUDGE_QUOTE, JUDGE_SETS, QUOTER, template_digests
from ..pipeline.records import EVIDENCE_MODES
from ..storage import file_digest, read_json, read_jsonl, text_digest, write_json, write_jsonl
from .checkpoint import JsonlCheckpoint
from .manifest import RunManifest, RunStatus, load_manifest, new_run_id, save_manifest
from .report import AccuracyRow, ComparisonReport, render_document

logger = logging.getLogger(__name__)

GOLD_PARTS = ("train", "test")
TRAINING_FILE = "quoter_train.jsonl"
FAILURES_FILE = "failures.jsonl"
COMPARISON_FILE = "comparison.json"
REPORT_FILE = "report.txt"


def safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "model"


@dataclass
class RunContext:
    """Everything a command needs besides its own inputs.

    ``backends`` maps endpoint names to pre-built backends so tests and dry
    runs can swap the HTTP client out.
    """

    config: PipelineConfig
    resume: Optional[str] = None
    progress: bool = True
    backends: Dict[str, ChatBackend] = field(default_factory=dict)
    _endpoints: Dict[str, ChatEndpoint] = field(default_factory=dict, repr=False)
    _cache: Optional[ResponseCache] = field(default=None, repr=False)

    @property
    def cache(self) -> ResponseCache:
        if self._cache is None:
            self._cache = ResponseCache(self.config.cache_dir or self.config.output_dir / DEFAULT_CACHE_DIR)
        return self._cache

    def endpoint(self, ep: EndpointConfig) -> ChatEndpoint:
        if ep.name not in self._endpoints:
            backend = self.backends.get(ep.name)
            if backend is not None:
                self._endpoints[ep.name] = ChatEndpoint(ep, backend, self.cache)
            else:
                self._endpoints[ep.name] = build_endpoint(ep, self.cache)
        return self._endpoints[ep.name]

    def judge(self) -> Judge:
        if self.config.judge.kind == "llm":
            return LLMJudge(self.endpoint(self.config.require("judge_endpoint", "judge")))
        return OracleJudge()

    def judge_templates(self) -> Dict[str, str]:
        if self.config.judge.kind != "llm":
            return {}
        return template_digests([JUDGE_QUOTE, JUDGE_ANSWER, JUDGE_SETS])

    def run_dir(self, run_id: str) -> Path:
        return self.config.runs_dir / run_id

    def start(
        self,
        stage: str,
        input_ids: Sequence[str],
        input_digest: str,
        templates: Dict[str, str],
        endpoint_models: Dict[str, str],
    ) -> RunManifest:
        if self.resume:
            previous = load_manifest(self.config.runs_dir, self.resume)
            if previous.stage != stage:
                raise UsageError(f"Run {self.resume} is a '{previous.stage}' run, not '{stage}'.")
            run_id, started_at = previous.run_id, previous.started_at
            logger.info("Resuming run %s (%s)", run_id, stage)
        else:
            run_id, started_at = new_run_id(), None
            logger.info("Starting run %s (%s) over %d samples", run_id, stage, len(input_ids))
        manifest = RunManifest(
            run_id=run_id,
            stage=stage,
            config_digest=self.config.digest(),
            config=self.config.to_dict(),
            template_digests=templates,
            endpoint_models=endpoint_models,
            input_digest=input_digest,
            input_ids=list(input_ids),
        )
        if started_at is not None:
            manifest.started_at = started_at
        save_manifest(manifest, self.config.runs_dir)
        return manifest

    def close(self, manifest: RunManifest, failures: Sequence[FailureRecord] = ()) -> RunManifest:
        status = manifest.finish()
        report = None
        if failures:
            report = self.run_dir(manifest.run_id) / FAILURES_FILE
            write_jsonl(report, (f.to_dict() for f in failures))
            manifest.outputs["failures"] = str(report)
        path = save_manifest(manifest, self.config.runs_dir)
        logger.info(
            "Run %s %s: %d processed, %d failed (manifest %s)",
            manifest.run_id, status.value, len(manifest.processed), len(manifest.failed), path,
        )
        if status is RunStatus.PARTIAL:
            raise PartialRunError(manifest.run_id, manifest.pending, {"manifest": str(path)})
        if status is RunStatus.FAILED:
            raise AllSamplesFailedError(manifest.stage, list(failures), str(report) if report else None)
        return manifest


def load_gold(path: Path) -> List[GoldSample]:
    if not path.exists():
        raise DataError(f"No gold data at {path}; run 'distill' first.")
    return [GoldSample.from_dict(row) for row in read_jsonl(path)]


def _gold_path(config: PipelineConfig, part: str) -> Path:
    return config.gold_dir / f"{part}.jsonl"


def _first_failure_per_id(failures: Sequence[FailureRecord]) -> List[FailureRecord]:
    seen: Dict[str, FailureRecord] = {}
    for f in failures:
        seen.setdefault(f.id, f)
    return list(seen.values())


def cmd_distill(ctx: RunContext) -> RunManifest:
    """Split the corpus and distill gold quotes for both parts, skipping ids already done."""
    config = ctx.config
    corpus_path = config.require("corpus_path", "distill")
    teacher_cfg = config.require("teacher", "distill")

    samples = load_corpus(corpus_path, config.corpus_format)
    split = split_dataset(samples, config.test_size, config.seed)
    save_split(split, config.split_dir)

    teacher = ctx.endpoint(teacher_cfg)
    manifest = ctx.start(
        "distill",
        [s.id for s in split.train + split.test],
        corpus_digest(samples),
        template_digests([DISTILL]),
        {"teacher": teacher.model},
    )

    failures: List[FailureRecord] = []
    processed: List[str] = []
    for part, part_samples in zip(GOLD_PARTS, (split.train, split.test)):
        checkpoint = JsonlCheckpoint(_gold_path(config, part))
        ids = [s.id for s in part_samples]
        pending = set(checkpoint.pending(ids))
        todo = [s for s in part_samples if s.id in pending]
        try:
            result = build_gold_dataset(
                todo,
                teacher,
                on_result=lambda _id, g: checkpoint.record(g.to_dict()),
                progress=ctx.progress,
            )
            failures.extend(result.failures)
        except AllSamplesFailedError as exc:
            failures.extend(exc.failures)
        checkpoint.finalize(ids)
        processed.extend(checkpoint.done(ids))
        manifest.outputs[f"gold_{part}"] = str(checkpoint.output)

    manifest.outputs["split"] = str(config.split_dir)
    manifest.record(processed, failures)
    manifest.summary = {
        "gold": {"train": len(split.train), "test": len(split.test)},
        "backend_calls": teacher.backend_calls,
        "cache_hits": teacher.cache_hits,
    }
    return ctx.close(manifest, failures)


def cmd_export_train(ctx: RunContext, output: Optional[Path] = None) -> Tuple[RunManifest, int]:
    config = ctx.config
    gold_path = _gold_path(config, "train")
    gold = load_gold(gold_path)
    output = output or config.output_dir / TRAINING_FILE
    manifest = ctx.start(
        "export-train",
        [g.id for g in gold],
        file_digest(gold_path) if gold_path.exists() else "",
        template_digests([QUOTER]),
        {},
    )
    count = export_training_file(gold, output)
    manifest.record([g.id for g in gold], [])
    manifest.outputs["training_file"] = str(output)
    manifest.summary = {"rows": count}
    return ctx.close(manifest), count


def _predictions_path(config: PipelineConfig, model: str) -> Path:
    return config.output_dir / "predictions" / f"{safe_name(model)}.jsonl"


def _run_quote_stage(ctx: RunContext, gold: Sequence[GoldSample]) -> Tuple[Path, List[FailureRecord], List[str]]:
    quoter = ctx.endpoint(ctx.config.require("quoter", "quote"))
    checkpoint = JsonlCheckpoint(_predictions_path(ctx.config, quoter.model))
    ids = [g.id for g in gold]
    pending = set(checkpoint.pending(ids))
    result = run_quoter_batch(
        [g.sample for g in gold if g.id in pending],
        quoter,
        parse_mode=ctx.config.parse_mode,
        on_result=lambda _id, p: checkpoint.record(p.to_dict()),
        progress=ctx.progress,
    )
    checkpoint.finalize(ids)
    done = checkpoint.done(ids)
    # Parse failures from earlier runs live in the checkpoint rows.
    failures = [
        FailureRecord(i, "quote", checkpoint.rows[i]["parse_error"])
        for i in done
        if checkpoint.rows[i].get("parse_error")
    ]
    failures += [f for f in result.failures if f.id not in checkpoint.rows]
    return checkpoint.output, failures, done


def cmd_quote(ctx: RunContext) -> RunManifest:
    config = ctx.config
    gold_path = _gold_path(config, "test")
    gold = load_gold(gold_path)
    quoter_cfg = config.require("quoter", "quote")
    manifest = ctx.start(
        "quote",
        [g.id for g in gold],
        file_digest(gold_path),
        template_digests([QUOTER]),
        {"quoter": quoter_cfg.model},
    )
    output, failures, done = _run_quote_stage(ctx, gold)
    manifest.record(done, failures)
    manifest.outputs["predictions"] = str(output)
    quoter = ctx.endpoint(quoter_cfg)
    manifest.summary = {"backend_calls": quoter.backend_calls, "cache_hits": quoter.cache_hits}
    return ctx.close(manifest, failures)


def load_predictions(path: Path) -> List[QuoterPrediction]:
    if not path.exists():
        raise DataError(f"Predictions file not found: {path}")
    return [QuoterPrediction.from_dict(row) for row in read_jsonl(path)]


def _judge_provenance(evaluation_judge: Dict, aggregation: str = "macro") -> Dict[str, str]:
    return {
        "judge": evaluation_judge.get("kind", ""),
        "judge_model": evaluation_judge.get("model") or "-",
        "aggregation": aggregation,
    }


def _prediction_labels(sources: Sequence[Path], labels: Sequence[str]) -> List[str]:
    """Distinct column labels; file stems unless they collide, then before/after."""
    if labels:
        return list(labels)
    stems = [Path(p).stem for p in sources]
    if len(set(stems)) != len(stems):
        return ["before", "after"]
    return stems


def cmd_eval_quotes(ctx: RunContext) -> Tuple[RunManifest, ComparisonReport]:
    """Score one or two prediction sets against the gold test split."""
    config = ctx.config
    gold_path = _gold_path(config, "test")
    gold = load_gold(gold_path)
    judge = ctx.judge()

    sources = list(config.predictions)
    labels = list(config.prediction_labels)
    if len(sources) > 2:
        raise UsageError("eval-quotes compares at most two prediction sets.")

    endpoints = {"judge": config.judge_endpoint.model} if config.judge.kind == "llm" else {}
    manifest = ctx.start(
        "eval-quotes",
        [g.id for g in gold],
        file_digest(gold_path),
        ctx.judge_templates(),
        endpoints,
    )

    failures: List[FailureRecord] = []
    if not sources:
        path, quote_failures, _ = _run_quote_stage(ctx, gold)
        failures.extend(f for f in quote_failures if f.retryable)
        sources = [path]
        manifest.endpoint_models["quoter"] = config.quoter.model
        manifest.template_digests.update(template_digests([QUOTER]))
    labels = _prediction_labels(sources, labels)

    gold_ids = {g.id for g in gold}
    retry_ids = {f.id for f in failures}
    evaluations: List[QuoteEvaluation] = []
    for position, (source, label) in enumerate(zip(sources, labels)):
        preds = [p for p in load_predictions(Path(source)) if p.sample_id not in retry_ids]
        scored_gold = [g for g in gold if g.id not in retry_ids]
        if {p.sample_id for p in preds} - gold_ids:
            logger.warning("Predictions in %s include ids outside the gold test split", source)
        evaluation = evaluate_quoter(
            preds, scored_gold, judge, set_level=config.judge.set_level, label=label, progress=ctx.progress
        )
        evaluations.append(evaluation)
        metrics_path = ctx.run_dir(manifest.run_id) / f"metrics_{position}_{safe_name(label)}.json"
        write_json(metrics_path, evaluation.to_dict())
        manifest.outputs[f"metrics_{position}"] = str(metrics_path)
        failures.extend(FailureRecord(i, "eval-quotes", "judge output unparseable") for i in evaluation.excluded)

    provenance = {
        manifest.run_id: {
            "stage": "eval-quotes",
            "config": manifest.config_digest[:12],
            **_judge_provenance(evaluations[0].judge, evaluations[0].aggregation),
        }
    }
    report = ComparisonReport.from_quote_metrics(
        [e.aggregate for e in evaluations],
        labels=labels if len(labels) == 2 else labels[-1:],
        provenance=provenance,
    )
    _write_report(ctx, manifest, report)

    failures = _first_failure_per_id(failures)
    manifest.record([g.id for g in gold], failures)
    manifest.summary = {e.label: e.to_dict()["aggregate"] for e in evaluations}
    return ctx.close(manifest, failures), report


def _answers_path(config: PipelineConfig, model: str, mode: str) -> Path:
    return config.output_dir / "answers" / f"{safe_name(model)}.{mode}.jsonl"


def cmd_ab_test(ctx: RunContext) -> Tuple[RunManifest, ComparisonReport]:
    """Answer the gold test split from full context and from gold quotes, per base model."""
    config = ctx.config
    gold_path = _gold_path(config, "test")
    gold = load_gold(gold_path)
    bases = [ctx.endpoint(ep) for ep in config.require("base_models", "ab-test")]
    judge = ctx.judge()

    endpoints = {f"base[{i}]": b.model for i, b in enumerate(bases)}
    if config.judge.kind == "llm":
        endpoints["judge"] = config.judge_endpoint.model
    manifest = ctx.start(
        "ab-test",
        [g.id for g in gold],
        file_digest(gold_path),
        {**template_digests([ANSWER]), **ctx.judge_templates()},
        endpoints,
    )

    golds = {g.id: g.sample.answer for g in gold}
    ids = [g.id for g in gold]
    failures: List[FailureRecord] = []
    rows: List[AccuracyRow] = []
    for base in bases:
        answered: Dict[str, Dict[str, AnswerRecord]] = {}
        for mode in EVIDENCE_MODES:
            checkpoint = JsonlCheckpoint(_answers_path(config, base.model, mode))
            pending = set(checkpoint.pending(ids))
            result = answer_batch(
                [g for g in gold if g.id in pending],
                mode,
                base,
                on_result=lambda _id, a: checkpoint.record(a.to_dict()),
                progress=ctx.progress,
            )
            failures.extend(result.failures)
            checkpoint.finalize(ids)
            answered[mode] = {i: AnswerRecord.from_dict(checkpoint.rows[i]) for i in checkpoint.done(ids)}
            manifest.outputs[f"answers_{base.model}_{mode}"] = str(checkpoint.output)

        # Both modes are scored over the same samples.
        common = [i for i in ids if all(i in answered[m] for m in EVIDENCE_MODES)]
        if not common:
            logger.warning("No samples answered under both evidence modes for %s", base.model)
            continue
        reports = {
            mode: semantic_accuracy(
                [answered[mode][i] for i in common],
                golds,
                judge,
                threshold=config.judge.threshold,
                progress=ctx.progress,
            )
            for mode in EVIDENCE_MODES
        }
        for mode, acc in reports.items():
            failures.extend(FailureRecord(i, "ab-test", f"judge output unparseable ({mode})") for i in acc.excluded)
            path = ctx.run_dir(manifest.run_id) / f"accuracy_{safe_name(base.model)}.{mode}.json"
            write_json(path, acc.to_dict())
        rows.append(AccuracyRow(base.model, reports["context"].s_acc, reports["quotes"].s_acc))

    provenance = {
        manifest.run_id: {
            "stage": "ab-test",
            "config": manifest.config_digest[:12],
            **_judge_provenance(judge.describe()),
            "threshold": config.judge.threshold if config.judge.threshold is not None else "-",
        }
    }
    report = ComparisonReport(rows=rows, provenance=provenance)
    _write_report(ctx, manifest, report)

    failures = _first_failure_per_id(failures)
    manifest.record(ids, failures)
    manifest.summary = {
        "rows": [{"model": r.model, "context": r.context_accuracy, "quotes": r.quotes_accuracy} for r in rows],
        "backend_calls": sum(b.backend_calls for b in bases),
    }
    return ctx.close(manifest, failures), report


def _write_report(ctx: RunContext, manifest: RunManifest, report: ComparisonReport) -> None:
    run_dir = ctx.run_dir(manifest.run_id)
    write_json(run_dir / COMPARISON_FILE, report.to_dict())
    (run_dir / REPORT_FILE).write_text(render_document(report), encoding="utf-8")
    manifest.outputs["comparison"] = str(run_dir / COMPARISON_FILE)
    manifest.outputs["report"] = str(run_dir / REPORT_FILE)


def _before_after(first: ComparisonReport, second: ComparisonReport) -> ComparisonReport:
    """Two single-column quote evaluations become one before/after table."""
    merged = ComparisonReport.from_dict(first.to_dict())
    for row, later in zip(merged.metrics_rows, second.metrics_rows):
        row.before, row.after = row.after, later.after
    merged.labels = [first.labels[-1], second.labels[-1]]
    if merged.labels[0] == merged.labels[1]:
        merged.labels = ["before", "after"]
    merged.provenance = {**first.provenance, **second.provenance}
    merged.rows = first.rows + second.rows
    return merged


def cmd_report(ctx: RunContext, run_ids: Sequence[str]) -> Tuple[str, ComparisonReport]:
    if not run_ids:
        raise UsageError("report needs at least one run id.")
    reports = []
    for run_id in run_ids:
        manifest = load_manifest(ctx.config.runs_dir, run_id)
        comparison = manifest.outputs.get("comparison")
        if not comparison or not Path(comparison).exists():
            raise UsageError(f"Run {run_id} ({manifest.stage}) has no comparison to report.")
        report = ComparisonReport.from_dict(read_json(Path(comparison)))
        for key in report.provenance:
            report.provenance[key] = {**report.provenance[key], "status": manifest.status.value}
        reports.append(report)

    single_column = [r for r in reports if r.metrics_rows and all(m.before is None for m in r.metrics_rows)]
    if len(reports) == 2 and len(single_column) == 2:
        combined = _before_after(*reports)
    else:
        combined = reports[0]
        for other in reports[1:]:
            combined = combined.merge(other)

    document = render_document(combined)
    out_dir = ctx.config.output_dir / "reports"
    stem = text_digest("|".join(run_ids))[:12]
    write_json(out_dir / f"{stem}.json", combined.to_dict())
    (out_dir / f"{stem}.txt").parent.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}.txt").write_text(document, encoding="utf-8")
    return document, combined

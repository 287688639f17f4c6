import argparse
import logging
import sys
from pathlib import Path

# Allow running as a script without installing the package
if __package__ is None or __package__ == "":
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from dotenv import load_dotenv

from quote_first_pipeline.config import JUDGE_KINDS, PARSE_MODES, load_config
from quote_first_pipeline.errors import EXIT_OK, EXIT_USAGE, QuotePipelineError
from quote_first_pipeline.runs import (
    RunContext,
    cmd_ab_test,
    cmd_distill,
    cmd_eval_quotes,
    cmd_export_train,
    cmd_quote,
    cmd_report,
)

logger = logging.getLogger("quote_first_pipeline")

COMMANDS = ("distill", "export-train", "quote", "eval-quotes", "ab-test", "report")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; usage errors here are exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Path to the run config YAML")
    common.add_argument("--resume", metavar="RUN_ID", default=None, help="Continue an earlier run")
    common.add_argument("--judge", choices=JUDGE_KINDS, default=None, help="Override judge.kind")
    common.add_argument("--parse-mode", choices=PARSE_MODES, default=None, help="Override parse_mode")
    common.add_argument("--parallelism", type=int, default=None, help="Override every endpoint's parallelism")
    common.add_argument("--cache-dir", default=None, help="Override cache_dir")
    common.add_argument("--log-level", default="INFO", help="Logging level")
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")

    parser = _Parser(description="Quote-first-then-answer pipeline")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("distill", parents=[common], help="Split the corpus and distill gold quotes")
    export = sub.add_parser("export-train", parents=[common], help="Write the quoter training file")
    export.add_argument("--output", default=None, help="Training file path")
    sub.add_parser("quote", parents=[common], help="Run the quoter over the gold test split")
    sub.add_parser("eval-quotes", parents=[common], help="Score quoter predictions against gold quotes")
    sub.add_parser("ab-test", parents=[common], help="Compare answers from context and from quotes")
    report = sub.add_parser("report", parents=[common], help="Render tables for finished runs")
    report.add_argument("run_ids", nargs="*", help="Run ids to include")
    return parser


def run(args: argparse.Namespace) -> int:
    if args.parallelism is not None and args.parallelism < 1:
        logger.error("--parallelism must be >= 1")
        return EXIT_USAGE
    config = load_config(Path(args.config)).with_overrides(
        judge_kind=args.judge,
        parse_mode=args.parse_mode,
        parallelism=args.parallelism,
        cache_dir=args.cache_dir,
    )
    ctx = RunContext(config, resume=args.resume, progress=not args.quiet)

    if args.command == "distill":
        manifest = cmd_distill(ctx)
        print(f"Run {manifest.run_id}: {len(manifest.processed)} gold samples, {len(manifest.failed)} failed")
    elif args.command == "export-train":
        manifest, count = cmd_export_train(ctx, Path(args.output) if args.output else None)
        print(f"Run {manifest.run_id}: wrote {count} training rows to {manifest.outputs['training_file']}")
    elif args.command == "quote":
        manifest = cmd_quote(ctx)
        print(f"Run {manifest.run_id}: predictions in {manifest.outputs['predictions']}")
    elif args.command == "eval-quotes":
        manifest, report = cmd_eval_quotes(ctx)
        print(f"Run {manifest.run_id}")
        print(report.render())
    elif args.command == "ab-test":
        manifest, report = cmd_ab_test(ctx)
        print(f"Run {manifest.run_id}")
        print(report.render())
    elif args.command == "report":
        document, _ = cmd_report(ctx, args.run_ids)
        print(document)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    load_dotenv()
    try:
        return run(args)
    except QuotePipelineError as exc:
        logger.error("%s", exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""voidscope command-line interface."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .crawl import BlobStore, CrawlPlan, FixtureFetcher, LiveFetcher, run_crawl
from .pipeline import STAGE_ORDER, load_config, run_pipeline


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the key=value configuration file")
    parser.add_argument("--workdir", help="override the artifact root directory")


def _parse_cutoffs(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    value = int(text)
    return value, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voidscope", description="Search-engine warning-banner and data-void audit toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in ("ingest", "parse", "aggregate", "export-model-data"):
        p = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_config(p)

    p = sub.add_parser("crawl", help="run the crawl stage, or execute an explicit plan file")
    p.add_argument("--config", help="configuration file (omit when using --plan)")
    p.add_argument("--workdir", help="override the artifact root directory")
    p.add_argument("--plan", help="crawl plan JSON to execute directly")
    p.add_argument("--out", help="blob store directory for --plan mode")
    p.add_argument("--delay-ms", type=int, help="politeness delay override")
    p.add_argument("--pages", help="serve recorded fixture pages from this directory")

    p = sub.add_parser("stability", help="compute stability metrics")
    _add_config(p)
    p.add_argument("--window-max", type=int, help="largest RBO window size")

    p = sub.add_parser("explain", help="run URL-dependency explanations")
    _add_config(p)
    p.add_argument("--cutoffs", help="rank cutoff range, e.g. 1..50")

    p = sub.add_parser("logit", help="fit banner-presence logistic regressions")
    _add_config(p)
    p.add_argument("--target", choices=("low_quality", "low_relevance"), help="fit only this target (both by default)")
    p.add_argument("--alpha", type=float, help="L1 strength override")

    p = sub.add_parser("report", help="produce the prevalence report")
    _add_config(p)
    p.add_argument("--definition", choices=("banner", "quality", "model"), help="extrapolation definition override")
    p.add_argument("--threshold", type=float, help="quality void threshold override")

    p = sub.add_parser("import-model-preds", help="ingest a model confidence CSV")
    _add_config(p)
    p.add_argument("--file", help="confidence CSV (query_id, confidence)")

    p = sub.add_parser("run", help="run several stages in order")
    _add_config(p)
    p.add_argument("--stages", help=f"comma-separated subset of: {','.join(STAGE_ORDER)}")

    return parser


def _standalone_crawl(args: argparse.Namespace) -> int:
    plan = CrawlPlan.from_dict(json.loads(Path(args.plan).read_text("utf-8")))
    if args.delay_ms is not None:
        plan = CrawlPlan(
            wave_id=plan.wave_id,
            queries=plan.queries,
            cadence=plan.cadence,
            results_per_query=plan.results_per_query,
            politeness_delay_ms=args.delay_ms,
            location_label=plan.location_label,
        )
    store = BlobStore(args.out or "store")
    fetcher = FixtureFetcher(args.pages) if args.pages else LiveFetcher()
    count = gaps = 0
    for record in run_crawl(plan, fetcher, store):
        count += 1
        gaps += int(record.gap)
    print(f"crawl complete: {count} records ({gaps} gaps) -> {store.root}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "crawl" and args.plan:
        return _standalone_crawl(args)

    overrides: dict = {}
    if getattr(args, "workdir", None):
        overrides["workdir"] = args.workdir
    if getattr(args, "window_max", None) is not None:
        overrides["window_max"] = args.window_max
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if getattr(args, "target", None):
        overrides["logit_target"] = args.target
    if getattr(args, "threshold", None) is not None:
        overrides["quality_threshold"] = args.threshold
    if getattr(args, "definition", None):
        overrides["extrapolation_definition"] = args.definition
    if getattr(args, "delay_ms", None) is not None:
        overrides["politeness_delay_ms"] = args.delay_ms
    if getattr(args, "pages", None):
        overrides["fixture_pages"] = args.pages
    if getattr(args, "file", None):
        overrides["model_confidences"] = args.file
    if getattr(args, "cutoffs", None):
        lo, hi = _parse_cutoffs(args.cutoffs)
        overrides["cutoff_min"], overrides["cutoff_max"] = lo, hi

    if not getattr(args, "config", None):
        print("error: --config is required", file=sys.stderr)
        return 2
    config = load_config(args.config, overrides)

    if args.command == "run":
        stages = args.stages.split(",") if args.stages else None
    else:
        stages = [args.command]
    results = run_pipeline(config, stages)
    for stage, status in results.items():
        print(f"{stage}: {status}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

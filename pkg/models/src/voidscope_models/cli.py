"""voidscope-models command-line interface."""

from __future__ import annotations

import argparse
import csv
import json
from pathlib import Path

from .embeddings import get_embedder
from .evaluate import (
    DEFAULT_K_LIST,
    evaluate_predictions,
    write_confidence_csv,
    write_quality_curve_csv,
    write_topk_csv,
)
from .gnn import TrainConfig, train_gnn
from .graph import build_graph, load_records
from .textmodel import TextTrainConfig, finetune_text_classifier


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voidscope-models", description="Train banner-prediction models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and export predictions")
    p.add_argument("--data", required=True, help="model_data.ndjson exported by the audit toolkit")
    p.add_argument("--variant", choices=("text", "hom", "het"), default="het")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--epochs", type=int)
    p.add_argument("--hidden", type=int, default=0, help="0 picks the width targeting the parameter budget")
    p.add_argument("--embedder", default="hashing", help="hashing[:dim] | st:<model> | distilbert:<model>")
    p.add_argument("--quality-csv", help="domain,score table for the quality-curve evaluation")
    p.add_argument("--new-banners", help="file of newly-bannered query_ids for top-K evaluation")
    p.add_argument("--k-list", default=",".join(str(k) for k in DEFAULT_K_LIST))
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _quality_by_query(records, quality_csv: str | None) -> dict[str, float]:
    if not quality_csv:
        return {}
    scores: dict[str, float] = {}
    with open(quality_csv, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            domain = row["domain"].strip().lower()
            domain = domain[4:] if domain.startswith("www.") else domain
            scores[domain] = float(row["score"])
    joined = {}
    for record in records:
        values = [scores[d] for d, _ in record.results if d in scores]
        if values:
            joined[record.query_id] = sum(values) / len(values)
    return joined


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = load_records(args.data)

    if args.variant == "text":
        config = TextTrainConfig(seed=args.seed)
        if args.epochs:
            config.epochs = args.epochs
        result = finetune_text_classifier([(r.text, r.label) for r in records], config)
        result.card.export_ref = None
        result.card.save(out / "card.json")
        print(json.dumps(result.card.metrics, indent=2))
        return 0

    embedder = get_embedder(args.embedder)
    graph = build_graph(records, embedder, seed=args.seed)
    config = TrainConfig(runs=args.runs, seed=args.seed, hidden=args.hidden)
    if args.epochs:
        config.epochs = args.epochs
    result = train_gnn(graph, args.variant, config)

    quality = _quality_by_query(records, args.quality_csv)
    new_banners = None
    if args.new_banners:
        new_banners = {
            line.strip() for line in Path(args.new_banners).read_text("utf-8").splitlines() if line.strip()
        }
    k_list = [int(k) for k in args.k_list.split(",") if k]
    bundle = None
    if quality:
        bundle = evaluate_predictions(
            result, graph.query_ids, quality, k_list=k_list, new_banner_ids=new_banners
        )
        write_confidence_csv(out / "confidences.csv", bundle.ranked_predictions)
        write_quality_curve_csv(out / "quality_curve.csv", bundle.quality_curve)
        if bundle.top_k_hits:
            write_topk_csv(out / "topk.csv", bundle.top_k_hits)
        result.card.export_ref = str(out / "confidences.csv")
        (out / "evaluation.json").write_text(
            json.dumps(bundle.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    result.card.save(out / "card.json")
    print(json.dumps(result.card.metrics, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

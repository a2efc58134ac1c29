"""Composable analysis pipeline with resumable, idempotent stages.

Every stage reads NDJSON/CSV artifacts, writes new artifacts under the
configured artifact root, and records a provenance sidecar (config hash,
input hashes, output hashes, toolkit version, seed). A stage whose sidecar
still matches its inputs is skipped wholesale, so reruns are no-ops and
artifacts stay byte-identical. All analysis stages are deterministic
functions of their inputs; the crawl stage is deterministic only when it
runs against recorded fixture pages.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .banners import BannerType
from .crawl import BlobStore, FixtureFetcher, LiveFetcher, run_crawl, schedule_wave
from .dependency import (
    build_timelines,
    cooccurrence_tally,
    pair_explanation,
    rank_cutoff_explanation,
    single_url_explanation,
)
from .directives import extract_directive, load_engine_rules
from .ioutil import read_json, read_ndjson, sha256_bytes, sha256_file, write_json, write_ndjson
from .lexicons import LexiconMatcher, load_lexicons
from .metrics import (
    SerpAggregate,
    aggregate_serp,
    load_news_domains,
    load_partisanship_scores,
    load_quality_scores,
    load_seo_metrics,
)
from .queries import normalize_query
from .regression import SingleClassError, assemble_dataset, fit_l1_logit
from .serphtml import SerpRecord, UnparseableHtmlError, parse_serp
from .stability import (
    RankedList,
    build_rbo_matrix,
    build_stability_report,
    jaccard_matrix,
    url_churn,
)
from .voids import VoidLabel, classify_void_by_quality, classify_void_by_model, prevalence_report, read_confidence_csv

STAGE_ORDER = (
    "ingest",
    "crawl",
    "parse",
    "aggregate",
    "stability",
    "explain",
    "logit",
    "export-model-data",
    "import-model-preds",
    "report",
)

RELEVANCE_TYPES = {
    BannerType.LOW_RELEVANCE_MANY,
    BannerType.LOW_RELEVANCE_ANY,
    BannerType.LOW_RELEVANCE_NO_MATCHES,
}


class ConfigError(ValueError):
    pass


class MissingDependencyError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    """Flat key=value configuration; paths resolve relative to the file."""

    # inputs
    posts_file: Path = Path("posts.txt")
    quality_csv: Path = Path("quality.csv")
    partisanship_csv: Path = Path("partisanship.csv")
    seo_csv: Path = Path("seo.csv")
    news_domains: Path = Path("news.txt")
    engine_rules: Optional[Path] = None
    lexicons: Optional[Path] = None
    fixture_pages: Optional[Path] = None
    model_confidences: Optional[Path] = None
    # artifact root
    workdir: Path = Path("out")
    # crawl parameters
    wave_id: str = "wave"
    cadence: str = "single_pass"
    interval_seconds: int = 14400
    steps: int = 1
    results_per_query: int = 10
    politeness_delay_ms: int = 0
    location_label: str = ""
    crawl_base_time: str = "2024-06-07T00:00:00Z"
    # analysis parameters
    window_max: int = 3
    cutoff_min: int = 1
    cutoff_max: int = 5
    rbo_depth: int = 0  # 0 = full depth
    quality_threshold: float = 0.5
    model_threshold: float = 0.9
    alpha: float = 0.1
    logit_target: str = ""  # empty fits every target
    extrapolation_daily_searches: float = 0.0  # 0 disables the block
    extrapolation_definition: str = "quality"
    seed: int = 0
    # provenance
    config_hash: str = field(default="", repr=False)

    @property
    def out_dir(self) -> Path:
        return self.workdir

    @property
    def store_dir(self) -> Path:
        return self.workdir / "store"

    def artifact(self, name: str) -> Path:
        return self.out_dir / name

    def validate(self, stages: list[str]) -> None:
        problems = []
        needed_files = {
            "ingest": [self.posts_file],
            "aggregate": [self.quality_csv, self.partisanship_csv, self.seo_csv, self.news_domains],
        }
        for stage in stages:
            for path in needed_files.get(stage, []):
                if not path.exists():
                    problems.append(f"{stage}: missing input file {path}")
        if "crawl" in stages and self.fixture_pages is not None and not self.fixture_pages.exists():
            problems.append(f"crawl: fixture pages directory {self.fixture_pages} does not exist")
        if "import-model-preds" in stages:
            if self.model_confidences is None or not self.model_confidences.exists():
                problems.append("import-model-preds: model_confidences file not configured or missing")
        if self.extrapolation_definition not in ("quality", "model", "banner"):
            problems.append(f"unknown extrapolation_definition {self.extrapolation_definition!r}")
        if self.logit_target not in ("", "low_quality", "low_relevance"):
            problems.append(f"unknown logit_target {self.logit_target!r}")
        if problems:
            raise ConfigError("; ".join(problems))


def load_config(path: str | Path, overrides: Optional[dict] = None) -> PipelineConfig:
    """Parse the plain-text ``key = value`` configuration file."""
    path = Path(path)
    raw = path.read_text("utf-8")
    values: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    if overrides:
        values.update({k: str(v) for k, v in overrides.items() if v is not None})

    fields = {f.name: f for f in dataclasses.fields(PipelineConfig) if f.name != "config_hash"}
    kwargs: dict = {}
    base = path.parent
    for key, value in values.items():
        if key not in fields:
            raise ConfigError(f"unknown configuration key: {key!r}")
        target = fields[key]
        if target.type in ("Path", Path) or "Path" in str(target.type):
            kwargs[key] = (base / value).resolve() if value else None
        elif isinstance(target.default, bool):
            kwargs[key] = value.lower() in ("1", "true", "yes")
        elif isinstance(target.default, int) and not isinstance(target.default, bool):
            kwargs[key] = int(value)
        elif isinstance(target.default, float):
            kwargs[key] = float(value)
        else:
            kwargs[key] = value
    config = PipelineConfig(**kwargs)
    # hash covers the file contents plus semantic overrides; the artifact
    # root is excluded so the same corpus run in two locations produces
    # byte-identical artifacts
    hashed_overrides = {
        k: str(v) for k, v in sorted((overrides or {}).items()) if k != "workdir" and v is not None
    }
    config.config_hash = sha256_bytes((raw + repr(hashed_overrides)).encode("utf-8"))
    return config


def query_id(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _metadata(config: PipelineConfig, inputs: dict[str, str]) -> dict:
    return {
        "toolkit_version": __version__,
        "config_hash": config.config_hash,
        "seed": config.seed,
        "inputs": inputs,
    }


def _hash_many(paths: list[Path]) -> dict[str, str]:
    return {p.name: sha256_file(p) for p in paths if p.exists()}


# --- stage implementations -------------------------------------------------


def stage_ingest(config: PipelineConfig) -> list[Path]:
    rules = load_engine_rules(config.engine_rules)
    matcher = LexiconMatcher(load_lexicons(config.lexicons))
    rows = []
    seen: set[str] = set()
    skipped = 0
    for line in config.posts_file.read_text("utf-8").splitlines():
        url = line.strip()
        if not url or url.startswith("#"):
            continue
        directive = extract_directive(url, rules)
        if directive is None:
            skipped += 1
            continue
        q = normalize_query(directive.raw_query)
        tags = matcher.tag(q.text)
        if q.text in seen:
            continue
        seen.add(q.text)
        rows.append(
            {
                "query_id": query_id(q.text),
                "source_url": directive.source_url,
                "engine": directive.engine,
                "raw_query": directive.raw_query,
                "text": q.text,
                "tokens": list(q.tokens),
                "truncated": q.truncated,
                "truncated_token_count": q.truncated_token_count,
                "char_count": q.char_count,
                "operators": dict(sorted(q.operator_set.counts.items())),
                "political": tags.political,
                "conspiracy": tags.conspiracy,
                "matched_terms": [list(m) for m in tags.matched_terms],
            }
        )
    out = config.artifact("queries.ndjson")
    write_ndjson(out, rows)
    write_json(
        config.artifact("ingest_summary.json"),
        {"queries": len(rows), "skipped_urls": skipped, "metadata": _metadata(config, _hash_many([config.posts_file]))},
    )
    return [out, config.artifact("ingest_summary.json")]


def _iso_plus(base: str, seconds: int) -> str:
    moment = _dt.datetime.fromisoformat(base.replace("Z", "+00:00")) + _dt.timedelta(seconds=seconds)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def stage_crawl(config: PipelineConfig) -> list[Path]:
    queries = [row["text"] for row in read_ndjson(config.artifact("queries.ndjson"))]
    plan = schedule_wave(
        queries,
        {
            "wave_id": config.wave_id,
            "cadence": config.cadence,
            "interval_seconds": config.interval_seconds,
            "steps": config.steps,
            "results_per_query": config.results_per_query,
            "politeness_delay_ms": config.politeness_delay_ms,
            "location_label": config.location_label,
        },
    )
    store = BlobStore(config.store_dir)
    if config.fixture_pages is not None:
        fetcher = FixtureFetcher(config.fixture_pages)
        sleep = lambda s: None  # recorded pages need no politeness
        clock = lambda task: _iso_plus(config.crawl_base_time, task.step_index * config.interval_seconds)
    else:
        fetcher = LiveFetcher()
        import time as _time

        sleep = _time.sleep
        clock = None
    for _ in run_crawl(plan, fetcher, store, sleep=sleep, clock=clock):
        pass
    plan_path = config.artifact("plan.json")
    write_json(plan_path, {**plan.to_dict(), "metadata": _metadata(config, _hash_many([config.artifact("queries.ndjson")]))})
    return [plan_path, store.manifest_path]


def stage_parse(config: PipelineConfig) -> list[Path]:
    store = BlobStore(config.store_dir)
    serps = []
    quarantined = []
    for record in store.read_manifest():
        if record.gap:
            continue
        html = store.get_blob(record.raw_html_ref)
        try:
            serp = parse_serp(
                html,
                query_text=record.query_text,
                fetched_at=record.fetched_at,
                wave_id=record.wave_id,
                step_index=record.step_index,
            )
        except UnparseableHtmlError as exc:
            quarantined.append(
                {
                    "wave_id": record.wave_id,
                    "step_index": record.step_index,
                    "query_text": record.query_text,
                    "raw_html_ref": record.raw_html_ref,
                    "diagnostic": str(exc),
                }
            )
            continue
        serps.append(serp.to_dict())
    out = config.artifact("serps.ndjson")
    write_ndjson(out, serps)
    qpath = config.artifact("quarantine.ndjson")
    write_ndjson(qpath, quarantined)
    return [out, qpath]


def stage_aggregate(config: PipelineConfig) -> list[Path]:
    quality = load_quality_scores(config.quality_csv)
    partisanship = load_partisanship_scores(config.partisanship_csv)
    seo = load_seo_metrics(config.seo_csv)
    news = load_news_domains(config.news_domains)
    rows = []
    for d in read_ndjson(config.artifact("serps.ndjson")):
        serp = SerpRecord.from_dict(d)
        rows.append(aggregate_serp(serp, quality, partisanship, seo, news).to_dict())
    out = config.artifact("aggregates.ndjson")
    write_ndjson(out, rows)
    return [out]


def _serp_records(config: PipelineConfig) -> list[SerpRecord]:
    return [SerpRecord.from_dict(d) for d in read_ndjson(config.artifact("serps.ndjson"))]


def stage_stability(config: PipelineConfig) -> list[Path]:
    records = _serp_records(config)
    depth = config.rbo_depth or None
    by_query: dict[str, list[SerpRecord]] = {}
    for record in records:
        by_query.setdefault(record.query_text, []).append(record)

    matrices = {}
    banner_counts = {}
    steps_seen: set[int] = set()
    for query, recs in sorted(by_query.items()):
        recs.sort(key=lambda r: r.step_index)
        steps_seen.update(r.step_index for r in recs)
        lists = [
            (r.step_index, RankedList(tuple(dict.fromkeys(res.url for res in r.results))))
            for r in recs
        ]
        banner_counts[query] = sum(1 for r in recs if r.banner.banner_type == BannerType.LOW_QUALITY)
        if len(lists) >= 2:
            matrices[query] = build_rbo_matrix(query, lists, depth)

    total_steps = max(steps_seen) + 1 if steps_seen else 0
    report = build_stability_report(
        matrices, banner_counts, total_steps=max(total_steps, 2), window_max=config.window_max, depth=depth
    )

    # banner-set Jaccard over observed steps
    ordered_steps = sorted(steps_seen)
    series = []
    for step in ordered_steps:
        series.append(
            {
                r.query_text
                for recs in by_query.values()
                for r in recs
                if r.step_index == step and r.banner.banner_type == BannerType.LOW_QUALITY
            }
        )
    jaccard_rows = []
    if len(series) >= 2:
        matrix = jaccard_matrix(series)
        for i, si in enumerate(ordered_steps):
            for j, sj in enumerate(ordered_steps):
                jaccard_rows.append({"step_a": si, "step_b": sj, "jaccard": matrix[i, j]})

    churn_block = None
    if len(ordered_steps) >= 2:
        first, last = ordered_steps[0], ordered_steps[-1]
        wave_a = {
            q: {res.url for r in recs if r.step_index == first for res in r.results}
            for q, recs in by_query.items()
            if any(r.step_index == first for r in recs) and any(r.step_index == last for r in recs)
        }
        wave_b = {
            q: {res.url for r in recs if r.step_index == last for res in r.results}
            for q, recs in by_query.items()
            if q in wave_a
        }
        if wave_a:
            try:
                churn = url_churn(wave_a, wave_b)
                churn_block = {
                    "first_step": first,
                    "last_step": last,
                    "mean": churn.mean,
                    "sd": churn.sd,
                    "skipped_empty": churn.skipped_empty,
                    "per_query": dict(sorted(churn.per_query.items())),
                }
            except ValueError:
                churn_block = None

    payload = report.to_dict()
    payload["churn"] = churn_block
    payload["metadata"].update(_metadata(config, _hash_many([config.artifact("serps.ndjson")])))
    out = config.artifact("stability.json")
    write_json(out, payload)
    jpath = config.artifact("jaccard.csv")
    _write_csv(jpath, ["step_a", "step_b", "jaccard"], jaccard_rows)
    mpath = config.artifact("rbo_matrices.csv")
    matrix_rows = []
    for query, matrix in sorted(matrices.items()):
        for i, si in enumerate(matrix.step_labels):
            for j, sj in enumerate(matrix.step_labels):
                matrix_rows.append(
                    {"query": query, "step_a": si, "step_b": sj, "rbo": matrix.values[i, j]}
                )
    _write_csv(mpath, ["query", "step_a", "step_b", "rbo"], matrix_rows)
    return [out, jpath, mpath]


def _write_csv(path: Path, header: list[str], rows: list[dict]) -> None:
    import csv as _csv

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def stage_explain(config: PipelineConfig) -> list[Path]:
    timelines = build_timelines(_serp_records(config))
    cutoffs = list(range(config.cutoff_min, config.cutoff_max + 1))
    entries = {}
    skipped = []
    for query, timeline in sorted(timelines.items()):
        tally = cooccurrence_tally(timeline)
        if not timeline.bannered or not timeline.unbannered:
            skipped.append(query)
            continue
        q3 = {}
        for c in cutoffs:
            q3[str(c)] = [
                {"pair": list(cond.url_pair), "positions": list(cond.positions)}
                for cond in sorted(
                    rank_cutoff_explanation(timeline, c), key=lambda cond: cond.url_pair
                )
            ]
        entries[query] = {
            "bannered_serps": len(timeline.bannered),
            "unbannered_serps": len(timeline.unbannered),
            "q1": sorted(single_url_explanation(timeline)),
            "q2": sorted(map(list, pair_explanation(timeline))),
            "q3": q3,
            "tally": {
                url: list(tally.for_url(url))
                for url in sorted(set(tally.banner_counts) | set(tally.no_banner_counts))
            },
        }
    out = config.artifact("explain.json")
    write_json(
        out,
        {
            "queries": entries,
            "skipped_no_variance": sorted(skipped),
            "cutoffs": cutoffs,
            "metadata": _metadata(config, _hash_many([config.artifact("serps.ndjson")])),
        },
    )
    return [out]


def _label_for(record: SerpRecord, target: str) -> bool:
    if target == "low_quality":
        return record.banner.banner_type == BannerType.LOW_QUALITY
    if target == "low_relevance":
        return record.banner.banner_type in RELEVANCE_TYPES
    raise ValueError(f"unknown logit target {target!r}")


def stage_logit(config: PipelineConfig) -> list[Path]:
    from .queries import OperatorSet, Query, TopicTags

    queries = {row["text"]: row for row in read_ndjson(config.artifact("queries.ndjson"))}
    aggregates = {
        (a["wave_id"], a["step_index"], a["query_text"]): SerpAggregate.from_dict(a)
        for a in read_ndjson(config.artifact("aggregates.ndjson"))
    }
    targets = (config.logit_target,) if config.logit_target else ("low_quality", "low_relevance")
    outputs = []
    for target in targets:
        include_op = target == "low_relevance"
        rows = []
        for record in _serp_records(config):
            meta = queries.get(record.query_text)
            agg = aggregates.get((record.wave_id, record.step_index, record.query_text))
            if meta is None or agg is None:
                continue
            q = Query(
                text=meta["text"],
                tokens=tuple(meta["tokens"]),
                truncated=meta["truncated"],
                truncated_token_count=meta["truncated_token_count"],
                char_count=meta["char_count"],
                operator_set=OperatorSet(counts=dict(meta["operators"])),
                topic_tags=TopicTags(political=meta["political"], conspiracy=meta["conspiracy"]),
            )
            rows.append((q, agg, _label_for(record, target)))
        X, y, names, dropped = assemble_dataset(rows, include_operator_flag=include_op)
        card: dict = {
            "target": target,
            "rows_used": int(len(y)),
            "rows_dropped_missing": dropped,
            "metadata": _metadata(
                config,
                _hash_many(
                    [
                        config.artifact("serps.ndjson"),
                        config.artifact("aggregates.ndjson"),
                        config.artifact("queries.ndjson"),
                    ]
                ),
            ),
        }
        try:
            model = fit_l1_logit(X, y, alpha=config.alpha, feature_names=names)
            card["model"] = model.to_dict()
        except SingleClassError as exc:
            card["skipped_single_class"] = str(exc)
        path = config.artifact(f"logit_{target}.json")
        write_json(path, card)
        outputs.append(path)
    return outputs


def stage_export_model_data(config: PipelineConfig) -> list[Path]:
    queries = {row["text"]: row for row in read_ndjson(config.artifact("queries.ndjson"))}
    per_query: dict[str, dict] = {}
    for record in _serp_records(config):
        meta = queries.get(record.query_text)
        if meta is None:
            continue
        entry = per_query.setdefault(
            record.query_text,
            {
                "query_id": meta["query_id"],
                "text": record.query_text,
                "label": False,
                "results": [],
            },
        )
        if record.banner.banner_type == BannerType.LOW_QUALITY:
            entry["label"] = True
        for result in record.results:
            if result.domain:
                entry["results"].append({"domain": result.domain, "title": result.title})
    out = config.artifact("model_data.ndjson")
    write_ndjson(out, [per_query[q] for q in sorted(per_query)])
    return [out]


def stage_import_model_preds(config: PipelineConfig) -> list[Path]:
    rows = read_confidence_csv(config.model_confidences)
    out = config.artifact("confidences.csv")
    _write_csv(out, ["query_id", "confidence"], [{"query_id": q, "confidence": c} for q, c in rows])
    return [out]


def stage_report(config: PipelineConfig) -> list[Path]:
    aggregates = {
        (a["wave_id"], a["step_index"], a["query_text"]): SerpAggregate.from_dict(a)
        for a in read_ndjson(config.artifact("aggregates.ndjson"))
    }
    confidences: dict[str, float] = {}
    conf_path = config.artifact("confidences.csv")
    if conf_path.exists():
        confidences = dict(read_confidence_csv(conf_path))
    id_by_text = {
        row["text"]: row["query_id"] for row in read_ndjson(config.artifact("queries.ndjson"))
    }

    labels = []
    for record in _serp_records(config):
        agg = aggregates.get((record.wave_id, record.step_index, record.query_text))
        qid = id_by_text.get(record.query_text, query_id(record.query_text))
        confidence = confidences.get(qid)
        labels.append(
            VoidLabel(
                query_id=qid,
                banner_type=record.banner.banner_type,
                by_quality=classify_void_by_quality(agg, config.quality_threshold)
                if agg is not None
                else None,
                by_model=classify_void_by_model(confidence, config.model_threshold)
                if confidence is not None
                else None,
                model_confidence=confidence,
            )
        )

    extrapolation = None
    if config.extrapolation_daily_searches > 0 and labels:
        interim = prevalence_report(labels, wave_id=config.wave_id)
        void_rate = interim.void_rate(config.extrapolation_definition)
        coverage = interim.coverage_of_voids(config.extrapolation_definition) or 0.0
        extrapolation = (config.extrapolation_daily_searches, void_rate, coverage)

    report = prevalence_report(labels, extrapolation=extrapolation, wave_id=config.wave_id)
    payload = report.to_dict()
    payload["metadata"] = _metadata(
        config,
        _hash_many([config.artifact("serps.ndjson"), config.artifact("aggregates.ndjson")]),
    )
    out = config.artifact("report.json")
    write_json(out, payload)
    table = config.artifact("report.txt")
    table.write_text(report.render_table() + "\n", encoding="utf-8")
    return [out, table]


# --- orchestration ----------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    name: str
    fn: Callable[[PipelineConfig], list[Path]]
    inputs: Callable[[PipelineConfig], list[Path]]


def _stages() -> dict[str, Stage]:
    return {
        s.name: s
        for s in (
            Stage("ingest", stage_ingest, lambda c: [c.posts_file]),
            Stage("crawl", stage_crawl, lambda c: [c.artifact("queries.ndjson")]),
            Stage("parse", stage_parse, lambda c: [c.store_dir / "manifest.ndjson"]),
            Stage(
                "aggregate",
                stage_aggregate,
                lambda c: [c.artifact("serps.ndjson"), c.quality_csv, c.partisanship_csv, c.seo_csv, c.news_domains],
            ),
            Stage("stability", stage_stability, lambda c: [c.artifact("serps.ndjson")]),
            Stage("explain", stage_explain, lambda c: [c.artifact("serps.ndjson")]),
            Stage(
                "logit",
                stage_logit,
                lambda c: [c.artifact("serps.ndjson"), c.artifact("aggregates.ndjson"), c.artifact("queries.ndjson")],
            ),
            Stage(
                "export-model-data",
                stage_export_model_data,
                lambda c: [c.artifact("serps.ndjson"), c.artifact("queries.ndjson")],
            ),
            Stage(
                "import-model-preds",
                stage_import_model_preds,
                lambda c: [c.model_confidences] if c.model_confidences else [],
            ),
            Stage(
                "report",
                stage_report,
                lambda c: [c.artifact("serps.ndjson"), c.artifact("aggregates.ndjson"), c.artifact("queries.ndjson")],
            ),
        )
    }


def _meta_path(config: PipelineConfig, stage: str) -> Path:
    return config.out_dir / "_meta" / f"{stage.replace('-', '_')}.json"


def _relkey(path: Path, config: PipelineConfig) -> str:
    # keys are workdir-relative (or basenames for external inputs) so that
    # the same corpus run in two locations produces byte-identical sidecars
    try:
        return path.resolve().relative_to(config.workdir.resolve()).as_posix()
    except ValueError:
        return path.name


def _hash_keyed(paths: list[Path], config: PipelineConfig) -> dict[str, str]:
    return {_relkey(p, config): sha256_file(p) for p in paths if p is not None and p.exists()}


def _stage_is_fresh(config: PipelineConfig, stage: Stage) -> bool:
    meta_path = _meta_path(config, stage.name)
    if not meta_path.exists():
        return False
    meta = read_json(meta_path)
    if meta.get("config_hash") != config.config_hash:
        return False
    if meta.get("inputs") != _hash_keyed(stage.inputs(config), config):
        return False
    for relkey, digest in meta.get("outputs", {}).items():
        path = config.workdir / relkey
        if not path.exists() or sha256_file(path) != digest:
            return False
    return True


def run_pipeline(config: PipelineConfig, stages: Optional[list[str]] = None) -> dict[str, str]:
    """Run the requested stages in canonical order.

    Returns {stage: "ran" | "skipped"}. All validation problems (bad config
    values, missing inputs, missing upstream artifacts) are raised before
    any stage starts.
    """
    registry = _stages()
    requested = list(stages) if stages else [s for s in STAGE_ORDER if s != "import-model-preds"]
    unknown = [s for s in requested if s not in registry]
    if unknown:
        raise ConfigError(f"unknown stages: {unknown}")
    ordered = [s for s in STAGE_ORDER if s in requested]
    if config.model_confidences is not None and "report" in ordered and "import-model-preds" not in ordered:
        ordered.insert(ordered.index("report"), "import-model-preds")

    config.validate(ordered)
    # dependency check: every input must exist already or be produced earlier
    produced: set[str] = set()
    missing: list[str] = []
    for name in ordered:
        for path in registry[name].inputs(config):
            if path is None:
                continue
            if str(path) in produced:
                continue
            if not path.exists() and not _will_produce(path, ordered[: ordered.index(name)], config):
                missing.append(f"{name}: requires {path}")
        for artifact in _expected_outputs(name, config):
            produced.add(str(artifact))
    if missing:
        raise MissingDependencyError("; ".join(missing))

    results = {}
    for name in ordered:
        stage = registry[name]
        if _stage_is_fresh(config, stage):
            results[name] = "skipped"
            continue
        config.out_dir.mkdir(parents=True, exist_ok=True)
        outputs = stage.fn(config)
        write_json(
            _meta_path(config, name),
            {
                "stage": name,
                "toolkit_version": __version__,
                "seed": config.seed,
                "config_hash": config.config_hash,
                "inputs": _hash_keyed(stage.inputs(config), config),
                "outputs": _hash_keyed(outputs, config),
            },
        )
        results[name] = "ran"
    return results


def _expected_outputs(stage: str, config: PipelineConfig) -> list[Path]:
    mapping = {
        "ingest": [config.artifact("queries.ndjson")],
        "crawl": [config.store_dir / "manifest.ndjson"],
        "parse": [config.artifact("serps.ndjson")],
        "aggregate": [config.artifact("aggregates.ndjson")],
        "stability": [config.artifact("stability.json")],
        "explain": [config.artifact("explain.json")],
        "logit": [
            config.artifact(f"logit_{config.logit_target}.json")
            if config.logit_target
            else config.artifact("logit_low_quality.json")
        ],
        "export-model-data": [config.artifact("model_data.ndjson")],
        "import-model-preds": [config.artifact("confidences.csv")],
        "report": [config.artifact("report.json")],
    }
    return mapping[stage]


def _will_produce(path: Path, earlier: list[str], config: PipelineConfig) -> bool:
    for name in earlier:
        if str(path) in {str(p) for p in _expected_outputs(name, config)}:
            return True
    return False

import json
import shutil
from pathlib import Path

import pytest

from voidscope.ioutil import read_ndjson, sha256_file
from voidscope.pipeline import (
    ConfigError,
    MissingDependencyError,
    load_config,
    query_id,
    run_pipeline,
)

CORPUS = Path(__file__).parent / "fixtures" / "corpus"
GOLDEN = CORPUS / "golden"


def run_all(workdir: Path) -> dict:
    config = load_config(CORPUS / "config.txt", {"workdir": str(workdir)})
    return run_pipeline(config)


def tree_digest(root: Path) -> dict[str, str]:
    return {
        p.relative_to(root).as_posix(): sha256_file(p)
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestEndToEnd:
    def test_two_runs_byte_identical_and_match_golden(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        assert set(run_all(first).values()) == {"ran"}
        assert set(run_all(second).values()) == {"ran"}
        assert tree_digest(first) == tree_digest(second)
        assert (first / "report.json").read_bytes() == (GOLDEN / "report.json").read_bytes()
        assert (first / "report.txt").read_bytes() == (GOLDEN / "report.txt").read_bytes()

    def test_rerun_is_noop_with_identical_hashes(self, tmp_path):
        workdir = tmp_path / "w"
        run_all(workdir)
        before = tree_digest(workdir)
        statuses = run_all(workdir)
        assert set(statuses.values()) == {"skipped"}
        assert tree_digest(workdir) == before

    def test_stage_reruns_when_inputs_change(self, tmp_path):
        workdir = tmp_path / "w"
        run_all(workdir)
        serps = workdir / "serps.ndjson"
        rows = [json.loads(line) for line in serps.read_text().splitlines()]
        serps.write_text("\n".join(json.dumps(r, sort_keys=True, separators=(",", ":")) for r in rows[:-1]) + "\n")
        config = load_config(CORPUS / "config.txt", {"workdir": str(workdir)})
        statuses = run_pipeline(config, ["aggregate"])
        assert statuses["aggregate"] == "ran"


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    path = tmp_path_factory.mktemp("pipeline")
    run_all(path)
    return path


class TestArtifacts:
    def test_gap_recorded_not_parsed(self, workdir):
        manifest = [json.loads(line) for line in (workdir / "store" / "manifest.ndjson").read_text().splitlines()]
        gaps = [m for m in manifest if m["gap"]]
        assert len(gaps) == 1
        assert gaps[0]["query_text"] == "weather tomorrow forecast"
        assert gaps[0]["step_index"] == 2
        assert gaps[0]["raw_html_ref"] == ""

    def test_quarantine_diagnostic(self, workdir):
        rows = list(read_ndjson(workdir / "quarantine.ndjson"))
        assert len(rows) == 1
        assert rows[0]["query_text"] == "trump biden debate highlights"
        assert rows[0]["step_index"] == 4
        assert "landmark" in rows[0]["diagnostic"]

    def test_ingest_skips_non_directives(self, workdir):
        summary = json.loads((workdir / "ingest_summary.json").read_text())
        assert summary["queries"] == 10
        assert summary["skipped_urls"] == 3  # homepage, blank query, unknown engine

    def test_explain_finds_planted_trigger(self, workdir):
        explain = json.loads((workdir / "explain.json").read_text())
        assert explain["queries"]["mrna prions"]["q1"] == ["https://newstarget.com/prion-risks-report"]
        assert "vril lizards droning process" in explain["skipped_no_variance"]

    def test_stability_groups_and_monotone_windows(self, workdir):
        stability = json.loads((workdir / "stability.json").read_text())
        assert stability["groups"]["vril lizards droning process"] == "5"
        assert stability["groups"]["mrna prions"] == "4-4"
        corpus = [stability["corpus"][str(k)] for k in (1, 2, 3)]
        assert corpus[0] >= corpus[1] >= corpus[2]
        assert "normalization" in stability["metadata"]

    def test_confidence_round_trip_preserves_order(self, workdir):
        source = (CORPUS / "confidences.csv").read_text().strip().splitlines()[1:]
        copied = (workdir / "confidences.csv").read_text().strip().splitlines()[1:]
        assert [row.split(",")[0] for row in copied] == [row.split(",")[0] for row in source]

    def test_report_consistency(self, workdir):
        report = json.loads((workdir / "report.json").read_text())
        assert report["total"] == 48
        assert report["banner_counts"]["low_quality"] == 9
        # operator-bearing query never carries a low-quality banner
        serps = list(read_ndjson(workdir / "serps.ndjson"))
        for row in serps:
            if "site:" in row["query_text"]:
                assert row["banner"]["banner_type"] != "low_quality"
        # rates derive exactly from counts
        assert report["void_rates"]["quality"] == report["void_counts"]["quality"] / report["total"]

    def test_model_data_export_covers_queries_with_labels(self, workdir):
        rows = list(read_ndjson(workdir / "model_data.ndjson"))
        by_text = {r["text"]: r for r in rows}
        assert by_text["mrna prions"]["label"] is True
        assert by_text["weather tomorrow forecast"]["label"] is False
        assert all(r["query_id"] == query_id(r["text"]) for r in rows)
        assert all("domain" in item and "title" in item for r in rows for item in r["results"])

    def test_provenance_metadata_embedded(self, workdir):
        report = json.loads((workdir / "report.json").read_text())
        meta = report["metadata"]
        assert meta["toolkit_version"]
        assert meta["seed"] == 7
        assert meta["config_hash"]
        assert "serps.ndjson" in meta["inputs"]


class TestValidation:
    def test_parse_without_store_is_missing_dependency(self, tmp_path):
        config = load_config(CORPUS / "config.txt", {"workdir": str(tmp_path / "empty")})
        with pytest.raises(MissingDependencyError):
            run_pipeline(config, ["parse"])

    def test_unknown_stage_rejected(self, tmp_path):
        config = load_config(CORPUS / "config.txt", {"workdir": str(tmp_path)})
        with pytest.raises(ConfigError):
            run_pipeline(config, ["shimmer"])

    def test_unknown_config_key_rejected(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("posts_file = posts.txt\nwhatever = 3\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_missing_input_file_reported_before_work(self, tmp_path):
        bad = tmp_path / "cfg.txt"
        bad.write_text("posts_file = nope.txt\nworkdir = out\n")
        config = load_config(bad)
        with pytest.raises(ConfigError):
            run_pipeline(config, ["ingest"])


class TestCli:
    def test_stage_subcommand_and_override(self, tmp_path):
        from voidscope.cli import main

        workdir = tmp_path / "cli"
        assert main(["run", "--config", str(CORPUS / "config.txt"), "--workdir", str(workdir)]) == 0
        # widen the window: stability must rerun and report more window sizes
        assert (
            main(
                [
                    "stability",
                    "--config",
                    str(CORPUS / "config.txt"),
                    "--workdir",
                    str(workdir),
                    "--window-max",
                    "4",
                ]
            )
            == 0
        )
        stability = json.loads((workdir / "stability.json").read_text())
        assert stability["window_sizes"] == [1, 2, 3, 4]

    def test_logit_target_narrows_stage(self, tmp_path):
        from voidscope.cli import main

        workdir = tmp_path / "narrow"
        config_args = ["--config", str(CORPUS / "config.txt"), "--workdir", str(workdir)]
        assert main(["run", *config_args, "--stages", "ingest,crawl,parse,aggregate"]) == 0
        assert main(["logit", *config_args, "--target", "low_relevance"]) == 0
        assert (workdir / "logit_low_relevance.json").exists()
        assert not (workdir / "logit_low_quality.json").exists()

    def test_standalone_plan_crawl(self, tmp_path):
        from voidscope.cli import main

        plan = {
            "wave_id": "solo",
            "queries": ["mrna prions"],
            "cadence": {"kind": "single_pass"},
            "results_per_query": 10,
            "politeness_delay_ms": 0,
        }
        plan_path = tmp_path / "plan.json"
        plan_path.write_text(json.dumps(plan))
        out = tmp_path / "store"
        code = main(
            [
                "crawl",
                "--plan",
                str(plan_path),
                "--out",
                str(out),
                "--pages",
                str(CORPUS / "pages"),
                "--delay-ms",
                "0",
            ]
        )
        assert code == 0
        assert (out / "manifest.ndjson").exists()

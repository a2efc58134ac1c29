"""End-to-end file contract: audit-toolkit export -> train -> confidence CSV
-> audit-toolkit import."""

import json
from pathlib import Path

from voidscope_models.cli import main

CORPUS = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "corpus"


def export_model_data(tmp_path: Path) -> Path:
    from voidscope.pipeline import load_config, run_pipeline

    workdir = tmp_path / "audit"
    config = load_config(CORPUS / "config.txt", {"workdir": str(workdir)})
    run_pipeline(config, ["ingest", "crawl", "parse", "export-model-data"])
    return workdir / "model_data.ndjson"


def test_train_on_exported_data_and_import_back(tmp_path):
    data = export_model_data(tmp_path)
    out = tmp_path / "models-out"
    code = main(
        [
            "train",
            "--data",
            str(data),
            "--variant",
            "hom",
            "--runs",
            "2",
            "--epochs",
            "30",
            "--hidden",
            "16",
            "--seed",
            "3",
            "--embedder",
            "hashing:16",
            "--quality-csv",
            str(CORPUS / "quality.csv"),
            "--k-list",
            "5,10",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    card = json.loads((out / "card.json").read_text())
    assert card["variant"] == "gnn_hom"
    assert card["runs"] == 2
    assert (out / "confidences.csv").exists()
    assert (out / "quality_curve.csv").exists()

    # feed the confidences back through the audit toolkit's import stage
    from voidscope.pipeline import load_config, run_pipeline

    workdir = tmp_path / "audit"
    config = load_config(
        CORPUS / "config.txt",
        {"workdir": str(workdir), "model_confidences": str(out / "confidences.csv")},
    )
    statuses = run_pipeline(config, ["aggregate", "import-model-preds", "report"])
    assert statuses["report"] == "ran"
    report = json.loads((workdir / "report.json").read_text())
    assert report["defined_counts"]["model"] > 0


def test_text_variant_cli(tmp_path):
    data = export_model_data(tmp_path)
    out = tmp_path / "text-out"
    code = main(
        ["train", "--data", str(data), "--variant", "text", "--epochs", "2", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    card = json.loads((out / "card.json").read_text())
    assert card["variant"] == "text_only"
    assert card["parameter_count"] > 0

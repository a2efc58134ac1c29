import numpy as np
import pytest

from test_gnn import planted_graph
from voidscope_models.evaluate import (
    evaluate_predictions,
    rolling_mean,
    write_confidence_csv,
)
from voidscope_models.gnn import TrainConfig, train_gnn


@pytest.fixture(scope="module")
def trained():
    graph = planted_graph(80, positive_every=8)
    result = train_gnn(graph, "hom", TrainConfig(epochs=40, runs=1, hidden=16, seed=4))
    return graph, result


class TestRollingMean:
    def test_constant_series_stays_constant(self):
        curve = rolling_mean([0.6] * 25, window=10)
        assert len(curve) == 16
        assert np.allclose(curve, 0.6)

    def test_window_of_known_values(self):
        curve = rolling_mean([0, 1, 2, 3, 4], window=3)
        assert np.allclose(curve, [1.0, 2.0, 3.0])

    def test_short_series_empty(self):
        assert len(rolling_mean([1.0, 2.0], window=10)) == 0


class TestEvaluate:
    def test_bundle_shapes_and_ordering(self, trained):
        graph, result = trained
        quality = {qid: 0.5 for qid in graph.query_ids}
        bundle = evaluate_predictions(result, graph.query_ids, quality, k_list=(5, 10))
        confidences = [c for _, c in bundle.ranked_predictions]
        assert confidences == sorted(confidences, reverse=True)
        labeled = set(result.labeled_indices.tolist())
        ranked_ids = {qid for qid, _ in bundle.ranked_predictions}
        assert ranked_ids.isdisjoint({graph.query_ids[i] for i in labeled})
        assert set(bundle.holdout_metrics) == {"accuracy", "f1", "precision", "recall"}

    def test_hit_count_when_new_set_equals_top_k(self, trained):
        graph, result = trained
        quality = {qid: 0.5 for qid in graph.query_ids}
        probe = evaluate_predictions(result, graph.query_ids, quality, k_list=(3,))
        top3 = {qid for qid, _ in probe.ranked_predictions[:3]}
        bundle = evaluate_predictions(
            result, graph.query_ids, quality, k_list=(3, 50), new_banner_ids=top3
        )
        assert bundle.top_k_hits[3] == min(3, len(top3))
        assert bundle.top_k_hits[50] == len(top3 & {q for q, _ in bundle.ranked_predictions[:50]})

    def test_missing_quality_join_errors(self, trained):
        graph, result = trained
        with pytest.raises(ValueError):
            evaluate_predictions(result, graph.query_ids, {"not-a-query": 0.4})

    def test_random_confidences_give_flat_curve(self):
        # Monte-Carlo baseline: ranking by coin-flip confidence leaves the
        # rolling quality mean near the corpus mean
        rng = np.random.default_rng(0)
        quality = {f"q{i}": float(rng.uniform(0.2, 0.8)) for i in range(400)}
        ranked = sorted(quality, key=lambda _: rng.random())
        values = [quality[q] for q in ranked[:200]]
        curve = rolling_mean(values, window=10)
        corpus_mean = np.mean(list(quality.values()))
        assert abs(curve.mean() - corpus_mean) < 0.05


class TestConfidenceCsv:
    def test_write_and_python_float_round_trip(self, tmp_path):
        path = tmp_path / "conf.csv"
        ranked = [("qa", 0.123456789012345), ("qb", 1.0 / 3.0), ("qc", 0.0)]
        write_confidence_csv(path, ranked)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "query_id,confidence"
        parsed = [(row.split(",")[0], float(row.split(",")[1])) for row in lines[1:]]
        assert parsed == ranked

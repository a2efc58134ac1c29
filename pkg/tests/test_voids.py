import pytest

from voidscope.banners import BannerType
from voidscope.metrics import SerpAggregate
from voidscope.voids import (
    Extrapolation,
    VoidLabel,
    classify_void_by_model,
    classify_void_by_quality,
    make_void_label,
    prevalence_report,
    read_confidence_csv,
)


def agg_with_quality(value):
    return SerpAggregate(
        wave_id="w", step_index=0, query_text="q",
        avg_domain_quality=value, rank_weighted_partisanship=None,
        news_domain_count=0, unique_domain_count=0, unreliable_domain_count=0,
        avg_domain_traffic_log10=None, estimated_total_results_log10=None,
    )


class TestQualityDefinition:
    def test_boundary_is_inclusive(self):
        assert classify_void_by_quality(agg_with_quality(0.5)) is True
        assert classify_void_by_quality(agg_with_quality(0.5 + 1e-9)) is False
        assert classify_void_by_quality(agg_with_quality(0.51)) is False

    def test_absent_when_unscored(self):
        assert classify_void_by_quality(agg_with_quality(None)) is None

    def test_comparator_configurable(self):
        assert classify_void_by_quality(agg_with_quality(0.5), inclusive=False) is False

    def test_accepts_bare_value(self):
        assert classify_void_by_quality(0.3) is True


class TestModelDefinition:
    def test_boundary(self):
        assert classify_void_by_model(0.90) is True
        assert classify_void_by_model(0.899) is False
        assert classify_void_by_model(1.0) is True

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            classify_void_by_model(1.2)
        with pytest.raises(ValueError):
            classify_void_by_model(-0.1)


class TestExtrapolation:
    def test_headline_arithmetic(self):
        extra = Extrapolation(daily_searches=5e9, void_rate=0.0077, banner_rate=0.003)
        assert extra.daily_voids == pytest.approx(38.5e6)
        assert extra.daily_bannered_voids == pytest.approx(115.5e3)


def label(banner=BannerType.NONE, quality=None, model=None):
    return VoidLabel("q", banner, by_quality=quality, by_model=model)


class TestPrevalenceReport:
    def test_simple_rates(self):
        labels = [label(BannerType.LOW_QUALITY)] * 100 + [label()] * 9900
        report = prevalence_report(labels)
        assert report.total == 10_000
        assert report.banner_rate(BannerType.LOW_QUALITY) == pytest.approx(0.01)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            prevalence_report([])

    def test_coverage_ratio_identity(self):
        labels = (
            [label(BannerType.LOW_QUALITY, quality=True)] * 3
            + [label(BannerType.LOW_QUALITY, quality=False)] * 2
            + [label(BannerType.NONE, quality=True)] * 7
            + [label(BannerType.NONE, quality=False)] * 88
        )
        report = prevalence_report(labels)
        voids = report.void_counts["quality"]
        # (bannered ∧ void)/void × void == bannered ∧ void, exactly
        assert report.coverage_of_voids("quality") * voids == report.bannered_and_void["quality"]
        assert report.bannered_and_void["quality"] == 3
        assert report.coverage_of_banners("quality") == pytest.approx(3 / 5)

    def test_rates_recompute_from_counts(self):
        labels = [label(BannerType.LOW_QUALITY, quality=True, model=True)] * 4 + [label()] * 96
        report = prevalence_report(labels)
        d = report.to_dict()
        for definition in ("banner", "quality", "model"):
            assert d["void_rates"][definition] == report.void_counts[definition] / report.total

    def test_undefined_labels_tracked(self):
        labels = [label(quality=True), label(quality=None), label(model=0.95 >= 0.9)]
        report = prevalence_report(labels)
        assert report.defined_counts["quality"] == 1
        assert report.defined_counts["model"] == 1
        assert report.defined_counts["banner"] == 3

    def test_extrapolation_block(self):
        report = prevalence_report([label()], extrapolation=(5e9, 0.0077, 0.003))
        block = report.to_dict()["extrapolation"]
        assert block["daily_voids"] == pytest.approx(38.5e6)
        assert block["daily_bannered_voids"] == pytest.approx(115.5e3)

    def test_render_table_percentages(self):
        labels = (
            [label(BannerType.LOW_QUALITY)] * 301
            + [label(BannerType.LOW_RELEVANCE_MANY)] * 14_062
            + [label(BannerType.LOW_RELEVANCE_ANY)] * 59
            + [label(BannerType.RAPIDLY_CHANGING)] * 2
            + [label()] * 1_423_474
        )
        report = prevalence_report(labels)
        table = report.render_table()
        assert "1,437,898" in table.replace(" ", ",")
        assert "(1.0031%)" in table          # any banner
        assert "(0.9821%)" in table          # low-relevance all
        assert "(0.0209%)" in table          # low-quality: 301/1,437,898 at 4dp
        assert "(98.9969%)" in table         # no banner


class TestMakeLabel:
    def test_end_to_end(self):
        made = make_void_label("q", BannerType.LOW_QUALITY, agg_with_quality(0.4), model_confidence=0.95)
        assert made.by_banner and made.by_quality and made.by_model

    def test_absent_inputs_leave_none(self):
        made = make_void_label("q", BannerType.NONE)
        assert made.by_quality is None and made.by_model is None


class TestconfidenceCsv:
    def test_round_trip_order_preserved(self, tmp_path):
        path = tmp_path / "conf.csv"
        path.write_text("query_id,confidence\nq2,0.95\nq1,0.20\nq3,0.90\n")
        rows = read_confidence_csv(path)
        assert rows == [("q2", 0.95), ("q1", 0.20), ("q3", 0.90)]

    def test_bad_values_rejected(self, tmp_path):
        path = tmp_path / "conf.csv"
        path.write_text("query_id,confidence\nq1,1.5\n")
        with pytest.raises(ValueError):
            read_confidence_csv(path)
        path.write_text("foo,bar\nx,y\n")
        with pytest.raises(ValueError):
            read_confidence_csv(path)

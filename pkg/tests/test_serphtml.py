import random
import time
from pathlib import Path

import pytest

from serpgen import BANNER_TEXTS, make_serp_html
from voidscope.banners import BannerType, classify_banner
from voidscope.serphtml import (
    ResultType,
    SerpRecord,
    UnparseableHtmlError,
    parse_result_count,
    parse_serp,
)

FIXTURES = Path(__file__).parent / "fixtures" / "banners"


def corpus_pages():
    pages = sorted(FIXTURES.glob("*.html"))
    assert pages, "banner fixture corpus missing"
    return [(p, p.stem.split("__")[0]) for p in pages]


class TestBannerClassification:
    def test_corpus_classifies_perfectly(self):
        for path, expected in corpus_pages():
            record = parse_serp(path.read_text())
            assert record.banner.banner_type.value == expected, path.name

    def test_corpus_covers_all_five_banner_types(self):
        seen = {expected for _, expected in corpus_pages()}
        assert seen >= {t.value for t in BannerType if t not in (BannerType.NONE, BannerType.OTHER)}
        assert "none" in seen

    def test_classification_is_fast(self):
        pages = [(p.read_text(), e) for p, e in corpus_pages()]
        start = time.perf_counter()
        for html, expected in pages:
            assert parse_serp(html).banner.banner_type.value == expected
        assert time.perf_counter() - start < 1.0

    def test_exact_phrasings(self):
        assert classify_banner(BANNER_TEXTS["low_quality"]) is BannerType.LOW_QUALITY
        assert classify_banner(BANNER_TEXTS["rapidly_changing"]) is BannerType.RAPIDLY_CHANGING
        assert classify_banner("Your search did not match any documents") is BannerType.LOW_RELEVANCE_NO_MATCHES
        assert classify_banner("") is BannerType.NONE

    def test_many_vs_any_distinguished(self):
        assert classify_banner(BANNER_TEXTS["low_relevance_many"]) is BannerType.LOW_RELEVANCE_MANY
        assert classify_banner(BANNER_TEXTS["low_relevance_any"]) is BannerType.LOW_RELEVANCE_ANY

    def test_unknown_text_is_other_not_crash(self):
        assert classify_banner("Something new appeared here") is BannerType.OTHER


class TestParsing:
    def test_ten_results_ranked_in_order(self):
        html = make_serp_html(results=[(f"https://s{i}.com/p", f"T{i}") for i in range(10)])
        record = parse_serp(html)
        assert [r.rank for r in record.results] == list(range(1, 11))
        assert [r.title for r in record.results] == [f"T{i}" for i in range(10)]

    def test_rank_monotonic_on_all_fixtures(self):
        for path, _ in corpus_pages():
            ranks = [r.rank for r in parse_serp(path.read_text()).results]
            assert ranks == sorted(ranks)
            assert len(set(ranks)) == len(ranks)

    def test_domains_extracted(self):
        record = parse_serp(make_serp_html(results=[("https://www.cnn.com/politics", "x")]))
        assert record.results[0].domain == "cnn.com"

    def test_result_types(self):
        html = make_serp_html(
            results=[
                ("https://a.com/1", "A", "organic"),
                ("https://b.com/2", "B", "news"),
                ("https://c.com/3", "C", "ad"),
                ("https://d.com/4", "D", "mystery"),
            ]
        )
        record = parse_serp(html)
        assert [r.result_type for r in record.results] == [
            ResultType.ORGANIC,
            ResultType.NEWS,
            ResultType.AD,
            ResultType.OTHER,
        ]
        assert [r.url for r in record.organic_results()] == [
            "https://a.com/1",
            "https://b.com/2",
            "https://d.com/4",
        ]

    def test_unparseable_html_quarantined_not_dropped(self):
        with pytest.raises(UnparseableHtmlError):
            parse_serp("<html><body><p>captcha wall</p></body></html>")

    def test_parser_totality_over_corpus(self):
        # every page either parses or raises the quarantine error; nothing else escapes
        for path, _ in corpus_pages():
            try:
                record = parse_serp(path.read_text())
                assert isinstance(record, SerpRecord)
            except UnparseableHtmlError:
                pass

    def test_truncation_notice_flag(self):
        assert parse_serp(make_serp_html(results=[("https://a.com", "t")], truncation_notice=True)).truncation_notice
        assert not parse_serp(make_serp_html(results=[("https://a.com", "t")])).truncation_notice

    def test_metadata_passthrough(self):
        record = parse_serp(
            make_serp_html(results=[("https://a.com", "t")]),
            query_text="q",
            fetched_at="T0",
            wave_id="w",
            step_index=3,
        )
        assert (record.query_text, record.fetched_at, record.wave_id, record.step_index) == ("q", "T0", "w", 3)

    def test_round_trip_serialization(self):
        record = parse_serp(make_serp_html(results=[("https://a.com/x", "t")], stats_text="About 12 results"))
        assert SerpRecord.from_dict(record.to_dict()) == record


class TestResultCount:
    def test_separator_variants(self):
        assert parse_result_count("About 4,600,000 results") == 4_600_000
        assert parse_result_count("About 4.600.000 results") == 4_600_000
        assert parse_result_count("About 4 600 000 results") == 4_600_000
        assert parse_result_count("About 1,230,000 results (0.42 seconds)") == 1_230_000
        assert parse_result_count("7 results") == 7
        assert parse_result_count("About 1 result") == 1

    def test_absent_when_missing(self):
        assert parse_result_count("") is None
        record = parse_serp(make_serp_html(results=[("https://a.com", "t")]))
        assert record.estimated_total_results is None

    def test_locale_oracle_on_random_counts(self):
        # oracle: format a known integer with each separator, then re-parse
        rng = random.Random(3)
        for _ in range(500):
            n = rng.randrange(0, 10**rng.randint(1, 12))
            sep = rng.choice([",", ".", " ", " ", " "])
            grouped = f"{n:,}".replace(",", sep)
            text = rng.choice([f"About {grouped} results", f"{grouped} results (0.3 seconds)"])
            assert parse_result_count(text) == n, text

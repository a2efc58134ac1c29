"""Regenerate the bundled end-to-end fixture corpus.

Layout under tests/fixtures/corpus/:
    posts.txt           shared-post URLs (input to ingest)
    quality.csv         domain quality scores
    partisanship.csv    domain partisanship scores
    seo.csv             domain SEO metrics
    news.txt            news-domain list
    confidences.csv     hand-built model confidences (query_id, confidence)
    config.txt          pipeline configuration
    pages/step<k>/      recorded SERP pages served by the fixture fetcher

Five collection steps; one page is deliberately missing (crawl gap) and one
is deliberately structureless (parse quarantine).
"""

import hashlib
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from serpgen import BANNER_TEXTS, make_serp_html  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus"
STEPS = 5


def qid(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def slug(query: str) -> str:
    safe = "".join(ch if ch.isalnum() else "-" for ch in query.lower())
    return safe.strip("-")[:80] or "empty"


QUALITY = {
    "naturalnews.com": 0.0,
    "newstarget.com": 0.05,
    "infowars.com": 0.05,
    "mercola.com": 0.10,
    "zerohedge.com": 0.15,
    "breitbart.com": 0.20,
    "youtube.com": 0.375,
    "dupsite.com": 0.5,
    "foxnews.com": 0.60,
    "cnn.com": 0.75,
    "bbc.co.uk": 0.88,
    "nytimes.com": 0.90,
    "reuters.com": 0.95,
    "wikipedia.org": 0.95,
}

PARTISANSHIP = {
    "naturalnews.com": 0.7,
    "newstarget.com": 0.8,
    "infowars.com": 0.9,
    "mercola.com": 0.65,
    "zerohedge.com": 0.85,
    "breitbart.com": 0.95,
    "youtube.com": 0.05,
    "dupsite.com": 0.0,
    "foxnews.com": 0.8,
    "cnn.com": -0.4,
    "bbc.co.uk": -0.1,
    "nytimes.com": -0.3,
    "reuters.com": 0.0,
    "wikipedia.org": -0.05,
}

TRAFFIC = {
    "naturalnews.com": 1.0e6,
    "newstarget.com": 4.0e5,
    "infowars.com": 2.0e6,
    "mercola.com": 5.0e5,
    "zerohedge.com": 3.0e6,
    "breitbart.com": 8.0e6,
    "youtube.com": 1.0e10,
    "dupsite.com": 1.0e4,
    "foxnews.com": 6.0e8,
    "cnn.com": 1.0e9,
    "bbc.co.uk": 9.0e8,
    "nytimes.com": 8.0e8,
    "reuters.com": 7.0e8,
    "wikipedia.org": 5.0e9,
}

NEWS = ["cnn.com", "nytimes.com", "bbc.co.uk", "foxnews.com", "reuters.com", "breitbart.com"]

TRIGGER = "https://newstarget.com/prion-risks-report"

# per query: list of (posted url, per-step (banner_key, results, est_count))
QUERIES: dict[str, dict] = {
    "mrna prions": {
        "post": "https://google.com/search?q=mrna+prions",
        "est": 1400,
        "steps": {
            step: (
                ("low_quality" if step != 2 else ""),
                (
                    [
                        (TRIGGER, "COVID RNA Vaccines and Prion Disease Risk"),
                        ("https://naturalnews.com/mrna-prions", "MRNA shots linked to prions"),
                        ("https://zerohedge.com/prion-theory", "The prion theory nobody covers"),
                        (f"https://youtube.com/watch?v=prion{step}", "Prion discussion video", "video"),
                    ]
                    if step != 2
                    else [
                        ("https://naturalnews.com/mrna-prions", "MRNA shots linked to prions"),
                        ("https://zerohedge.com/prion-theory", "The prion theory nobody covers"),
                        ("https://wikipedia.org/wiki/Prion", "Prion - Wikipedia"),
                        ("https://reuters.com/fact-check-prions", "Fact check: mRNA prion claims"),
                    ]
                ),
            )
            for step in range(STEPS)
        },
    },
    "vril lizards droning process": {
        "post": "https://duckduckgo.com/?q=vril%20lizards%20droning%20process",
        "est": 120,
        "steps": {
            step: (
                "low_quality",
                [
                    ("https://naturalnews.com/vril-lizards", "Vril lizards exposed"),
                    ("https://infowars.com/vril-droning", "The droning process explained"),
                    ("https://mercola.com/vril-parasites", "Parasite takeover claims"),
                ][(step % 2):] + ([("https://zerohedge.com/vril", "Vril files")] if step % 2 else []),
            )
            for step in range(STEPS)
        },
    },
    "9/11 inside job proof": {
        "post": "https://google.com/search?q=9%2F11+inside+job+proof",
        "est": 90000,
        "steps": {
            step: (
                "",
                [
                    ("https://infowars.com/911-proof", "Proof they will not show you"),
                    ("https://zerohedge.com/911-questions", "Unanswered questions"),
                    ("https://naturalnews.com/911-truth", "The truth movement"),
                ],
            )
            for step in range(STEPS)
        },
    },
    'covid vaccine detox site:naturalnews.com': {
        "post": "https://google.com/search?q=covid+vaccine+detox+site%3Anaturalnews.com",
        "est": 38,
        "steps": {
            step: (
                "",
                [
                    ("https://naturalnews.com/detox-guide", "Vaccine detox guide"),
                    ("https://naturalnews.com/detox-herbs", "Detox herbs list"),
                    ("https://naturalnews.com/detox-faq", "Detox FAQ"),
                ],
            )
            for step in range(STEPS)
        },
    },
    "weather tomorrow forecast": {
        "post": "https://www.bing.com/search?q=weather+tomorrow+forecast",
        "est": 250_000_000,
        "steps": {
            step: (
                "",
                [
                    ("https://cnn.com/weather", "Weather updates"),
                    ("https://bbc.co.uk/weather", "BBC Weather"),
                    ("https://wikipedia.org/wiki/Weather", "Weather - Wikipedia"),
                    ("https://nytimes.com/weather-desk", "Weather desk"),
                ],
            )
            for step in range(STEPS)
            if step != 2  # missing page -> crawl gap
        },
    },
    "obscure gibberish zxqv": {
        "post": "https://google.com/search?q=obscure+gibberish+zxqv",
        "est": 7,
        "steps": {
            step: (
                "low_relevance_many",
                [
                    ("https://wikipedia.org/wiki/Gibberish", "Gibberish - Wikipedia"),
                    ("https://reuters.com/odd-news", "Odd news roundup"),
                ],
            )
            for step in range(STEPS)
        },
    },
    "strange spectral query aaa": {
        "post": "https://search.yahoo.com/search?p=strange+spectral+query+aaa",
        "est": 40,
        "steps": {
            step: (
                ("low_relevance_any" if step < 2 else ""),
                [
                    ("https://wikipedia.org/wiki/Spectral", "Spectral - Wikipedia"),
                    ("https://bbc.co.uk/spectral-story", "A strange spectral story"),
                    ("https://dupsite.com/spectral", "Spectral archive"),
                ],
            )
            for step in range(STEPS)
        },
    },
    "nonexistent documents query": {
        "post": "https://google.com/search?q=nonexistent+documents+query",
        "est": 0,
        "steps": {step: ("low_relevance_no_matches", []) for step in range(STEPS)},
    },
    "trump biden debate highlights": {
        "post": "https://google.com/search?q=trump+biden+debate+highlights",
        "est": 5_200_000,
        "steps": {
            step: (
                "",
                [
                    ("https://cnn.com/debate-highlights", "Debate highlights"),
                    ("https://nytimes.com/debate-recap", "Debate recap"),
                    ("https://foxnews.com/debate-takes", "Debate takes"),
                    (f"https://youtube.com/watch?v=debate{step}", "Debate clip", "video"),
                ],
            )
            for step in range(STEPS)
            if step != 4  # step 4 serves a structureless page -> quarantine
        },
    },
    "breaking rapidly evolving event": {
        "post": "https://google.com/search?q=breaking+rapidly+evolving+event",
        "est": 12_000,
        "steps": {
            step: (
                ("rapidly_changing" if step == 0 else ""),
                [
                    (f"https://cnn.com/live-{step}", f"Live updates {step}", "news"),
                    (f"https://reuters.com/wire-{step}", f"Wire report {step}", "news"),
                    ("https://bbc.co.uk/rolling-coverage", "Rolling coverage", "news"),
                ],
            )
            for step in range(STEPS)
        },
    },
}

CONFIDENCES = {
    "mrna prions": 0.97,
    "vril lizards droning process": 0.95,
    "9/11 inside job proof": 0.92,
    'covid vaccine detox site:naturalnews.com': 0.91,
    "nonexistent documents query": 0.88,
    "strange spectral query aaa": 0.60,
    "breaking rapidly evolving event": 0.30,
    "obscure gibberish zxqv": 0.15,
    "trump biden debate highlights": 0.10,
    "weather tomorrow forecast": 0.02,
}

CONFIG = """\
# voidscope pipeline configuration (fixture corpus)
posts_file = posts.txt
quality_csv = quality.csv
partisanship_csv = partisanship.csv
seo_csv = seo.csv
news_domains = news.txt
fixture_pages = pages
model_confidences = confidences.csv
workdir = out

wave_id = rapid-june
cadence = repeated
interval_seconds = 16200
steps = 5
results_per_query = 10
politeness_delay_ms = 0
crawl_base_time = 2024-06-07T00:00:00Z

window_max = 3
cutoff_min = 1
cutoff_max = 3
rbo_depth = 0
quality_threshold = 0.5
model_threshold = 0.9
alpha = 0.1
extrapolation_daily_searches = 5000000000
extrapolation_definition = quality
seed = 7
"""


def main() -> None:
    ROOT.mkdir(parents=True, exist_ok=True)

    posts = [spec["post"] for spec in QUERIES.values()]
    posts += [
        "https://google.com/search",                 # homepage: no query parameter
        "https://google.com/search?q=",              # blank query
        "https://example.com/search?q=not-an-engine",
        "https://duckduckgo.com/?q=vril%20lizards%20droning%20process",  # duplicate query
    ]
    (ROOT / "posts.txt").write_text("\n".join(posts) + "\n", encoding="utf-8")

    rows = ["domain,score"] + [f"{d},{s}" for d, s in QUALITY.items()]
    rows.insert(3, "www.newstarget.com,0.05")  # harmless www duplicate
    (ROOT / "quality.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    (ROOT / "partisanship.csv").write_text(
        "\n".join(["domain,score"] + [f"{d},{s}" for d, s in PARTISANSHIP.items()]) + "\n",
        encoding="utf-8",
    )
    (ROOT / "seo.csv").write_text(
        "\n".join(
            ["domain,backlinks,traffic_estimate,referring_domains,referring_ips,edu_backlinks,gov_backlinks"]
            + [
                f"{d},{int(t / 10)},{t},{int(t / 100)},{int(t / 200)},{int(t / 1e4)},{int(t / 1e5)}"
                for d, t in TRAFFIC.items()
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    (ROOT / "news.txt").write_text("\n".join(NEWS) + "\n", encoding="utf-8")
    (ROOT / "confidences.csv").write_text(
        "\n".join(["query_id,confidence"] + [f"{qid(q)},{c}" for q, c in CONFIDENCES.items()]) + "\n",
        encoding="utf-8",
    )
    (ROOT / "config.txt").write_text(CONFIG, encoding="utf-8")

    pages = 0
    for query, spec in QUERIES.items():
        for step, (banner_key, results) in spec["steps"].items():
            step_dir = ROOT / "pages" / f"step{step}"
            step_dir.mkdir(parents=True, exist_ok=True)
            html = make_serp_html(
                results=results,
                banner_text=BANNER_TEXTS.get(banner_key, ""),
                stats_text=f"About {spec['est']:,} results",
            )
            (step_dir / f"{slug(query)}.html").write_text(html, encoding="utf-8")
            pages += 1
    # quarantine page: structureless HTML for one (query, step)
    broken = ROOT / "pages" / "step4" / f"{slug('trump biden debate highlights')}.html"
    broken.write_text("<html><body><p>unusual traffic detected</p></body></html>", encoding="utf-8")
    pages += 1

    print(f"wrote corpus with {len(QUERIES)} queries, {pages} pages at {ROOT}")


if __name__ == "__main__":
    main()

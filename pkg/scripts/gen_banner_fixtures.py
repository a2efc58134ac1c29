"""Regenerate the banner-classification fixture corpus.

Layout: tests/fixtures/banners/<expected_banner_type>__<variant>.html
The expected type is read back from the filename by the regression tests.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from serpgen import BANNER_TEXTS, make_serp_html  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "banners"

RESULTS = [
    ("https://example.com/a", "Result A"),
    ("https://sample.org/b", "Result B"),
    ("https://demo.net/c", "Result C"),
]


def curly(text: str) -> str:
    return text.replace("'", "’")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    pages: dict[str, str] = {}

    for kind, text in BANNER_TEXTS.items():
        pages[f"{kind}__plain"] = make_serp_html(
            results=RESULTS if kind != "low_relevance_no_matches" else [],
            banner_text=text,
            stats_text="About 1,230 results",
        )
        pages[f"{kind}__styled"] = make_serp_html(
            results=RESULTS[:1] if kind != "low_relevance_no_matches" else [],
            banner_text=curly(text).upper()[:1] + curly(text)[1:] + "  \n  Consider different keywords.",
            banner_class="banner-card",
            noise=True,
        )

    # the no-matches page occasionally carries a single generic ad
    pages["low_relevance_no_matches__with_ad"] = make_serp_html(
        results=[("https://ads.example.com/promo", "Generic Ad", "ad")],
        banner_text=BANNER_TEXTS["low_relevance_no_matches"],
    )
    pages["none__ten_results"] = make_serp_html(
        results=[(f"https://site{i}.com/page", f"Title {i}") for i in range(1, 11)],
        stats_text="About 4,600,000 results",
    )
    pages["none__sparse"] = make_serp_html(results=RESULTS, noise=True)
    pages["none__truncated_query"] = make_serp_html(
        results=RESULTS, truncation_notice=True, stats_text="About 12 results"
    )

    for name, html in sorted(pages.items()):
        (OUT / f"{name}.html").write_text(html, encoding="utf-8")
    print(f"wrote {len(pages)} fixture pages to {OUT}")


if __name__ == "__main__":
    main()

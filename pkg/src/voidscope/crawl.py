"""SERP collection: wave scheduling, polite fetching, durable persistence.

The fetcher is abstract so tests and reruns use recorded fixtures; the
bundled live fetcher does plain HTTPS GETs. Every completed task is written
to the manifest (fsync'd) before the runner moves on, which makes the
manifest itself the resume checkpoint: replaying a finished crawl issues
zero fetches. HTML blobs are content-addressed, so identical pages
deduplicate.
"""

from __future__ import annotations

import os
import time
import urllib.parse
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Optional, Protocol

from .ioutil import dumps_canonical, gunzip_bytes, gzip_bytes, read_ndjson, sha256_bytes

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_S = 2.0


class InvalidCadenceError(ValueError):
    pass


@dataclass(frozen=True)
class Cadence:
    kind: str  # "single_pass" | "repeated"
    interval_seconds: int = 0
    steps: int = 1

    def validate(self) -> None:
        if self.kind == "single_pass":
            return
        if self.kind == "repeated":
            if self.steps < 1 or self.interval_seconds <= 0:
                raise InvalidCadenceError(
                    f"repeated cadence needs steps >= 1 and interval > 0, got "
                    f"steps={self.steps}, interval={self.interval_seconds}"
                )
            return
        raise InvalidCadenceError(f"unknown cadence kind: {self.kind!r}")

    @property
    def step_count(self) -> int:
        return 1 if self.kind == "single_pass" else self.steps


@dataclass(frozen=True)
class CrawlTask:
    step_index: int
    task_index: int
    query_text: str


@dataclass(frozen=True)
class CrawlPlan:
    wave_id: str
    queries: tuple[str, ...]
    cadence: Cadence
    results_per_query: int = 10
    politeness_delay_ms: int = 1000
    location_label: str = ""

    def tasks(self) -> Iterator[CrawlTask]:
        index = 0
        for step in range(self.cadence.step_count):
            for query in self.queries:
                yield CrawlTask(step_index=step, task_index=index, query_text=query)
                index += 1

    def task_count(self) -> int:
        return self.cadence.step_count * len(self.queries)

    def to_dict(self) -> dict:
        return {
            "wave_id": self.wave_id,
            "queries": list(self.queries),
            "cadence": {
                "kind": self.cadence.kind,
                "interval_seconds": self.cadence.interval_seconds,
                "steps": self.cadence.steps,
            },
            "results_per_query": self.results_per_query,
            "politeness_delay_ms": self.politeness_delay_ms,
            "location_label": self.location_label,
        }

    @staticmethod
    def from_dict(d: dict) -> "CrawlPlan":
        cad = d["cadence"]
        return CrawlPlan(
            wave_id=d["wave_id"],
            queries=tuple(d["queries"]),
            cadence=Cadence(cad["kind"], cad.get("interval_seconds", 0), cad.get("steps", 1)),
            results_per_query=d.get("results_per_query", 10),
            politeness_delay_ms=d.get("politeness_delay_ms", 1000),
            location_label=d.get("location_label", ""),
        )


def schedule_wave(queries: list[str], config: dict) -> CrawlPlan:
    """Build a crawl plan enumerating every (step, query) task in
    deterministic order."""
    if not queries:
        raise ValueError("query list is empty")
    cadence = Cadence(
        kind=config.get("cadence", "single_pass"),
        interval_seconds=int(config.get("interval_seconds", 0)),
        steps=int(config.get("steps", 1)),
    )
    cadence.validate()
    results_per_query = int(config.get("results_per_query", 10))
    if results_per_query not in (10, 100):
        raise ValueError("results_per_query must be 10 or 100")
    return CrawlPlan(
        wave_id=config.get("wave_id", "wave"),
        queries=tuple(queries),
        cadence=cadence,
        results_per_query=results_per_query,
        politeness_delay_ms=int(config.get("politeness_delay_ms", 1000)),
        location_label=config.get("location_label", ""),
    )


@dataclass(frozen=True)
class CrawlRecord:
    wave_id: str
    step_index: int
    query_text: str
    fetched_at: str
    http_status: int
    raw_html_ref: str  # content hash; empty on gap records
    gap: bool = False

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.wave_id, self.step_index, self.query_text)

    def to_dict(self) -> dict:
        return {
            "wave_id": self.wave_id,
            "step_index": self.step_index,
            "query_text": self.query_text,
            "fetched_at": self.fetched_at,
            "http_status": self.http_status,
            "raw_html_ref": self.raw_html_ref,
            "gap": self.gap,
        }

    @staticmethod
    def from_dict(d: dict) -> "CrawlRecord":
        return CrawlRecord(
            wave_id=d["wave_id"],
            step_index=d["step_index"],
            query_text=d["query_text"],
            fetched_at=d["fetched_at"],
            http_status=d["http_status"],
            raw_html_ref=d.get("raw_html_ref", ""),
            gap=d.get("gap", False),
        )


class BlobStore:
    """Content-addressed store of gzip-compressed HTML plus a crawl manifest."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "blobs").mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.ndjson"

    def _blob_path(self, digest: str) -> Path:
        return self.root / "blobs" / digest[:2] / f"{digest}.html.gz"

    def put_blob(self, html: str | bytes) -> str:
        data = html.encode("utf-8") if isinstance(html, str) else html
        digest = sha256_bytes(data)
        path = self._blob_path(digest)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(gzip_bytes(data))
            os.replace(tmp, path)
        return digest

    def get_blob(self, digest: str) -> bytes:
        return gunzip_bytes(self._blob_path(digest).read_bytes())

    def has_blob(self, digest: str) -> bool:
        return self._blob_path(digest).exists()

    def append_record(self, record: CrawlRecord) -> None:
        # durable before the stream advances: flush + fsync per record
        with open(self.manifest_path, "a", encoding="utf-8") as fh:
            fh.write(dumps_canonical(record.to_dict()))
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())

    def read_manifest(self) -> list[CrawlRecord]:
        if not self.manifest_path.exists():
            return []
        return [CrawlRecord.from_dict(d) for d in read_ndjson(self.manifest_path)]

    def completed_keys(self) -> set[tuple[str, int, str]]:
        return {r.key for r in self.read_manifest()}


class Fetcher(Protocol):
    def fetch(self, query: str, result_count: int, step_index: int = 0) -> tuple[int, str]:
        """Return (http_status, html). Raise or return non-200 on failure."""


class FixtureFetcher:
    """Serve recorded pages from a directory: pages/step<k>/<query-slug>.html."""

    def __init__(self, pages_dir: str | Path):
        self.pages_dir = Path(pages_dir)
        self.calls = 0

    @staticmethod
    def slug(query: str) -> str:
        safe = "".join(ch if ch.isalnum() else "-" for ch in query.lower())
        return safe.strip("-")[:80] or "empty"

    def fetch(self, query: str, result_count: int, step_index: int = 0) -> tuple[int, str]:
        self.calls += 1
        path = self.pages_dir / f"step{step_index}" / f"{self.slug(query)}.html"
        if not path.exists():
            return 404, ""
        return 200, path.read_text("utf-8")


class LiveFetcher:
    """Plain HTTPS GET fetcher. Proxy and user agent come from the
    VOIDSCOPE_PROXY and VOIDSCOPE_USER_AGENT environment variables."""

    def __init__(self, base_url: str = "https://www.google.com/search", timeout_s: float = 30.0):
        self.base_url = base_url
        self.timeout_s = timeout_s

    def fetch(self, query: str, result_count: int, step_index: int = 0) -> tuple[int, str]:
        params = urllib.parse.urlencode({"q": query, "num": result_count})
        request = urllib.request.Request(
            f"{self.base_url}?{params}",
            headers={"User-Agent": os.environ.get("VOIDSCOPE_USER_AGENT", "voidscope/0.1")},
        )
        proxy = os.environ.get("VOIDSCOPE_PROXY")
        handlers = [urllib.request.ProxyHandler({"http": proxy, "https": proxy})] if proxy else []
        opener = urllib.request.build_opener(*handlers)
        with opener.open(request, timeout=self.timeout_s) as resp:
            return resp.status, resp.read().decode("utf-8", errors="replace")


def run_crawl(
    plan: CrawlPlan,
    fetcher: Fetcher,
    store: BlobStore,
    sleep: Callable[[float], None] = time.sleep,
    clock: Optional[Callable[[CrawlTask], str]] = None,
    retry_attempts: int = RETRY_ATTEMPTS,
    retry_backoff_s: float = RETRY_BACKOFF_S,
) -> Iterator[CrawlRecord]:
    """Execute every planned task exactly once, yielding records as they
    are persisted.

    Tasks already present in the store's manifest are skipped, so resuming
    an interrupted crawl re-fetches nothing. A task that still fails after
    the retry budget produces a gap record instead of crashing the run.
    Requests to the engine are serialized with the politeness delay between
    them.
    """
    plan.cadence.validate()
    if clock is None:
        clock = lambda task: time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    done = store.completed_keys()
    delay_s = plan.politeness_delay_ms / 1000.0
    first_request = True
    for task in plan.tasks():
        key = (plan.wave_id, task.step_index, task.query_text)
        if key in done:
            continue
        status, html = 0, ""
        for attempt in range(retry_attempts):
            if not first_request:
                sleep(delay_s if attempt == 0 else retry_backoff_s * (2 ** (attempt - 1)))
            first_request = False
            try:
                status, html = fetcher.fetch(task.query_text, plan.results_per_query, task.step_index)
            except Exception:
                status, html = 0, ""
            if status == 200 and html:
                break
        if status == 200 and html:
            digest = store.put_blob(html)
            record = CrawlRecord(
                wave_id=plan.wave_id,
                step_index=task.step_index,
                query_text=task.query_text,
                fetched_at=clock(task),
                http_status=status,
                raw_html_ref=digest,
            )
        else:
            record = CrawlRecord(
                wave_id=plan.wave_id,
                step_index=task.step_index,
                query_text=task.query_text,
                fetched_at=clock(task),
                http_status=status,
                raw_html_ref="",
                gap=True,
            )
        store.append_record(record)
        yield record

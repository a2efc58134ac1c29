"""Bipartite query-domain graph construction.

Nodes are queries and the domains their SERPs returned; edges are unweighted
so that pure ranking shuffles of the same URLs leave the graph unchanged.
Domains linked to fewer than two distinct queries (pendulum domains) carry
no information between queries and are removed. Queries whose domains were
all removed stay in the graph as isolated nodes so inference still covers
them; a diagnostic count records how many.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import TextEmbedder

TITLES_PER_DOMAIN = 10

EDGE_QUERY_TO_DOMAIN = "query-to-domain"
EDGE_DOMAIN_TO_QUERY = "domain-to-query"


@dataclass(frozen=True)
class QueryRecord:
    """One exported training row: a query, its banner label, and the
    (domain, title) pairs its SERPs returned."""

    query_id: str
    text: str
    label: bool
    results: tuple[tuple[str, str], ...]  # (domain, title)

    @staticmethod
    def from_dict(d: dict) -> "QueryRecord":
        return QueryRecord(
            query_id=d["query_id"],
            text=d["text"],
            label=bool(d["label"]),
            results=tuple((r["domain"], r.get("title", "")) for r in d["results"]),
        )


def load_records(path: str | Path) -> list[QueryRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(QueryRecord.from_dict(json.loads(line)))
    return records


@dataclass
class QueryDomainGraph:
    query_ids: list[str]
    domains: list[str]
    query_x: np.ndarray          # (Q, dim)
    domain_x: np.ndarray         # (D, dim)
    edges: np.ndarray            # (2, E) rows: query index, domain index
    labels: np.ndarray           # (Q,) bool
    domain_strings: dict[str, str] = field(default_factory=dict)
    isolated_query_count: int = 0

    @property
    def n_queries(self) -> int:
        return len(self.query_ids)

    @property
    def n_domains(self) -> int:
        return len(self.domains)

    def query_index(self, query_id: str) -> int:
        return self.query_ids.index(query_id)

    def validate(self) -> None:
        """Bipartiteness and pendulum exclusion, asserted at construction."""
        if self.n_queries == 0:
            raise ValueError("graph has no query nodes")
        if self.edges.size:
            if self.edges[0].min() < 0 or self.edges[0].max() >= self.n_queries:
                raise AssertionError("edge query endpoint out of range")
            if self.edges[1].min() < 0 or self.edges[1].max() >= self.n_domains:
                raise AssertionError("edge domain endpoint out of range")
        degrees = np.zeros(self.n_domains, dtype=int)
        for d in self.edges[1]:
            degrees[d] += 1
        if self.n_domains and (degrees < 2).any():
            raise AssertionError("pendulum domain survived construction")


def build_graph(
    records: Sequence[QueryRecord],
    embedder: TextEmbedder,
    titles_per_domain: int = TITLES_PER_DOMAIN,
    seed: int = 0,
) -> QueryDomainGraph:
    """Build the bipartite graph with text features on both node sets.

    Domain features are the mean embedding of exactly ``titles_per_domain``
    titles sampled with replacement from the domain's observed titles; the
    sampled titles are also concatenated after a "domain:" prefix and kept
    for inspection. Query features embed the query text.
    """
    if not records:
        raise ValueError("no query records; graph would be empty")
    rng = np.random.default_rng(seed)

    # domain degree = number of distinct queries linking to it
    domain_queries: dict[str, set[str]] = {}
    domain_titles: dict[str, list[str]] = {}
    for record in records:
        for domain, title in record.results:
            if not domain:
                continue
            domain_queries.setdefault(domain, set()).add(record.query_id)
            if title:
                domain_titles.setdefault(domain, []).append(title)
    kept_domains = sorted(d for d, qs in domain_queries.items() if len(qs) >= 2)
    domain_index = {d: i for i, d in enumerate(kept_domains)}

    query_ids = [r.query_id for r in records]
    query_pos = {q: i for i, q in enumerate(query_ids)}
    if len(query_pos) != len(query_ids):
        raise ValueError("duplicate query_id in records")

    edge_set: set[tuple[int, int]] = set()
    isolated = 0
    for record in records:
        touched = False
        for domain, _ in record.results:
            if domain in domain_index:
                edge_set.add((query_pos[record.query_id], domain_index[domain]))
                touched = True
        if not touched:
            isolated += 1
    edges = (
        np.array(sorted(edge_set), dtype=int).T if edge_set else np.zeros((2, 0), dtype=int)
    )

    query_x = embedder.encode([r.text for r in records])

    domain_strings: dict[str, str] = {}
    domain_rows = []
    for domain in kept_domains:
        pool = domain_titles.get(domain) or [domain]
        picks = [pool[i] for i in rng.integers(0, len(pool), size=titles_per_domain)]
        domain_strings[domain] = f"{domain}: " + " ".join(picks)
        domain_rows.append(embedder.encode(picks).mean(axis=0))
    domain_x = np.vstack(domain_rows) if domain_rows else np.zeros((0, embedder.dim))

    graph = QueryDomainGraph(
        query_ids=query_ids,
        domains=kept_domains,
        query_x=query_x,
        domain_x=domain_x,
        edges=edges,
        labels=np.array([r.label for r in records], dtype=bool),
        domain_strings=domain_strings,
        isolated_query_count=isolated,
    )
    graph.validate()
    return graph

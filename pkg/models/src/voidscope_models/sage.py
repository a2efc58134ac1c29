"""Hand-rolled GraphSage layers for the bipartite query-domain graph.

A mean-aggregator SAGE convolution is a pair of linear maps:

    h_v = W_self x_v + W_neigh mean_{u in N(v)} x_u + b

The homogeneous model runs two such convolutions over the undirected graph
with queries and domains stacked into one node set. The heterogeneous model
gives each edge direction (query-to-domain, domain-to-query) its own
convolution per layer, which exactly doubles the parameter count at equal
width. Dropout sits between the two convolutions and the output is a
log-softmax over the two banner classes.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from .graph import QueryDomainGraph

OUT_CLASSES = 2
PARAM_TARGET = 526_000


def auto_hidden(in_dim: int, target: int = PARAM_TARGET) -> int:
    """Hidden width bringing the homogeneous parameter count near target.

    hom params = H*(2*in_dim + 5) + 2 for a two-layer model with 2 output
    classes, so the width follows directly.
    """
    return max(1, round((target - OUT_CLASSES) / (2 * in_dim + 2 * OUT_CLASSES + 1)))


def mean_adjacency(dst_count: int, src_count: int, dst_idx: np.ndarray, src_idx: np.ndarray) -> torch.Tensor:
    """Sparse (dst_count x src_count) matrix averaging neighbor features."""
    if len(dst_idx) == 0:
        return torch.sparse_coo_tensor(
            torch.zeros((2, 0), dtype=torch.long),
            torch.zeros(0),
            (dst_count, src_count),
            check_invariants=True,
        ).coalesce()
    degree = np.zeros(dst_count)
    for d in dst_idx:
        degree[d] += 1
    values = torch.tensor([1.0 / degree[d] for d in dst_idx], dtype=torch.float32)
    indices = torch.tensor(np.vstack([dst_idx, src_idx]), dtype=torch.long)
    return torch.sparse_coo_tensor(
        indices, values, (dst_count, src_count), check_invariants=True
    ).coalesce()


class SageConv(nn.Module):
    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.self_lin = nn.Linear(in_dim, out_dim, bias=False)
        self.neigh_lin = nn.Linear(in_dim, out_dim, bias=True)

    def forward(self, x_dst: torch.Tensor, x_src: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        return self.self_lin(x_dst) + self.neigh_lin(torch.sparse.mm(adj, x_src))


class HomogeneousSage(nn.Module):
    """Two SAGE convolutions over the stacked (queries + domains) node set."""

    def __init__(self, in_dim: int, hidden: int, dropout: float = 0.5):
        super().__init__()
        self.conv1 = SageConv(in_dim, hidden)
        self.conv2 = SageConv(hidden, OUT_CLASSES)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        h = self.conv1(x, x, adj)
        h = F.relu(self.dropout(h))
        return F.log_softmax(self.conv2(h, h, adj), dim=1)


class HeterogeneousSage(nn.Module):
    """Per-edge-type SAGE convolutions; twice the parameters at equal width."""

    def __init__(self, in_dim: int, hidden: int, dropout: float = 0.5):
        super().__init__()
        self.q_conv1 = SageConv(in_dim, hidden)   # domain-to-query messages
        self.d_conv1 = SageConv(in_dim, hidden)   # query-to-domain messages
        self.q_conv2 = SageConv(hidden, OUT_CLASSES)
        self.d_conv2 = SageConv(hidden, OUT_CLASSES)
        self.dropout = nn.Dropout(dropout)

    def forward(
        self,
        x_q: torch.Tensor,
        x_d: torch.Tensor,
        adj_dq: torch.Tensor,  # (Q x D): aggregates domain features into queries
        adj_qd: torch.Tensor,  # (D x Q): aggregates query features into domains
    ) -> tuple[torch.Tensor, torch.Tensor]:
        h_q = self.q_conv1(x_q, x_d, adj_dq)
        h_d = self.d_conv1(x_d, x_q, adj_qd)
        h_q = F.relu(self.dropout(h_q))
        h_d = F.relu(self.dropout(h_d))
        out_q = self.q_conv2(h_q, h_d, adj_dq)
        out_d = self.d_conv2(h_d, h_q, adj_qd)
        return F.log_softmax(out_q, dim=1), F.log_softmax(out_d, dim=1)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


class GraphTensors:
    """Torch views of a QueryDomainGraph shared by both model variants."""

    def __init__(self, graph: QueryDomainGraph):
        self.n_q = graph.n_queries
        self.n_d = graph.n_domains
        self.x_q = torch.tensor(graph.query_x, dtype=torch.float32)
        self.x_d = torch.tensor(graph.domain_x, dtype=torch.float32)
        q_idx, d_idx = graph.edges[0], graph.edges[1]
        # homogeneous: domains stacked after queries, edges in both directions
        self.x_all = torch.cat([self.x_q, self.x_d], dim=0)
        total = self.n_q + self.n_d
        dst = np.concatenate([q_idx, d_idx + self.n_q])
        src = np.concatenate([d_idx + self.n_q, q_idx])
        self.adj_all = mean_adjacency(total, total, dst, src)
        # heterogeneous: one directed adjacency per edge type
        self.adj_dq = mean_adjacency(self.n_q, self.n_d, q_idx, d_idx)
        self.adj_qd = mean_adjacency(self.n_d, self.n_q, d_idx, q_idx)

    def query_log_probs(self, model: nn.Module) -> torch.Tensor:
        if isinstance(model, HomogeneousSage):
            return model(self.x_all, self.adj_all)[: self.n_q]
        out_q, _ = model(self.x_q, self.x_d, self.adj_dq, self.adj_qd)
        return out_q

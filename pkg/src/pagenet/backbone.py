"""Disparity-filter backbone of a weighted undirected network.

An edge carrying a fraction ``p`` of an endpoint's strength, where that
endpoint has degree ``k``, gets the score ``(1 - p) ** (k - 1)``: the
probability of seeing a share at least that large when the strength is split
uniformly at random among ``k`` edges. The edge is kept when the score is
below ``alpha`` at either endpoint.

Conventions:
  * a degree-1 endpoint scores 1 (never significant on its own side);
  * retention uses a strict ``score < alpha``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

from .graph import WeightedGraph
from .ingest import PageRecord

DEGREE_ONE_SCORE = 1.0
CONVENTIONS = "degree_one_score=1; retain_if=min(score_src,score_dst)<alpha"


@dataclass(frozen=True)
class BackboneConfig:
    alpha: float = 0.05
    degree_one_rule: str = field(default="score_one", init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


def edge_significance(p: float, k: int) -> float:
    if not 0.0 < p <= 1.0:
        raise ValueError(f"normalized weight must lie in (0, 1], got {p}")
    if k < 1:
        raise ValueError(f"degree must be at least 1, got {k}")
    if k == 1:
        return DEGREE_ONE_SCORE
    if p == 1.0:
        return 0.0
    # log-space keeps large degrees from underflowing prematurely
    return math.exp((k - 1) * math.log1p(-p))


@dataclass(frozen=True)
class ScoredEdge:
    source: str
    target: str
    weight: float
    score_src: float
    score_dst: float
    retained: bool

    @property
    def score(self) -> float:
        return min(self.score_src, self.score_dst)


@dataclass(frozen=True)
class BackboneResult:
    alpha: float
    edges: tuple[ScoredEdge, ...]
    total_weight: float
    retained_weight: float
    nodes_total: int
    nodes_retained: int

    @property
    def retained(self) -> list[ScoredEdge]:
        return [e for e in self.edges if e.retained]

    def retained_pairs(self) -> set[tuple[str, str]]:
        return {(e.source, e.target) for e in self.edges if e.retained}

    @property
    def weight_fraction_preserved(self) -> float:
        return self.retained_weight / self.total_weight

    @property
    def edge_fraction_preserved(self) -> float:
        return len(self.retained) / len(self.edges)

    @property
    def node_fraction_preserved(self) -> float:
        """Share of non-isolated input nodes that touch a retained edge."""
        return self.nodes_retained / self.nodes_total

    def summary(self) -> dict:
        return {
            "alpha": self.alpha,
            "edges_total": len(self.edges),
            "edges_retained": len(self.retained),
            "nodes_total": self.nodes_total,
            "nodes_retained": self.nodes_retained,
            "weight_total": self.total_weight,
            "weight_retained": self.retained_weight,
            "weight_fraction": self.weight_fraction_preserved,
            "edge_fraction": self.edge_fraction_preserved,
            "node_fraction": self.node_fraction_preserved,
        }


def score_edges(g: WeightedGraph) -> dict[tuple[str, str], tuple[float, float]]:
    """Per edge (u, v): (score seen from u, score seen from v)."""
    degree = g.degree()
    strength = g.strength()
    return {
        (u, v): (edge_significance(w / strength[u], degree[u]), edge_significance(w / strength[v], degree[v]))
        for (u, v), w in g.weights.items()
    }


def disparity_filter(
    g: WeightedGraph,
    config: BackboneConfig | float = 0.05,
    scores: Mapping[tuple[str, str], tuple[float, float]] | None = None,
) -> BackboneResult:
    if not isinstance(config, BackboneConfig):
        config = BackboneConfig(config)
    if len(g) == 0:
        raise ValueError("disparity filter needs a graph with at least one edge")
    if scores is None:
        scores = score_edges(g)
    alpha = config.alpha
    edges = []
    retained_weight = 0
    touched: set[str] = set()
    kept: set[str] = set()
    for u, v, w in g.edges:
        s_u, s_v = scores[u, v]
        keep = min(s_u, s_v) < alpha
        edges.append(ScoredEdge(u, v, w, s_u, s_v, keep))
        touched.update((u, v))
        if keep:
            retained_weight += w
            kept.update((u, v))
    return BackboneResult(alpha, tuple(edges), g.total_weight(), retained_weight, len(touched), len(kept))


def backbone_graph(result: BackboneResult) -> WeightedGraph:
    return WeightedGraph.from_edges((e.source, e.target, e.weight) for e in result.retained)


@dataclass(frozen=True)
class RankedPage:
    page_id: str
    name: str
    strength: float
    degree: int


def backbone_report(result: BackboneResult, pages: Iterable[PageRecord] | Mapping[str, PageRecord] = ()) -> list[RankedPage]:
    """Pages touching the backbone, by retained strength then degree then id."""
    by_id = pages if isinstance(pages, Mapping) else {p.page_id: p for p in pages}
    strength: dict[str, float] = {}
    degree: dict[str, int] = {}
    for e in result.retained:
        for n in (e.source, e.target):
            strength[n] = strength.get(n, 0) + e.weight
            degree[n] = degree.get(n, 0) + 1
    ranked = sorted(strength, key=lambda n: (-strength[n], -degree[n], n))
    return [
        RankedPage(n, by_id[n].name if n in by_id else "", strength[n], degree[n]) for n in ranked
    ]


def _fmt(x: float) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def write_backbone(result: BackboneResult, stream: TextIO) -> None:
    """Scored edge list with a ``#`` header carrying conventions and summary."""
    s = result.summary()
    stream.write(f"# {CONVENTIONS}\n")
    stream.write(
        "# alpha={} weight_fraction={} edge_fraction={} node_fraction={} edges={}/{} nodes={}/{}\n".format(
            _fmt(result.alpha),
            _fmt(s["weight_fraction"]),
            _fmt(s["edge_fraction"]),
            _fmt(s["node_fraction"]),
            s["edges_retained"],
            s["edges_total"],
            s["nodes_retained"],
            s["nodes_total"],
        )
    )
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["source", "target", "weight", "score_src", "score_dst", "retained_at_alpha"])
    for e in result.edges:
        writer.writerow([e.source, e.target, _fmt(e.weight), _fmt(e.score_src), _fmt(e.score_dst), int(e.retained)])


def write_ranking(ranking: Sequence[RankedPage], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["rank", "page_id", "name", "strength", "degree"])
    for i, r in enumerate(ranking, start=1):
        writer.writerow([i, r.page_id, r.name, _fmt(r.strength), r.degree])

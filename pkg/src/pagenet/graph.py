"""Bipartite page networks and their one-mode (co-occurrence) projections."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence, TextIO

from .classify import UserClassification
from .ingest import ActivityDataset, PostRecord

LEFT, RIGHT = "left", "right"


class BipartiteGraph:
    """Two vertex sides and an edge set between them.

    Each side keeps its own adjacency map, so identifiers never mix even if a
    page id happens to equal a post or user id.
    """

    def __init__(self, left: Iterable[str], right: Iterable[str], edges: Iterable[tuple[str, str]]):
        self.left = tuple(dict.fromkeys(left))
        self.right = tuple(dict.fromkeys(right))
        self.left_adj: dict[str, set[str]] = {a: set() for a in self.left}
        self.right_adj: dict[str, set[str]] = {b: set() for b in self.right}
        for a, b in edges:
            if a not in self.left_adj:
                raise KeyError(f"edge endpoint {a!r} is not a left vertex")
            if b not in self.right_adj:
                raise KeyError(f"edge endpoint {b!r} is not a right vertex")
            self.left_adj[a].add(b)
            self.right_adj[b].add(a)

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a in self.left for b in sorted(self.left_adj[a])]

    def number_of_edges(self) -> int:
        return sum(len(n) for n in self.left_adj.values())

    def degree(self, vertex: str, side: str = LEFT) -> int:
        adj = self.left_adj if side == LEFT else self.right_adj
        return len(adj[vertex])

    def incidence_matrix(self):
        """Dense 0/1 matrix M with rows = left, columns = right."""
        import numpy as np

        col = {b: j for j, b in enumerate(self.right)}
        m = np.zeros((len(self.left), len(self.right)), dtype=np.int64)
        for i, a in enumerate(self.left):
            for b in self.left_adj[a]:
                m[i, col[b]] = 1
        return m


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive weights, keyed by (u, v) with u < v."""

    nodes: tuple[str, ...]
    weights: Mapping[tuple[str, str], float]

    def __post_init__(self):
        known = set(self.nodes)
        for (u, v), w in self.weights.items():
            if not u < v:
                raise ValueError(f"edge key ({u!r}, {v!r}) must be ordered with u < v (no self-loops)")
            if u not in known or v not in known:
                raise KeyError(f"edge ({u!r}, {v!r}) references an unknown node")
            if not w > 0:
                raise ValueError(f"edge ({u!r}, {v!r}) has non-positive weight {w}")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, float]], nodes: Iterable[str] = ()) -> "WeightedGraph":
        weights: dict[tuple[str, str], float] = {}
        order = dict.fromkeys(nodes)
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            key = (u, v) if u < v else (v, u)
            if key in weights:
                raise ValueError(f"duplicate edge {key}")
            weights[key] = w
            order.setdefault(u)
            order.setdefault(v)
        return cls(tuple(order), weights)

    def __len__(self):
        return len(self.weights)

    def weight(self, u: str, v: str) -> float:
        return self.weights.get((u, v) if u < v else (v, u), 0)

    @property
    def edges(self) -> list[tuple[str, str, float]]:
        return [(u, v, self.weights[u, v]) for u, v in sorted(self.weights)]

    @property
    def adjacency(self) -> dict[str, dict[str, float]]:
        adj: dict[str, dict[str, float]] = {n: {} for n in self.nodes}
        for (u, v), w in self.weights.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def degree(self) -> dict[str, int]:
        return {n: len(nb) for n, nb in self.adjacency.items()}

    def strength(self) -> dict[str, float]:
        return {n: sum(nb.values()) for n, nb in self.adjacency.items()}

    def total_weight(self) -> float:
        return sum(self.weights.values())

    def scaled(self, factor: float) -> "WeightedGraph":
        return WeightedGraph(self.nodes, {k: w * factor for k, w in self.weights.items()})


@dataclass(frozen=True)
class ReshareClass:
    object_id: str
    representative: str
    members: tuple[str, ...]
    pages: frozenset[str]


def reshare_classes(posts: Iterable[PostRecord]) -> list[ReshareClass]:
    """Group posts by object id; posts without one are left out.

    The representative is the earliest post, ties broken by post id.
    """
    groups: dict[str, list[PostRecord]] = defaultdict(list)
    for post in posts:
        if post.object_id is not None:
            groups[post.object_id].append(post)
    out = []
    for obj in sorted(groups):
        members = sorted(groups[obj], key=lambda p: (p.timestamp, p.post_id))
        out.append(
            ReshareClass(obj, members[0].post_id, tuple(p.post_id for p in members), frozenset(p.page_id for p in members))
        )
    return out


def build_pages_posts(dataset: ActivityDataset, classes: Sequence[ReshareClass] | None = None) -> BipartiteGraph:
    """Pages on the left, reshare-class representatives on the right."""
    if classes is None:
        classes = reshare_classes(dataset.posts)
    return BipartiteGraph(
        dataset.page_ids,
        (c.representative for c in classes),
        ((page, c.representative) for c in classes for page in sorted(c.pages)),
    )


def build_pages_polarized(dataset: ActivityDataset, classification: UserClassification) -> BipartiteGraph:
    """Pages on the left, polarized users on the right; edge = at least one like."""
    users = classification.polarized_users()
    likes = dataset.likes_by_user_page
    return BipartiteGraph(
        dataset.page_ids, users, ((page, u) for u in users for page in sorted(likes.get(u, {})))
    )


def project(g: BipartiteGraph, side: str = LEFT) -> WeightedGraph:
    """Co-occurrence network on one side; weight = number of common neighbours.

    Sparse: walks the opposite side and counts vertex pairs.
    """
    if side == LEFT:
        nodes, hubs = g.left, g.right_adj
    elif side == RIGHT:
        nodes, hubs = g.right, g.left_adj
    else:
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}, got {side!r}")
    pairs: Counter = Counter()
    for neighbours in hubs.values():
        if len(neighbours) > 1:
            pairs.update(combinations(sorted(neighbours), 2))
    return WeightedGraph(tuple(nodes), dict(sorted(pairs.items())))


def write_edge_list(g: WeightedGraph, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["source_page", "target_page", "weight"])
    for u, v, w in g.edges:
        writer.writerow([u, v, w])


def read_edge_list(stream: TextIO, nodes: Iterable[str] = ()) -> WeightedGraph:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["source_page", "target_page", "weight"]:
        raise ValueError(f"unexpected edge list header {header}")
    edges = []
    for row in reader:
        if not row:
            continue
        u, v, w = row
        edges.append((u, v, int(w) if w.lstrip("-").isdigit() else float(w)))
    return WeightedGraph.from_edges(edges, nodes)

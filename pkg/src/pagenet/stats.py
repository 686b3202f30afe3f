"""Empirical distributions, correlations and per-page aggregates."""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence, TextIO

import numpy as np

from .classify import UserClassification
from .ingest import POST_TYPES, ActivityDataset


class CorrelationUndefined(ValueError):
    """Pearson correlation of a constant vector."""


class EmpiricalDistribution:
    """Distribution of a finite sample.

    ``cdf(x) = Pr(X <= x)`` and ``ccdf(x) = Pr(X > x)``, both exact counts
    over the sample. Works on scalars and arrays.
    """

    def __init__(self, samples: Iterable[float]):
        data = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
        if data.size == 0:
            raise ValueError("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(data)):
            raise ValueError("samples must be finite")
        self.values, self.counts = np.unique(data, return_counts=True)
        self._cum = np.cumsum(self.counts)
        self.n = int(self._cum[-1])

    def __len__(self):
        return self.n

    def cdf(self, x):
        idx = np.searchsorted(self.values, x, side="right")
        below = np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0)
        out = below / self.n
        return float(out) if np.ndim(out) == 0 else out

    def ccdf(self, x):
        idx = np.searchsorted(self.values, x, side="right")
        below = np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0)
        out = (self.n - below) / self.n
        return float(out) if np.ndim(out) == 0 else out

    def pmf(self) -> tuple[np.ndarray, np.ndarray]:
        """Probability mass at each distinct sample value."""
        return self.values.copy(), self.counts / self.n

    def ccdf_points(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, C(x)) at every distinct sample value."""
        return self.values.copy(), (self.n - self._cum) / self.n


def empirical_ccdf(samples: Iterable[float]) -> EmpiricalDistribution:
    return EmpiricalDistribution(samples)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"pearson needs two vectors of equal length, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValueError("pearson needs at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0 or np.ptp(x) == 0 or np.ptp(y) == 0:
        raise CorrelationUndefined("correlation undefined for a constant vector")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class PageMetrics:
    page_id: str
    users: int = 0
    posts: int = 0
    likes: int = 0
    comments: int = 0
    shares: int = 0
    polarized: int = 0


METRIC_COLUMNS = tuple(f.name for f in fields(PageMetrics) if f.name != "page_id")


def _reshared_objects(dataset: ActivityDataset) -> set[str]:
    pages_of = defaultdict(set)
    for post in dataset.posts:
        if post.object_id is not None:
            pages_of[post.object_id].add(post.page_id)
    return {obj for obj, pages in pages_of.items() if len(pages) >= 2}


def page_metrics(dataset: ActivityDataset, classification: UserClassification | None = None) -> list[PageMetrics]:
    """One row per page, in registry order.

    ``users`` counts distinct likers. ``shares`` counts the page's posts whose
    object id also appears on at least one other page.
    """
    reshared = _reshared_objects(dataset)
    polarized = classification.polarized_count_by_page() if classification is not None else {}
    rows = []
    for page_id in dataset.page_ids:
        posts = dataset.posts_by_page.get(page_id, [])
        rows.append(
            PageMetrics(
                page_id=page_id,
                users=len(dataset.likers_by_page.get(page_id, ())),
                posts=len(posts),
                likes=sum(dataset.like_count(p.post_id) for p in posts),
                comments=sum(dataset.comment_count(p.post_id) for p in posts),
                shares=sum(p.object_id in reshared for p in posts),
                polarized=polarized.get(page_id, 0),
            )
        )
    return rows


@dataclass
class CorrelationMatrix:
    columns: tuple[str, ...]
    values: np.ndarray  # nan marks an undefined cell

    def __getitem__(self, key: tuple[str, str]) -> float | None:
        i, j = (self.columns.index(k) for k in key)
        v = self.values[i, j]
        return None if np.isnan(v) else float(v)


def correlation_matrix(metrics: Sequence[PageMetrics], columns: Sequence[str] = METRIC_COLUMNS) -> CorrelationMatrix:
    if len(metrics) < 2:
        raise ValueError("correlation matrix needs at least two pages")
    unknown = [c for c in columns if c not in METRIC_COLUMNS]
    if unknown:
        raise ValueError(f"unknown metric column(s): {', '.join(unknown)}")
    vectors = [[getattr(row, c) for row in metrics] for c in columns]
    n = len(columns)
    out = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i, n):
            try:
                out[i, j] = out[j, i] = 1.0 if i == j and np.ptp(vectors[i]) > 0 else pearson(vectors[i], vectors[j])
            except CorrelationUndefined:
                pass
    return CorrelationMatrix(tuple(columns), out)


@dataclass(frozen=True)
class PostTypeBreakdown:
    totals: dict[str, int]  # measure -> total
    counts: dict[str, dict[str, int]]  # measure -> post_type -> count

    def fraction(self, measure: str, post_type: str) -> float | None:
        total = self.totals[measure]
        return self.counts[measure][post_type] / total if total else None


def post_type_breakdown(dataset: ActivityDataset) -> PostTypeBreakdown:
    counts = {m: dict.fromkeys(POST_TYPES, 0) for m in ("posts", "likes", "comments")}
    for post in dataset.posts:
        counts["posts"][post.post_type] += 1
        counts["likes"][post.post_type] += dataset.like_count(post.post_id)
        counts["comments"][post.post_type] += dataset.comment_count(post.post_id)
    return PostTypeBreakdown({m: sum(c.values()) for m, c in counts.items()}, counts)


@dataclass(frozen=True)
class AdminSplit:
    per_page: dict[str, tuple[int, int]]  # page -> (admin posts, non-admin posts)
    admin_post_likes: tuple[int, ...]
    non_admin_post_likes: tuple[int, ...]

    @property
    def admin_posts(self) -> int:
        return len(self.admin_post_likes)

    @property
    def total_posts(self) -> int:
        return len(self.admin_post_likes) + len(self.non_admin_post_likes)

    @property
    def admin_share(self) -> float | None:
        return self.admin_posts / self.total_posts if self.total_posts else None

    @property
    def admin_like_share(self) -> float | None:
        a, b = sum(self.admin_post_likes), sum(self.non_admin_post_likes)
        return a / (a + b) if a + b else None

    def page_correlation(self) -> float | None:
        """Pearson over pages of admin vs non-admin post counts, None if undefined."""
        if len(self.per_page) < 2:
            return None
        admin, other = zip(*self.per_page.values())
        try:
            return pearson(admin, other)
        except CorrelationUndefined:
            return None


def admin_split(dataset: ActivityDataset) -> AdminSplit:
    per_page = {pid: [0, 0] for pid in dataset.page_ids}
    admin_likes, other_likes = [], []
    for post in dataset.posts:
        n = dataset.like_count(post.post_id)
        if post.admin:
            per_page[post.page_id][0] += 1
            admin_likes.append(n)
        else:
            per_page[post.page_id][1] += 1
            other_likes.append(n)
    return AdminSplit({k: tuple(v) for k, v in per_page.items()}, tuple(admin_likes), tuple(other_likes))


# CSV writers


def fmt(value) -> str:
    """Deterministic text for a number; empty for an absent value."""
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def write_metrics(rows: Iterable[PageMetrics], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("page_id",) + METRIC_COLUMNS)
    for row in rows:
        writer.writerow(astuple(row))


def write_correlation_matrix(matrix: CorrelationMatrix, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("measure",) + matrix.columns)
    for name, row in zip(matrix.columns, matrix.values):
        writer.writerow([name] + [fmt(float(v)) for v in row])


def write_ccdf(samples: Sequence[float], stream: TextIO) -> None:
    """Write ``x,ccdf`` pairs; a header alone for an empty sample set."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x", "ccdf"])
    if len(samples) == 0:
        return
    xs, cs = empirical_ccdf(samples).ccdf_points()
    for x, c in zip(xs, cs):
        writer.writerow([fmt(int(x)) if float(x).is_integer() else fmt(float(x)), fmt(float(c))])


def write_post_types(breakdown: PostTypeBreakdown, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    measures = ("posts", "likes", "comments")
    writer.writerow(["post_type", *measures, *(f"{m}_fraction" for m in measures)])
    for t in POST_TYPES:
        writer.writerow(
            [t, *(breakdown.counts[m][t] for m in measures), *(fmt(breakdown.fraction(m, t)) for m in measures)]
        )


def write_admin_split(split: AdminSplit, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["page_id", "admin_posts", "non_admin_posts"])
    for page_id, (a, b) in split.per_page.items():
        writer.writerow([page_id, a, b])


def likes_per_post(dataset: ActivityDataset) -> list[int]:
    return [dataset.like_count(p.post_id) for p in dataset.posts]


def comments_per_post(dataset: ActivityDataset) -> list[int]:
    return [dataset.comment_count(p.post_id) for p in dataset.posts]


def column(rows: Sequence[PageMetrics], name: str) -> list[int]:
    return [getattr(r, name) for r in rows]

"""User categories: occasional / habitual, and polarization on a page."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, TextIO

from .ingest import ActivityDataset

OCCASIONAL = "occasional"
HABITUAL = "habitual"


@dataclass(frozen=True)
class ClassifyConfig:
    habitual_min_likes: int = 5
    polarization_fraction: float = 0.95

    def __post_init__(self):
        if isinstance(self.habitual_min_likes, bool) or not isinstance(self.habitual_min_likes, int):
            raise TypeError("habitual_min_likes must be an integer")
        if self.habitual_min_likes < 1:
            raise ValueError("habitual_min_likes must be positive")
        if not 0.5 < self.polarization_fraction <= 1.0:
            raise ValueError("polarization_fraction must lie in (0.5, 1]")

    @property
    def exact_fraction(self) -> Fraction:
        # "0.95" means 19/20, not the binary float just below it
        return Fraction(repr(float(self.polarization_fraction)))


@dataclass(frozen=True)
class UserStats:
    user_id: str
    total_likes: int
    likes_by_page: Mapping[str, int]
    category: str
    polarized_on: str | None = None


@dataclass(frozen=True)
class UserClassification:
    config: ClassifyConfig
    users: Mapping[str, UserStats] = field(default_factory=dict)

    def __len__(self):
        return len(self.users)

    def __getitem__(self, user_id: str) -> UserStats:
        return self.users[user_id]

    def polarized_users(self) -> list[str]:
        return sorted(u for u, s in self.users.items() if s.polarized_on is not None)

    def polarized_count_by_page(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.users.values():
            if s.polarized_on is not None:
                out[s.polarized_on] = out.get(s.polarized_on, 0) + 1
        return out


def classify_user(user_id: str, likes_by_page: Mapping[str, int], config: ClassifyConfig) -> UserStats:
    total = sum(likes_by_page.values())
    if total < config.habitual_min_likes:
        return UserStats(user_id, total, dict(likes_by_page), OCCASIONAL)
    frac = config.exact_fraction
    polarized_on = None
    for page, n in likes_by_page.items():
        if n * frac.denominator >= frac.numerator * total:
            polarized_on = page
            break
    return UserStats(user_id, total, dict(likes_by_page), HABITUAL, polarized_on)


def classify_users(dataset: ActivityDataset, config: ClassifyConfig | None = None) -> UserClassification:
    """Classify every user with at least one like.

    Shares are computed over distinct liked posts. Bounds are closed on both
    thresholds: ``total >= habitual_min_likes`` and ``share >= fraction``.
    """
    config = config or ClassifyConfig()
    users = {
        user: classify_user(user, per_page, config) for user, per_page in sorted(dataset.likes_by_user_page.items())
    }
    return UserClassification(config, users)


@dataclass(frozen=True)
class CategorySummary:
    active: int = 0
    habitual: int = 0
    occasional: int = 0
    polarized: int = 0
    polarized_likes: int = 0
    polarized_comments: int = 0
    total_likes: int = 0
    total_comments: int = 0

    @property
    def polarized_like_share(self) -> float | None:
        return self.polarized_likes / self.total_likes if self.total_likes else None

    @property
    def polarized_comment_share(self) -> float | None:
        return self.polarized_comments / self.total_comments if self.total_comments else None

    def to_dict(self) -> dict:
        return {
            "active": self.active,
            "habitual": self.habitual,
            "occasional": self.occasional,
            "polarized": self.polarized,
            "polarized_likes": self.polarized_likes,
            "polarized_comments": self.polarized_comments,
            "total_likes": self.total_likes,
            "total_comments": self.total_comments,
            "polarized_like_share": self.polarized_like_share,
            "polarized_comment_share": self.polarized_comment_share,
        }


def category_counts(classification: UserClassification, dataset: ActivityDataset) -> CategorySummary:
    users = classification.users.values()
    polarized = [s for s in users if s.polarized_on is not None]
    comments = dataset.comment_count_by_user
    return CategorySummary(
        active=len(classification.users),
        habitual=sum(s.category == HABITUAL for s in users),
        occasional=sum(s.category == OCCASIONAL for s in users),
        polarized=len(polarized),
        polarized_likes=sum(s.total_likes for s in polarized),
        polarized_comments=sum(comments.get(s.user_id, 0) for s in polarized),
        total_likes=len(dataset.likes),
        total_comments=len(dataset.comments),
    )


@dataclass(frozen=True)
class PageAudience:
    occasional: int = 0
    polarized_here: int = 0
    habitual_not_polarized: int = 0
    polarized_elsewhere: int = 0

    @property
    def total(self) -> int:
        return self.occasional + self.polarized_here + self.habitual_not_polarized + self.polarized_elsewhere


def page_audience(page_id: str, classification: UserClassification, dataset: ActivityDataset) -> PageAudience:
    """Split the users active on ``page_id`` (at least one like there) by category."""
    if page_id not in dataset.page_by_id:
        raise KeyError(f"unknown page_id {page_id!r}")
    counts = dict(occasional=0, polarized_here=0, habitual_not_polarized=0, polarized_elsewhere=0)
    for user in dataset.likers_by_page.get(page_id, ()):
        s = classification.users[user]
        if s.category == OCCASIONAL:
            counts["occasional"] += 1
        elif s.polarized_on is None:
            counts["habitual_not_polarized"] += 1
        elif s.polarized_on == page_id:
            counts["polarized_here"] += 1
        else:
            counts["polarized_elsewhere"] += 1
    return PageAudience(**counts)


@dataclass(frozen=True)
class PolarizedActivity:
    users: tuple[str, ...]
    likes: tuple[int, ...]
    comments: tuple[int, ...]

    @property
    def fraction_commented(self) -> float | None:
        if not self.users:
            return None
        return sum(c > 0 for c in self.comments) / len(self.users)


def polarized_activity_distributions(classification: UserClassification, dataset: ActivityDataset) -> PolarizedActivity:
    """Per polarized user: (likes, comments), ordered by user id."""
    users = classification.polarized_users()
    comments = dataset.comment_count_by_user
    return PolarizedActivity(
        users=tuple(users),
        likes=tuple(classification.users[u].total_likes for u in users),
        comments=tuple(comments.get(u, 0) for u in users),
    )


def write_classification(classification: UserClassification, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["user_id", "total_likes", "category", "polarized_on"])
    for user in sorted(classification.users):
        s = classification.users[user]
        writer.writerow([user, s.total_likes, s.category, s.polarized_on or ""])

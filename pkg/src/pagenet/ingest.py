"""Parsing, validation and indexing of page activity logs.

Pages come from a CSV registry (``page_id,name,lat,lon``); posts, likes and
comments come from line-delimited JSON, one record object per line.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, TextIO

logger = logging.getLogger(__name__)

POST_TYPES = ("photo", "status", "video", "link")
PAGE_HEADER = ["page_id", "name", "lat", "lon"]

POST_FIELDS = ("post_id", "page_id", "author_user_id", "timestamp", "post_type", "object_id", "is_admin")
POST_REQUIRED = ("post_id", "page_id", "author_user_id", "timestamp", "post_type")
REACTION_FIELDS = ("post_id", "user_id", "timestamp")


class IngestError(ValueError):
    """Base class for input problems."""


class ParseError(IngestError):
    def __init__(self, message: str, line: int | None = None, source: str = ""):
        self.line = line
        self.source = source
        where = f"{source or 'input'}:{line}: " if line is not None else ""
        super().__init__(where + message)


class IntegrityError(IngestError):
    """Duplicate identifiers or dangling references.

    ``offending`` holds the offending records (or identifiers) so callers can
    report all of them at once.
    """

    def __init__(self, message: str, offending: Iterable = ()):
        self.offending = list(offending)
        shown = ", ".join(map(str, self.offending[:10]))
        more = f" (+{len(self.offending) - 10} more)" if len(self.offending) > 10 else ""
        super().__init__(f"{message}: {shown}{more}" if self.offending else message)


class ValidationError(IngestError):
    """A field value outside its allowed domain."""


@dataclass(frozen=True)
class PageRecord:
    page_id: str
    name: str
    latitude: float
    longitude: float


@dataclass(frozen=True)
class PostRecord:
    post_id: str
    page_id: str
    author_user_id: str
    timestamp: float
    post_type: str
    object_id: str | None = None
    is_admin: bool | None = None

    @property
    def admin(self) -> bool:
        # explicit flag wins over the "authored by the page itself" sentinel
        if self.is_admin is not None:
            return self.is_admin
        return self.author_user_id == self.page_id


@dataclass(frozen=True)
class LikeRecord:
    post_id: str
    user_id: str
    timestamp: float


@dataclass(frozen=True)
class CommentRecord:
    post_id: str
    user_id: str
    timestamp: float


def _check_coordinates(lat: float, lon: float) -> None:
    if not -90.0 <= lat <= 90.0:
        raise ValidationError(f"latitude {lat} outside [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise ValidationError(f"longitude {lon} outside [-180, 180]")


@dataclass(frozen=True)
class ActivityDataset:
    """Immutable store of pages, posts, likes and comments.

    Likes are kept deduplicated per (user, post); comments keep every event.
    Construct through :func:`load_events` to get integrity checking; direct
    construction is allowed and :func:`validate` reports any problems.
    """

    pages: tuple[PageRecord, ...] = ()
    posts: tuple[PostRecord, ...] = ()
    likes: tuple[LikeRecord, ...] = ()
    comments: tuple[CommentRecord, ...] = ()

    # Indexes are derived lazily; the dataclass itself never changes.

    @cached_property
    def page_ids(self) -> tuple[str, ...]:
        return tuple(p.page_id for p in self.pages)

    @cached_property
    def page_by_id(self) -> dict[str, PageRecord]:
        return {p.page_id: p for p in self.pages}

    @cached_property
    def post_by_id(self) -> dict[str, PostRecord]:
        return {p.post_id: p for p in self.posts}

    @cached_property
    def posts_by_page(self) -> dict[str, list[PostRecord]]:
        out: dict[str, list[PostRecord]] = {pid: [] for pid in self.page_ids}
        for post in self.posts:
            out.setdefault(post.page_id, []).append(post)
        return out

    @cached_property
    def likers_by_post(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = defaultdict(set)
        for like in self.likes:
            out[like.post_id].add(like.user_id)
        return dict(out)

    @cached_property
    def like_count_by_post(self) -> Counter:
        return Counter({pid: len(users) for pid, users in self.likers_by_post.items()})

    @cached_property
    def comment_count_by_post(self) -> Counter:
        return Counter(c.post_id for c in self.comments)

    @cached_property
    def likes_by_user_page(self) -> dict[str, Counter]:
        """user -> page -> number of distinct posts liked on that page."""
        out: dict[str, Counter] = defaultdict(Counter)
        pages = {pid: post.page_id for pid, post in self.post_by_id.items()}
        for post_id, users in self.likers_by_post.items():
            page = pages.get(post_id)
            for user in users:
                out[user][page] += 1
        return dict(out)

    @cached_property
    def comment_count_by_user(self) -> Counter:
        return Counter(c.user_id for c in self.comments)

    @cached_property
    def likers_by_page(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {pid: set() for pid in self.page_ids}
        for user, per_page in self.likes_by_user_page.items():
            for page in per_page:
                out.setdefault(page, set()).add(user)
        return out

    def like_count(self, post_id: str) -> int:
        return self.like_count_by_post.get(post_id, 0)

    def comment_count(self, post_id: str) -> int:
        return self.comment_count_by_post.get(post_id, 0)


def load_pages(stream: TextIO, source: str = "pages") -> list[PageRecord]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing header `page_id,name,lat,lon`", 1, source) from None
    if [h.strip() for h in header] != PAGE_HEADER:
        raise ParseError(f"expected header {','.join(PAGE_HEADER)}, got {','.join(header)}", 1, source)

    pages: list[PageRecord] = []
    seen: set[str] = set()
    for row in reader:
        lineno = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno, source)
        page_id, name, lat_s, lon_s = (cell.strip() for cell in row)
        if not page_id:
            raise ParseError("empty page_id", lineno, source)
        try:
            lat, lon = float(lat_s), float(lon_s)
        except ValueError:
            raise ParseError(f"non-numeric coordinates {lat_s!r}, {lon_s!r}", lineno, source) from None
        try:
            _check_coordinates(lat, lon)
        except ValidationError as exc:
            raise ValidationError(f"{source}:{lineno}: page {page_id}: {exc}") from None
        if page_id in seen:
            raise IntegrityError(f"{source}:{lineno}: duplicate page_id", [page_id])
        seen.add(page_id)
        pages.append(PageRecord(page_id, name, lat, lon))
    return pages


def _records(stream: TextIO, source: str, allowed: tuple[str, ...], required: tuple[str, ...]):
    warned: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", lineno, source) from None
        if not isinstance(obj, dict):
            raise ParseError("record is not an object", lineno, source)
        missing = [k for k in required if obj.get(k) is None]
        if missing:
            raise ParseError(f"missing field(s) {', '.join(missing)}", lineno, source)
        for key in obj.keys() - set(allowed) - warned:
            logger.warning("%s: ignoring unknown field %r", source, key)
            warned.add(key)
        yield lineno, obj


def _timestamp(value, lineno: int, source: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ParseError(f"bad timestamp {value!r}", lineno, source) from None
    return value


def _parse_posts(stream: TextIO) -> list[PostRecord]:
    posts = []
    for lineno, obj in _records(stream, "posts", POST_FIELDS, POST_REQUIRED):
        post_type = str(obj["post_type"])
        if post_type not in POST_TYPES:
            raise ValidationError(f"posts:{lineno}: unknown post_type {post_type!r} (expected one of {POST_TYPES})")
        is_admin = obj.get("is_admin")
        if is_admin is not None and not isinstance(is_admin, bool):
            raise ParseError(f"is_admin must be a boolean, got {is_admin!r}", lineno, "posts")
        object_id = obj.get("object_id")
        posts.append(
            PostRecord(
                post_id=str(obj["post_id"]),
                page_id=str(obj["page_id"]),
                author_user_id=str(obj["author_user_id"]),
                timestamp=_timestamp(obj["timestamp"], lineno, "posts"),
                post_type=post_type,
                object_id=None if object_id in (None, "") else str(object_id),
                is_admin=is_admin,
            )
        )
    return posts


def _parse_reactions(stream: TextIO, source: str, cls):
    return [
        cls(str(obj["post_id"]), str(obj["user_id"]), _timestamp(obj["timestamp"], lineno, source))
        for lineno, obj in _records(stream, source, REACTION_FIELDS, REACTION_FIELDS)
    ]


def dedup_likes(likes: Iterable[LikeRecord]) -> list[LikeRecord]:
    """Keep one like per (user, post): the earliest, ties by input order."""
    best: dict[tuple[str, str], LikeRecord] = {}
    for like in likes:
        key = (like.user_id, like.post_id)
        kept = best.get(key)
        if kept is None or like.timestamp < kept.timestamp:
            best[key] = like
    return list(best.values())


def load_events(
    pages: Iterable[PageRecord],
    posts_stream: TextIO,
    likes_stream: TextIO,
    comments_stream: TextIO,
) -> ActivityDataset:
    pages = tuple(pages)
    page_ids = {p.page_id for p in pages}
    posts = _parse_posts(posts_stream)
    likes = _parse_reactions(likes_stream, "likes", LikeRecord)
    comments = _parse_reactions(comments_stream, "comments", CommentRecord)

    counts = Counter(p.post_id for p in posts)
    dupes = sorted(pid for pid, n in counts.items() if n > 1)
    if dupes:
        raise IntegrityError("duplicate post_id", dupes)
    dangling_posts = [p for p in posts if p.page_id not in page_ids]
    if dangling_posts:
        raise IntegrityError("posts reference unknown page_id", dangling_posts)
    post_ids = set(counts)
    dangling = [r for r in (*likes, *comments) if r.post_id not in post_ids]
    if dangling:
        raise IntegrityError("likes/comments reference unknown post_id", dangling)

    return ActivityDataset(pages, tuple(posts), tuple(dedup_likes(likes)), tuple(comments))


def load_dataset(pages_path, posts_path, likes_path, comments_path) -> ActivityDataset:
    with open(pages_path, newline="", encoding="utf-8") as fh:
        pages = load_pages(fh, str(pages_path))
    with open(posts_path, encoding="utf-8") as fp, open(likes_path, encoding="utf-8") as fl, open(
        comments_path, encoding="utf-8"
    ) as fc:
        return load_events(pages, fp, fl, fc)


@dataclass
class ValidationReport:
    counts: dict[str, int] = field(default_factory=dict)
    posts_with_object_id: int = 0
    admin_posts: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def object_id_coverage(self) -> float | None:
        total = self.counts.get("posts", 0)
        return self.posts_with_object_id / total if total else None

    @property
    def admin_share(self) -> float | None:
        total = self.counts.get("posts", 0)
        return self.admin_posts / total if total else None

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "posts_with_object_id": self.posts_with_object_id,
            "object_id_coverage": self.object_id_coverage,
            "admin_posts": self.admin_posts,
            "admin_share": self.admin_share,
            "errors": list(self.errors),
        }


def validate(dataset: ActivityDataset) -> ValidationReport:
    report = ValidationReport(
        counts={
            "pages": len(dataset.pages),
            "posts": len(dataset.posts),
            "likes": len(dataset.likes),
            "comments": len(dataset.comments),
        },
        posts_with_object_id=sum(p.object_id is not None for p in dataset.posts),
        admin_posts=sum(p.admin for p in dataset.posts),
    )
    err = report.errors

    page_counts = Counter(p.page_id for p in dataset.pages)
    for pid, n in sorted(page_counts.items()):
        if n > 1:
            err.append(f"duplicate page_id {pid} ({n} records)")
    for page in dataset.pages:
        try:
            _check_coordinates(page.latitude, page.longitude)
        except ValidationError as exc:
            err.append(f"page {page.page_id}: {exc}")

    post_counts = Counter(p.post_id for p in dataset.posts)
    for pid, n in sorted(post_counts.items()):
        if n > 1:
            err.append(f"duplicate post_id {pid} ({n} records)")
    for post in dataset.posts:
        if post.page_id not in page_counts:
            err.append(f"post {post.post_id} references unknown page {post.page_id}")
        if post.post_type not in POST_TYPES:
            err.append(f"post {post.post_id} has unknown post_type {post.post_type!r}")

    like_pairs = Counter((l.user_id, l.post_id) for l in dataset.likes)
    for (user, post), n in sorted(like_pairs.items()):
        if n > 1:
            err.append(f"user {user} likes post {post} {n} times")
    for kind, records in (("like", dataset.likes), ("comment", dataset.comments)):
        for rec in records:
            if rec.post_id not in post_counts:
                err.append(f"{kind} by {rec.user_id} references unknown post {rec.post_id}")
    return report


# Serialization back to the interchange formats.


def _ts(value: float):
    return int(value) if float(value).is_integer() else value


def dump_pages(pages: Iterable[PageRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PAGE_HEADER)
    for p in pages:
        writer.writerow([p.page_id, p.name, repr(p.latitude), repr(p.longitude)])


def post_to_dict(post: PostRecord) -> dict:
    obj = {
        "post_id": post.post_id,
        "page_id": post.page_id,
        "author_user_id": post.author_user_id,
        "timestamp": _ts(post.timestamp),
        "post_type": post.post_type,
    }
    if post.object_id is not None:
        obj["object_id"] = post.object_id
    if post.is_admin is not None:
        obj["is_admin"] = post.is_admin
    return obj


def _write_jsonl(objs: Iterable[Mapping], stream: TextIO) -> None:
    for obj in objs:
        stream.write(json.dumps(obj, separators=(",", ":")))
        stream.write("\n")


def dump_events(dataset: ActivityDataset, posts: TextIO, likes: TextIO, comments: TextIO) -> None:
    _write_jsonl((post_to_dict(p) for p in dataset.posts), posts)
    for records, stream in ((dataset.likes, likes), (dataset.comments, comments)):
        _write_jsonl(
            ({"post_id": r.post_id, "user_id": r.user_id, "timestamp": _ts(r.timestamp)} for r in records), stream
        )


def roundtrip(dataset: ActivityDataset) -> ActivityDataset:
    """Serialize and reload ``dataset`` in memory."""
    pg, po, li, co = (io.StringIO() for _ in range(4))
    dump_pages(dataset.pages, pg)
    dump_events(dataset, po, li, co)
    for buf in (pg, po, li, co):
        buf.seek(0)
    return load_events(load_pages(pg), po, li, co)

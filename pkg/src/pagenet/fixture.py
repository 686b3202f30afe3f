"""Synthetic activity logs with heavy-tailed user activity and hub pages.

The bundled fixture under ``pagenet/data/fixture`` was produced with
``python -m pagenet.fixture src/pagenet/data/fixture`` and is committed, so
tests never depend on the generator's random stream staying stable.
"""

from __future__ import annotations

import argparse
import io
import json
from pathlib import Path

import numpy as np

from . import ingest
from .ingest import ActivityDataset, CommentRecord, LikeRecord, PageRecord, PostRecord

FIXTURE_DIR = Path(__file__).parent / "data" / "fixture"

HUBS = [
    ("New York", 40.71, -74.01),
    ("Los Angeles", 34.05, -118.24),
    ("Chicago", 41.88, -87.63),
    ("Boston", 42.36, -71.06),
    ("Portland", 45.52, -122.68),
]

POST_TYPE_WEIGHTS = {"photo": 0.19, "status": 0.38, "video": 0.08, "link": 0.35}
# relative attention a post gets when users pick what to like
TYPE_APPEAL = {"photo": 4.0, "status": 0.8, "video": 1.0, "link": 1.0}
ADMIN_APPEAL = 30.0

START, END = 1315872000, 1362095999  # 2011-09-13 .. 2013-02-28


def generate(
    seed: int = 20110917,
    n_pages: int = 50,
    n_users: int = 5000,
    n_hubs: int = 5,
    hub_factor: float = 10.0,
    posts_per_page: int = 40,
    n_objects: int = 260,
) -> ActivityDataset:
    rng = np.random.default_rng(seed)

    pages = []
    for i in range(n_pages):
        if i < n_hubs:
            name, lat, lon = HUBS[i % len(HUBS)]
            name = f"Occupy {name}"
        else:
            name = f"Occupy Town {i:02d}"
            lat = round(float(rng.uniform(26.0, 48.5)), 2)
            lon = round(float(rng.uniform(-123.0, -70.0)), 2)
        pages.append(PageRecord(f"pg{i:02d}", name, lat, lon))
    page_ids = [p.page_id for p in pages]
    popularity = np.array([hub_factor if i < n_hubs else 1.0 for i in range(n_pages)])
    popularity *= rng.lognormal(0.0, 0.3, n_pages)
    pop_p = popularity / popularity.sum()

    users = [f"u{j:05d}" for j in range(n_users)]
    types = list(POST_TYPE_WEIGHTS)
    type_p = np.array(list(POST_TYPE_WEIGHTS.values()))

    posts: list[PostRecord] = []

    def add_post(page: str, object_id: str | None = None) -> None:
        kind = types[rng.choice(len(types), p=type_p)]
        admin = rng.random() < 0.27
        if admin:
            author = page
            flag = True if rng.random() < 0.2 else None
        else:
            author = users[rng.integers(n_users)]
            flag = False if rng.random() < 0.2 else None
        posts.append(
            PostRecord(
                post_id=f"m{len(posts):06d}",
                page_id=page,
                author_user_id=author,
                timestamp=int(rng.integers(START, END)),
                post_type=kind,
                object_id=object_id,
                is_admin=flag,
            )
        )

    for i, page in enumerate(page_ids):
        for _ in range(max(2, int(round(posts_per_page * popularity[i])))):
            add_post(page)

    # reshared objects: copies land mostly on hubs
    for o in range(n_objects):
        n_copies = min(n_pages, 1 + int(rng.geometric(0.45)))
        chosen = rng.choice(n_pages, size=n_copies, replace=False, p=pop_p)
        for i in sorted(chosen):
            add_post(page_ids[i], f"o{o:04d}")

    by_page: dict[str, list[int]] = {p: [] for p in page_ids}
    for idx, post in enumerate(posts):
        by_page[post.page_id].append(idx)
    appeal = np.array(
        [TYPE_APPEAL[p.post_type] * (ADMIN_APPEAL if p.admin else 1.0) for p in posts]
    ) * rng.lognormal(0.0, 1.0, len(posts))

    def pick_posts(page: str, n: int) -> list[int]:
        idx = np.array(by_page[page])
        n = min(n, len(idx))
        w = appeal[idx] / appeal[idx].sum()
        return [int(k) for k in rng.choice(idx, size=n, replace=False, p=w)]

    likes: list[LikeRecord] = []
    comments: list[CommentRecord] = []
    for user in users:
        n = min(int(rng.pareto(1.0)) + 1, 600)
        home = page_ids[rng.choice(n_pages, p=pop_p)]
        loyal = n >= 5 and rng.random() < 0.55
        if loyal:
            per_page = {home: n}
            if n >= 20:
                # stray likes elsewhere, kept under the 5% allowance
                for _ in range(int(rng.integers(1, n // 20 + 1))):
                    other = page_ids[rng.choice(n_pages, p=pop_p)]
                    if other != home:
                        per_page[home] -= 1
                        per_page[other] = per_page.get(other, 0) + 1
        else:
            per_page = {}
            for _ in range(n):
                page = home if rng.random() < 0.5 else page_ids[rng.choice(n_pages, p=pop_p)]
                per_page[page] = per_page.get(page, 0) + 1
        liked = []
        for page, k in per_page.items():
            liked.extend(pick_posts(page, k))
        for k in liked:
            ts = int(posts[k].timestamp + rng.integers(0, 86400 * 3))
            likes.append(LikeRecord(posts[k].post_id, user, ts))
            if rng.random() < 0.01:
                likes.append(LikeRecord(posts[k].post_id, user, ts + 60))  # duplicate click
        if rng.random() < 0.22:
            n_comments = min(int(rng.pareto(1.0)) + 1, 300)
            pool = liked or pick_posts(home, 3)
            for k in rng.choice(pool, size=n_comments, replace=True):
                comments.append(CommentRecord(posts[k].post_id, user, int(posts[k].timestamp + rng.integers(0, 86400))))

    # a few commenters who never like anything
    for j in range(n_users // 100):
        k = int(rng.integers(len(posts)))
        comments.append(CommentRecord(posts[k].post_id, f"c{j:04d}", int(posts[k].timestamp + 10)))

    likes.sort(key=lambda r: (r.timestamp, r.user_id, r.post_id))
    comments.sort(key=lambda r: (r.timestamp, r.user_id, r.post_id))
    return ActivityDataset(tuple(pages), tuple(posts), tuple(likes), tuple(comments))


def write(dataset: ActivityDataset, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "pages.csv", "w", encoding="utf-8", newline="") as fh:
        ingest.dump_pages(dataset.pages, fh)
    posts, likes, comments = io.StringIO(), io.StringIO(), io.StringIO()
    # dump raw likes, duplicates included
    raw = ActivityDataset(dataset.pages, dataset.posts, (), dataset.comments)
    ingest.dump_events(raw, posts, io.StringIO(), comments)
    for like in dataset.likes:
        likes.write(json.dumps({"post_id": like.post_id, "user_id": like.user_id, "timestamp": int(like.timestamp)}, separators=(",", ":")))
        likes.write("\n")
    for name, buf in (("posts.jsonl", posts), ("likes.jsonl", likes), ("comments.jsonl", comments)):
        (directory / name).write_text(buf.getvalue(), encoding="utf-8")
    (directory / "pipeline.ini").write_text(
        "[inputs]\n"
        "pages = pages.csv\n"
        "posts = posts.jsonl\n"
        "likes = likes.jsonl\n"
        "comments = comments.jsonl\n"
        "\n[classify]\n"
        "habitual_min_likes = 5\n"
        "polarization_fraction = 0.95\n"
        "\n[backbone]\n"
        "alpha = 0.01, 0.05\n",
        encoding="utf-8",
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description="Write the synthetic activity fixture.")
    parser.add_argument("directory", type=Path, nargs="?", default=FIXTURE_DIR)
    parser.add_argument("--seed", type=int, default=20110917)
    parser.add_argument("--users", type=int, default=5000)
    parser.add_argument("--pages", type=int, default=50)
    args = parser.parse_args(argv)
    write(generate(seed=args.seed, n_users=args.users, n_pages=args.pages), args.directory)


if __name__ == "__main__":
    main()

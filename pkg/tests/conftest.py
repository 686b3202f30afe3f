import io
import json

import pytest

from pagenet.ingest import ActivityDataset, CommentRecord, LikeRecord, PageRecord, PostRecord, load_events, load_pages


def make_dataset(pages, posts=(), likes=(), comments=()):
    """Build a dataset from compact tuples.

    pages:    page ids (coordinates are filled in)
    posts:    (post_id, page_id[, post_type[, object_id[, admin[, timestamp]]]])
    likes:    (user_id, post_id)
    comments: (user_id, post_id)
    """
    page_recs = tuple(PageRecord(p, f"Page {p}", 40.0 + i * 0.1, -100.0 + i * 0.1) for i, p in enumerate(pages))
    post_recs = []
    for i, row in enumerate(posts):
        post_id, page_id, *rest = row
        post_type = rest[0] if len(rest) > 0 else "status"
        object_id = rest[1] if len(rest) > 1 else None
        admin = rest[2] if len(rest) > 2 else False
        ts = rest[3] if len(rest) > 3 else i
        author = page_id if admin else f"author{i}"
        post_recs.append(PostRecord(post_id, page_id, author, ts, post_type, object_id))
    like_recs = tuple(LikeRecord(p, u, 0) for u, p in likes)
    comment_recs = tuple(CommentRecord(p, u, 0) for u, p in comments)
    return ActivityDataset(page_recs, tuple(post_recs), like_recs, comment_recs)


def jsonl(*objs):
    return io.StringIO("".join(json.dumps(o) + "\n" for o in objs))


def pages_csv(*lines):
    return io.StringIO("page_id,name,lat,lon\n" + "".join(l + "\n" for l in lines))


@pytest.fixture
def one_page():
    return load_pages(pages_csv("p1,Occupy Testville,40.71,-74.00"))


@pytest.fixture
def tiny_events(one_page):
    def build(posts=(), likes=(), comments=()):
        return load_events(one_page, jsonl(*posts), jsonl(*likes), jsonl(*comments))

    return build


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome == "failed":
        if _acceptance.get(crit) != "FAIL":
            _acceptance[crit] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_acceptance, key=lambda c: int(c.split(".")[0])):
        terminalreporter.write_line(f"{_acceptance[crit]}  {crit}")

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagenet.classify import (
    HABITUAL,
    OCCASIONAL,
    ClassifyConfig,
    category_counts,
    classify_users,
    page_audience,
    polarized_activity_distributions,
    write_classification,
)
from pagenet.ingest import ActivityDataset

from conftest import make_dataset
from oracles import brute_force_categories


def dataset_from_counts(user_pages):
    """user_pages: {user: {page: n_likes}}; each like goes to a fresh post."""
    pages = sorted({p for per in user_pages.values() for p in per})
    n_posts = {p: max((per.get(p, 0) for per in user_pages.values()), default=0) for p in pages}
    posts = [(f"{p}-{i}", p) for p in pages for i in range(n_posts[p])]
    likes = [(u, f"{p}-{i}") for u, per in user_pages.items() for p, n in per.items() for i in range(n)]
    return make_dataset(pages, posts, likes)


class TestConfig:
    def test_defaults(self):
        c = ClassifyConfig()
        assert (c.habitual_min_likes, c.polarization_fraction) == (5, 0.95)

    @pytest.mark.parametrize("frac", [0.5, 0.3, 1.01, 0.0])
    def test_fraction_bounds(self, frac):
        with pytest.raises(ValueError):
            ClassifyConfig(polarization_fraction=frac)

    @pytest.mark.parametrize("n", [0, -3])
    def test_min_likes_positive(self, n):
        with pytest.raises(ValueError):
            ClassifyConfig(habitual_min_likes=n)


class TestClassifyUsers:
    def test_four_likes_is_occasional(self):
        u = classify_users(dataset_from_counts({"u": {"P": 4}}))["u"]
        assert u.category == OCCASIONAL
        assert u.polarized_on is None

    def test_share_exactly_095_is_polarized(self):
        u = classify_users(dataset_from_counts({"u": {"P": 19, "Q": 1}}))["u"]
        assert (u.total_likes, u.category, u.polarized_on) == (20, HABITUAL, "P")

    def test_share_just_below(self):
        u = classify_users(dataset_from_counts({"u": {"P": 18, "Q": 1}}))["u"]
        assert u.category == HABITUAL
        assert u.polarized_on is None

    def test_even_split_not_polarized(self):
        u = classify_users(dataset_from_counts({"u": {"P": 5, "Q": 5}}))["u"]
        assert u.category == HABITUAL
        assert u.polarized_on is None

    def test_share_over_distinct_posts(self):
        # five likes on one post collapse into one
        ds = make_dataset(["P"], [("m", "P")], [("u", "m")] * 5)
        assert classify_users(ds)["u"].total_likes == 1

    def test_commenters_without_likes_excluded(self):
        ds = make_dataset(["P"], [("m", "P")], [("a", "m")], [("b", "m")])
        assert set(classify_users(ds).users) == {"a"}


class TestCategoryCounts:
    def test_three_users(self):
        ds = dataset_from_counts({"a": {"P": 1}, "b": {"P": 6}, "c": {"P": 3, "Q": 3}})
        s = category_counts(classify_users(ds), ds)
        assert (s.active, s.occasional, s.habitual, s.polarized) == (3, 1, 2, 1)

    def test_empty(self):
        s = category_counts(classify_users(ActivityDataset()), ActivityDataset())
        assert (s.active, s.occasional, s.habitual, s.polarized) == (0, 0, 0, 0)
        assert s.polarized_like_share is None

    def test_boundary_all_polarized(self):
        ds = dataset_from_counts({f"u{i}": {"P": 5} for i in range(4)})
        s = category_counts(classify_users(ds), ds)
        assert s.polarized == s.active == 4

    def test_polarized_shares(self):
        ds = dataset_from_counts({"a": {"P": 1}, "b": {"P": 6}})
        ds = ActivityDataset(ds.pages, ds.posts, ds.likes, ds.comments)
        s = category_counts(classify_users(ds), ds)
        assert s.polarized_likes == 6
        assert s.polarized_like_share == 6 / 7


class TestPageAudience:
    def test_polarized_here_and_elsewhere(self):
        ds = dataset_from_counts({"u": {"P": 19, "Q": 1}})
        c = classify_users(ds)
        assert page_audience("P", c, ds).polarized_here == 1
        q = page_audience("Q", c, ds)
        assert q.polarized_elsewhere == 1
        assert q.total == 1

    def test_page_without_likes(self):
        ds = make_dataset(["P", "Q"], [("m", "P")], [("u", "m")])
        a = page_audience("Q", classify_users(ds), ds)
        assert (a.occasional, a.polarized_here, a.habitual_not_polarized, a.polarized_elsewhere) == (0, 0, 0, 0)

    def test_five_occasional(self):
        ds = make_dataset(["P"], [("m", "P")], [(f"u{i}", "m") for i in range(5)])
        a = page_audience("P", classify_users(ds), ds)
        assert (a.occasional, a.polarized_here, a.habitual_not_polarized, a.polarized_elsewhere) == (5, 0, 0, 0)

    def test_unknown_page(self):
        ds = make_dataset(["P"])
        with pytest.raises(KeyError):
            page_audience("Z", classify_users(ds), ds)


class TestPolarizedActivity:
    def test_fraction_commented(self):
        ds = dataset_from_counts({"a": {"P": 5}, "b": {"P": 5}})
        ds = ActivityDataset(ds.pages, ds.posts, ds.likes, make_dataset(["P"], [], [], [("a", "P-0")] * 3).comments)
        act = polarized_activity_distributions(classify_users(ds), ds)
        assert act.fraction_commented == 0.5
        assert list(zip(act.likes, act.comments)) == [(5, 3), (5, 0)]

    def test_no_polarized(self):
        ds = dataset_from_counts({"a": {"P": 1}})
        act = polarized_activity_distributions(classify_users(ds), ds)
        assert act.likes == () and act.comments == ()
        assert act.fraction_commented is None

    def test_pair(self):
        ds = dataset_from_counts({"a": {"P": 7}})
        comments = make_dataset(["P"], [], [], [("a", "P-1"), ("a", "P-2")]).comments
        ds = ActivityDataset(ds.pages, ds.posts, ds.likes, comments)
        act = polarized_activity_distributions(classify_users(ds), ds)
        assert (act.likes, act.comments) == ((7,), (2,))


def test_export_csv():
    ds = dataset_from_counts({"b": {"P": 6}, "a": {"P": 1}})
    buf = io.StringIO()
    write_classification(classify_users(ds), buf)
    assert buf.getvalue().splitlines() == [
        "user_id,total_likes,category,polarized_on",
        "a,1,occasional,",
        "b,6,habitual,P",
    ]


user_patterns = st.dictionaries(
    st.sampled_from([f"u{i}" for i in range(12)]),
    st.dictionaries(st.sampled_from("PQRS"), st.integers(1, 25), min_size=1, max_size=4),
    max_size=12,
)


@settings(max_examples=80, deadline=None)
@given(user_patterns, st.integers(1, 10), st.sampled_from([0.51, 0.6, 0.75, 0.9, 0.95, 1.0]))
def test_properties(patterns, min_likes, fraction):
    ds = dataset_from_counts(patterns)
    c = classify_users(ds, ClassifyConfig(min_likes, fraction))
    # partition
    occ = {u for u, s in c.users.items() if s.category == OCCASIONAL}
    hab = {u for u, s in c.users.items() if s.category == HABITUAL}
    assert occ | hab == set(patterns) and not occ & hab
    for u, s in c.users.items():
        assert s.total_likes == sum(patterns[u].values())
        qualifying = [p for p, n in s.likes_by_page.items() if n >= fraction * s.total_likes - 1e-9]
        if s.polarized_on is not None:
            assert s.category == HABITUAL
            assert qualifying == [s.polarized_on]
        elif s.category == HABITUAL:
            assert len(qualifying) <= 1
    # monotone in both thresholds
    stricter = category_counts(classify_users(ds, ClassifyConfig(min_likes + 1, fraction)), ds)
    base = category_counts(c, ds)
    assert stricter.habitual <= base.habitual
    if fraction < 1.0:
        tighter = category_counts(classify_users(ds, ClassifyConfig(min_likes, min(1.0, fraction + 0.04))), ds)
        assert tighter.polarized <= base.polarized


@settings(max_examples=40, deadline=None)
@given(user_patterns)
def test_matches_brute_force(patterns):
    ds = dataset_from_counts(patterns)
    triples = [(l.user_id, l.post_id, ds.post_by_id[l.post_id].page_id) for l in ds.likes]
    expected = brute_force_categories(triples)
    got = {u: (s.total_likes, s.category, s.polarized_on) for u, s in classify_users(ds).users.items()}
    assert got == expected

import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagenet.classify import classify_users
from pagenet.graph import (
    BipartiteGraph,
    WeightedGraph,
    build_pages_polarized,
    build_pages_posts,
    project,
    read_edge_list,
    reshare_classes,
    write_edge_list,
)

from conftest import make_dataset
from oracles import dense_projection


class TestReshareClasses:
    def test_grouping(self):
        ds = make_dataset(["P"], [("a", "P", "link", "o1"), ("b", "P", "link", "o1"), ("c", "P", "link", "o2")])
        assert [len(c.members) for c in reshare_classes(ds.posts)] == [2, 1]

    def test_no_object_ids(self):
        ds = make_dataset(["P"], [("a", "P"), ("b", "P")])
        assert reshare_classes(ds.posts) == []

    def test_earliest_representative(self):
        ds = make_dataset(["P"], [("postA", "P", "link", "o", False, 5), ("postB", "P", "link", "o", False, 3)])
        assert reshare_classes(ds.posts)[0].representative == "postB"

    def test_tie_by_post_id(self):
        ds = make_dataset(["P"], [("z", "P", "link", "o", False, 1), ("y", "P", "link", "o", False, 1)])
        assert reshare_classes(ds.posts)[0].representative == "y"


class TestPagesPosts:
    def test_class_on_two_pages(self):
        ds = make_dataset(["P", "Q"], [("a", "P", "link", "o1"), ("b", "Q", "link", "o1")])
        g = build_pages_posts(ds)
        assert g.right_adj["a"] == {"P", "Q"}

    def test_same_page_twice_single_edge(self):
        ds = make_dataset(["P"], [("a", "P", "link", "o1"), ("b", "P", "link", "o1")])
        assert build_pages_posts(ds).edges == [("P", "a")]

    def test_three_objects_two_pages_each(self):
        posts = [
            ("x1", "P", "link", "o1"), ("x2", "Q", "link", "o1"),
            ("y1", "Q", "link", "o2"), ("y2", "R", "link", "o2"),
            ("z1", "P", "link", "o3"), ("z2", "R", "link", "o3"),
        ]
        ds = make_dataset(["P", "Q", "R"], posts)
        g = build_pages_posts(ds)
        brute = {(p.page_id, rep) for rep, obj in (("x1", "o1"), ("y1", "o2"), ("z1", "o3")) for p in ds.posts if p.object_id == obj}
        assert set(g.edges) == brute
        assert g.number_of_edges() == 6

    def test_posts_without_object_id_excluded(self):
        ds = make_dataset(["P"], [("a", "P"), ("b", "P", "link", "o1")])
        assert build_pages_posts(ds).right == ("b",)


def polarized_dataset():
    # u polarized on P (19 of 20) with one like on Q; v polarized on Q only; w not polarized
    posts = [(f"P{i}", "P") for i in range(20)] + [(f"Q{i}", "Q") for i in range(10)] + [("R0", "R")]
    likes = [("u", f"P{i}") for i in range(19)] + [("u", "Q0")]
    likes += [("v", f"Q{i}") for i in range(6)]
    likes += [("w", "P0"), ("w", "Q1"), ("w", "R0"), ("w", "Q2"), ("w", "P1")]
    return make_dataset(["P", "Q", "R"], posts, likes)


class TestPagesPolarized:
    def test_edges(self):
        ds = polarized_dataset()
        g = build_pages_polarized(ds, classify_users(ds))
        assert g.right == ("u", "v")
        assert g.right_adj["u"] == {"P", "Q"}
        assert g.right_adj["v"] == {"Q"}

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 11)), max_size=80))
    def test_brute_force_scan(self, pairs):
        posts = [(f"m{k}", "PQR"[k % 3 if k < 9 else 0]) for k in range(12)]
        ds = make_dataset(["P", "Q", "R"], posts, [(f"u{u}", f"m{k}") for u, k in pairs])
        c = classify_users(ds)
        g = build_pages_polarized(ds, c)
        polarized = set(c.polarized_users())
        expected = {(ds.post_by_id[l.post_id].page_id, l.user_id) for l in ds.likes if l.user_id in polarized}
        assert set(g.edges) == expected
        for u in polarized:
            assert g.degree(u, "right") >= 1
            assert c[u].polarized_on in g.right_adj[u]


class TestProject:
    def test_single_shared_neighbour(self):
        g = BipartiteGraph(["a1", "a2"], ["b1"], [("a1", "b1"), ("a2", "b1")])
        assert project(g).weights == {("a1", "a2"): 1}

    def test_incidence_example(self):
        edges = [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"), ("a3", "b2")]
        g = BipartiteGraph(["a1", "a2", "a3"], ["b1", "b2"], edges)
        expected = {("a1", "a2"): 2, ("a1", "a3"): 1, ("a2", "a3"): 1}
        assert dense_projection(g.left, g.right, edges) == expected
        assert project(g).weights == expected

    def test_disconnected(self):
        g = BipartiteGraph(["a1", "a2"], ["b1", "b2"], [("a1", "b1"), ("a2", "b2")])
        assert len(project(g)) == 0

    def test_right_side(self):
        g = BipartiteGraph(["a1"], ["b1", "b2", "b3"], [("a1", "b1"), ("a1", "b3")])
        assert project(g, "right").weights == {("b1", "b3"): 1}

    def test_bad_side(self):
        with pytest.raises(ValueError):
            project(BipartiteGraph([], [], []), "middle")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 20), st.integers(1, 20), st.floats(0.05, 0.6), st.integers(0, 2**32 - 1))
    def test_properties(self, n_a, n_b, density, seed):
        rng = random.Random(seed)
        left = [f"a{i:02d}" for i in range(n_a)]
        right = [f"b{j:02d}" for j in range(n_b)]
        edges = [(a, b) for a in left for b in right if rng.random() < density]
        g = BipartiteGraph(left, right, edges)
        w = project(g)
        assert dict(w.weights) == dense_projection(left, right, edges)
        for (u, v), x in w.weights.items():
            assert u < v and x >= 1
            assert w.weight(u, v) == w.weight(v, u) == x
            assert x <= min(g.degree(u), g.degree(v))


class TestWeightedGraph:
    def test_rejects_self_loop_and_zero(self):
        with pytest.raises(ValueError):
            WeightedGraph.from_edges([("a", "a", 1)])
        with pytest.raises(ValueError):
            WeightedGraph.from_edges([("a", "b", 0)])
        with pytest.raises(ValueError):
            WeightedGraph(("a", "b"), {("b", "a"): 1})

    def test_edge_list_roundtrip(self):
        g = WeightedGraph.from_edges([("q", "p", 3), ("p", "r", 1)])
        buf = io.StringIO()
        write_edge_list(g, buf)
        assert buf.getvalue().splitlines() == ["source_page,target_page,weight", "p,q,3", "p,r,1"]
        buf.seek(0)
        assert read_edge_list(buf).weights == g.weights

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from egorank.errors import DataError, ParseError, ConfigError
from egorank.graph import Graph, degrees, extract_ego, load_graph, write_edge_list
from oracles import ego_by_definition, random_connected_graph


def test_load_minimal_path():
    g = load_graph(["a b", "b c"])
    assert (g.node_count, g.edge_count) == (3, 2)


def test_load_drops_duplicates_and_loops():
    g = load_graph(["a b", "b a", "a a"])
    assert (g.node_count, g.edge_count) == (2, 1)
    assert g.report.duplicates == 1
    assert g.report.self_loops == 1


def test_cycle_degrees(c4):
    assert list(c4.degrees) == [2, 2, 2, 2]


def test_load_skips_comments_and_blank_lines():
    g = load_graph(["# header", "", "x y  # trailing", "  y z"])
    assert g.edge_count == 2


def test_load_reports_line_number():
    with pytest.raises(ParseError, match="line 2"):
        load_graph(["a b", "a b c"])


def test_load_empty_rejected():
    with pytest.raises(DataError):
        load_graph(["# nothing here", ""])


def test_integer_names_keep_their_ids():
    g = load_graph(["3 1", "0 2", "10 3"])
    assert g.names == ("0", "1", "2", "3", "10")
    assert g.index_of("10") == 4


def test_graph_invariants():
    g = random_connected_graph(np.random.default_rng(3), 40, 0.1)
    for i in range(g.node_count):
        nb = g.neighbors(i)
        assert np.all(np.diff(nb) > 0)
        assert i not in nb
        for j in nb:
            assert i in g.neighbors(j)


def test_star_one_hop(star_view):
    assert star_view.node_count == 6
    assert star_view.edge_count == 5
    assert star_view.names[0] == "c"


def test_path_two_hops(path_view):
    assert sorted(path_view.names) == ["a", "b", "c"]
    names = path_view.names
    edges = {tuple(sorted((names[u], names[v]))) for u, v in path_view.edges()}
    assert edges == {("a", "b"), ("b", "c")}


def test_hidden_chord(chord_graph):
    view = extract_ego(chord_graph, "o", 2)
    names = view.names
    edges = {tuple(sorted((names[u], names[v]))) for u, v in view.edges()}
    assert edges == {("a", "o"), ("a", "b"), ("a", "c"), ("a", "d")}
    assert [names[i] for i in view.ring(2)] == ["b", "c", "d"]


def test_degrees_on_fixtures(star_view, path_view, chord_graph):
    assert list(degrees(star_view)) == [5, 1, 1, 1, 1, 1]
    assert dict(zip(path_view.names, degrees(path_view))) == {"a": 1, "b": 2, "c": 1}
    view = extract_ego(chord_graph, "o", 2)
    true_deg = chord_graph.degrees[view.global_ids]
    for i in view.ring(2):
        assert degrees(view)[i] < true_deg[i]
    assert np.all(degrees(view) >= 1)


def test_local_id_order_is_level_then_global():
    g = random_connected_graph(np.random.default_rng(5), 30, 0.08)
    view = extract_ego(g, 7, 2)
    assert view.global_ids[0] == 7
    keys = list(zip(view.levels, view.global_ids))
    assert keys == sorted(keys)


def test_unknown_observer():
    with pytest.raises(DataError):
        extract_ego(load_graph(["a b"]), "zz", 1)


def test_isolated_observer_rejected():
    g = Graph.from_edges(["0", "1", "2"], [(1, 2)])
    with pytest.raises(DataError, match="no neighbours"):
        extract_ego(g, 0, 2)


def test_hops_must_be_positive():
    with pytest.raises(ConfigError):
        extract_ego(load_graph(["a b"]), "a", 0)


def test_local_id_outside_view(path_view):
    with pytest.raises(DataError):
        path_view.local_id("d")
    assert path_view.local_id("c") == 2


def _connected_from(view):
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in view.neighbors(u):
            if v not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return len(seen) == view.node_count


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 40), h=st.integers(1, 4))
def test_view_matches_set_definition(seed, n, h):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, n, float(rng.uniform(0.02, 0.3)))
    o = int(rng.integers(0, n))
    view = extract_ego(g, o, h)
    levels, visible = ego_by_definition([tuple(e) for e in g.edges().tolist()], o, h)
    assert set(view.global_ids.tolist()) == levels[h]
    for r in range(h + 1):
        assert set(view.global_ids[view.within(r)].tolist()) == levels[r]
    got = {tuple(sorted((int(view.global_ids[u]), int(view.global_ids[v])))) for u, v in view.edges()}
    assert got == visible
    # every ring-r node has a visible edge into ring r-1
    for i in range(1, view.node_count):
        assert np.any(view.levels[view.neighbors(i)] == view.levels[i] - 1)
    assert _connected_from(view)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 40))
def test_views_grow_with_hops(seed, n):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, n, 0.1)
    o = int(rng.integers(0, n))
    prev_nodes, prev_edges = set(), set()
    for h in range(1, 5):
        view = extract_ego(g, o, h)
        nodes = set(view.global_ids.tolist())
        edges = {tuple(sorted((int(view.global_ids[u]), int(view.global_ids[v])))) for u, v in view.edges()}
        assert prev_nodes <= nodes and prev_edges <= edges
        prev_nodes, prev_edges = nodes, edges


def test_view_round_trip(tmp_path):
    g = random_connected_graph(np.random.default_rng(11), 60, 0.06)
    view = extract_ego(g, 0, 2)
    path = tmp_path / "view.txt"
    write_edge_list(view, path)
    again = load_graph(path)
    assert again.node_count == view.node_count
    assert sorted(again.degrees) == sorted(view.degrees)
    assert np.array_equal(again.edges(), view.edges())


def test_graph_round_trip_with_names(tmp_path):
    g = load_graph(["alice bob", "bob carol", "carol alice", "carol dave"])
    write_edge_list(g, tmp_path / "g.txt")
    again = load_graph(tmp_path / "g.txt")
    assert again.names == g.names
    assert np.array_equal(again.edges(), g.edges())

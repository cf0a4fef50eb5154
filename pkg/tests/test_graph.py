from __future__ import annotations

import io
import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrgcover.graph import (
    AliveMask,
    DegreeQueue,
    EdgeListError,
    Graph,
    bounded_component,
    connected_components,
    is_vertex_cover,
    load_edge_list,
    read_coordinates,
    write_coordinates,
    write_edge_list,
)


def petersen() -> Graph:
    g = nx.petersen_graph()
    return Graph.from_edges(10, list(g.edges()))


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


def brute_force_cover_size(g: Graph) -> int:
    edges = list(g.edges())
    for k in range(g.vertex_count + 1):
        for s in itertools.combinations(range(g.vertex_count), k):
            chosen = set(s)
            if all(u in chosen or v in chosen for u, v in edges):
                return k
    raise AssertionError("unreachable")


# -- construction --------------------------------------------------------------


def test_from_edges_normalizes():
    g = Graph.from_edges(4, [(1, 0), (0, 1), (2, 2), (3, 1), (1, 3)])
    assert g.edge_count == 2
    assert list(g.edges()) == [(0, 1), (1, 3)]
    assert g.adjacency == [[1], [0, 3], [], [1]]
    assert g.degrees.tolist() == [1, 2, 0, 1]


def test_graph_arrays_are_read_only():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.indices[0] = 2


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 15).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
def test_symmetric_simple_adjacency(case):
    n, edges = case
    g = Graph.from_edges(n, edges)
    adj = g.adjacency
    for v in range(n):
        assert adj[v] == sorted(set(adj[v]))
        assert v not in adj[v]
        for u in adj[v]:
            assert v in adj[u]
    assert g.edge_count == len({frozenset(e) for e in edges if e[0] != e[1]})


# -- loader --------------------------------------------------------------------


def test_load_path():
    g, ids = load_edge_list(b"1 2\n2 3\n")
    assert g.vertex_count == 3 and g.edge_count == 2
    assert ids == [1, 2, 3]
    assert list(g.edges()) == [(0, 1), (1, 2)]


def test_load_dedups_and_drops_self_loops():
    g, ids = load_edge_list(b"% header\n1 2\n1 2\n2 1\n1 1\n")
    assert g.edge_count == 1
    assert list(g.edges()) == [(0, 1)]


def test_load_ignores_extra_columns_and_comments():
    g, ids = load_edge_list(io.BytesIO(b"# c\n10 20 1.0 1234\n\n20 30 7\n"))
    assert ids == [10, 20, 30]
    assert g.edge_count == 2


def test_load_first_seen_remap():
    _, ids = load_edge_list("7 3\n3 9\n")
    assert ids == [7, 3, 9]


@pytest.mark.parametrize("text, lineno", [(b"1 2\nfoo bar\n", 2), (b"# x\n1\n", 2), (b"1 2\n2 3\n3 x\n", 3)])
def test_load_parse_error_reports_line(text, lineno):
    with pytest.raises(EdgeListError) as err:
        load_edge_list(text)
    assert err.value.lineno == lineno
    assert f"line {lineno}" in str(err.value)


def test_write_then_load_round_trip_with_isolated_vertices():
    g = Graph.from_edges(6, [(0, 3), (3, 4), (1, 4)])  # 2 and 5 isolated
    buf = io.StringIO()
    write_edge_list(g, buf)
    h, ids = load_edge_list(buf.getvalue(), vertex_count=6)
    assert ids == list(range(6))
    assert np.array_equal(h.indptr, g.indptr) and np.array_equal(h.indices, g.indices)


def test_write_then_load_round_trip_random():
    g = random_graph(30, 0.2, 4)
    buf = io.StringIO()
    write_edge_list(g, buf, {"seed": 4})
    h, _ = load_edge_list(buf.getvalue(), vertex_count=g.vertex_count)
    assert list(h.edges()) == list(g.edges())


def test_coordinate_round_trip_is_exact():
    rng = np.random.default_rng(0)
    r, phi = rng.uniform(0, 20, 50), rng.uniform(0, 6.28, 50)
    g = Graph.from_edges(50, [(0, 1)], r, phi)
    buf = io.StringIO()
    write_coordinates(g, buf, {"n": 50, "mode": "fixed"})
    buf.seek(0)
    radii, angles, meta = read_coordinates(buf)
    assert np.array_equal(radii, r) and np.array_equal(angles, phi)
    assert meta == {"n": "50", "mode": "fixed"}


# -- masks and components -------------------------------------------------------


def test_alive_mask_count():
    m = AliveMask(5)
    m.kill(1)
    m.kill(1)
    m.kill(3)
    assert m.alive_count == 3 == len(m.vertices())
    m.revive(1)
    assert m.vertices() == [0, 1, 2, 4]
    assert AliveMask.of(5, [4, 2]).vertices() == [2, 4]


def test_bounded_component_isolated():
    g = Graph.from_edges(3, [(1, 2)])
    assert bounded_component(g, AliveMask(3), 0, 1) == [0]


def test_bounded_component_path_exceeded():
    g = Graph.from_edges(5, [(i, i + 1) for i in range(4)])
    assert bounded_component(g, AliveMask(5), 0, 3) is None


def test_bounded_component_four_cycle():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    for s in range(4):
        assert sorted(bounded_component(g, AliveMask(4), s, 4)) == [0, 1, 2, 3]
        assert bounded_component(g, AliveMask(4), s, 3) is None


def test_bounded_component_respects_mask():
    g = Graph.from_edges(5, [(i, i + 1) for i in range(4)])
    mask = AliveMask(5)
    mask.kill(2)
    assert sorted(bounded_component(g, mask, 4, 2)) == [3, 4]


def test_bounded_component_dead_start_rejected():
    g = Graph.from_edges(2, [(0, 1)])
    mask = AliveMask(2)
    mask.kill(0)
    with pytest.raises(ValueError):
        bounded_component(g, mask, 0, 3)


def test_bounded_component_full_limit_equals_components():
    g = random_graph(40, 0.05, 11)
    mask = AliveMask(40)
    for v in (3, 7, 19):
        mask.kill(v)
    comps = {tuple(c) for c in connected_components(g, mask)}
    for v in mask.vertices():
        assert tuple(sorted(bounded_component(g, mask, v, 40))) in comps


def test_connected_components_basic():
    g = Graph.from_edges(4, [(2, 3), (0, 1)])
    assert connected_components(g) == [[0, 1], [2, 3]]
    assert connected_components(g, AliveMask(4, alive=False)) == []


def test_connected_components_match_networkx():
    g = random_graph(60, 0.04, 2)
    ref = nx.Graph()
    ref.add_nodes_from(range(60))
    ref.add_edges_from(g.edges())
    assert sorted(sorted(c) for c in nx.connected_components(ref)) == connected_components(g)


# -- cover predicate ------------------------------------------------------------


def test_is_vertex_cover_triangle():
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert is_vertex_cover(g, [0, 1])
    assert not is_vertex_cover(g, [0])


def test_is_vertex_cover_petersen_optimum():
    g = petersen()
    assert brute_force_cover_size(g) == 6
    edges = list(g.edges())
    optima = [
        s
        for s in itertools.combinations(range(10), 6)
        if all(u in s or v in s for u, v in edges)
    ]
    assert optima
    assert all(is_vertex_cover(g, s) for s in optima)
    assert not any(is_vertex_cover(g, s) for s in itertools.combinations(range(10), 5))


def test_is_vertex_cover_empty_graph():
    assert is_vertex_cover(Graph.from_edges(3, []), [])


# -- degree queue ----------------------------------------------------------------


def naive_extract_sequence(g: Graph) -> list[int]:
    alive = set(range(g.vertex_count))
    adj = g.adjacency
    seq = []
    while alive:
        best = max(alive, key=lambda v: (sum(u in alive for u in adj[v]), -v))
        seq.append(best)
        alive.remove(best)
    return seq


@pytest.mark.parametrize("seed", range(15))
def test_degree_queue_matches_naive_scan(seed):
    g = random_graph(25, 0.2, seed)
    q = DegreeQueue(g)
    seq = []
    while True:
        v = q.pop_max()
        if v is None:
            break
        q.remove(v)
        seq.append(v)
    assert seq == naive_extract_sequence(g)


def test_degree_queue_with_initial_mask():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    mask = AliveMask(4)
    mask.kill(0)
    q = DegreeQueue(g, mask)
    assert q.max_degree() == 1
    assert q.pop_max() == 1

"""Cut-set reports and their structural guarantees."""

import numpy as np
import pytest

from opinionnet.cutset import cutset_timeline, edge_cutset
from opinionnet.graph import DynGraph


def graph_from(n, pairs):
    return DynGraph.from_edges(n, [(j, i, 0.5) for j, i in pairs])


def adj_from(n, pairs):
    adj = np.zeros((n, n), dtype=bool)
    for j, i in pairs:
        adj[j, i] = True
    return adj


# -- edge_cutset -------------------------------------------------------------
# example vertices 1..4 map to ids 0..3


def test_cutset_crossing_edges_only():
    g_t = graph_from(4, [(0, 1), (1, 0), (1, 2), (2, 3)])
    g_final = graph_from(4, [(0, 1), (2, 3)])
    report = edge_cutset(g_t, g_final, t=0)
    assert report.final_partition == ((0, 1), (2, 3))
    assert report.cut_edges == {(1, 2)}
    assert report.responsible_agents == {1, 2}


def test_cutset_of_converged_network_is_empty():
    g = graph_from(4, [(0, 1), (1, 2), (2, 3)])
    assert edge_cutset(g, g).cut_edges == frozenset()


def test_single_component_final_means_no_cut():
    g_t = graph_from(3, [(0, 1)])
    g_final = graph_from(3, [(0, 1), (1, 2), (2, 0)])
    assert edge_cutset(g_t, g_final).cut_edges == frozenset()


def test_cutset_vertex_set_mismatch():
    with pytest.raises(ValueError):
        edge_cutset(DynGraph(3), DynGraph(4))


def test_cutset_minimality_and_completeness():
    # removing the cut-set leaves no crossing edge; removing any proper
    # subset leaves at least one
    rng = np.random.default_rng(8)
    for _ in range(30):
        n = 8
        adj_t = rng.random((n, n)) < 0.25
        np.fill_diagonal(adj_t, False)
        adj_f = adj_from(n, [(0, 1), (1, 2), (3, 4), (5, 6), (6, 7)])
        report = edge_cutset(adj_t, adj_f)
        remaining = adj_t.copy()
        for u, v in report.cut_edges:
            remaining[u, v] = False
        assert edge_cutset(remaining, adj_f).cut_edges == frozenset()
        for e in report.cut_edges:
            partial = adj_t.copy()
            for u, v in report.cut_edges - {e}:
                partial[u, v] = False
            assert edge_cutset(partial, adj_f).cut_edges == {e}


# -- cutset_timeline -----------------------------------------------------------


def test_timeline_constant_history_is_monotone():
    g = adj_from(4, [(0, 1), (2, 3)])
    timeline = cutset_timeline([(0, g), (5, g), (10, g)], g)
    assert timeline.monotone
    assert all(r.cut_edges == frozenset() for r in timeline.reports)


def test_timeline_shrinking_cutsets():
    final = adj_from(4, [(0, 1), (2, 3)])
    g0 = adj_from(4, [(0, 1), (2, 3), (1, 2), (3, 0)])
    g1 = adj_from(4, [(0, 1), (2, 3), (1, 2)])
    timeline = cutset_timeline([(0, g0), (1, g1), (2, final)], final)
    assert [len(r.cut_edges) for r in timeline.reports] == [2, 1, 0]
    assert timeline.monotone


def test_timeline_reports_violations_not_suppressed():
    # a cross-partition edge appearing later than t0 falsifies monotonicity
    final = adj_from(4, [(0, 1), (2, 3)])
    g0 = adj_from(4, [(0, 1), (2, 3), (1, 2)])
    g1 = adj_from(4, [(0, 1), (2, 3), (3, 0)])
    timeline = cutset_timeline([(0, g0), (1, g1), (2, final)], final)
    assert not timeline.monotone
    assert timeline.reports[1].cut_edges == {(3, 0)}


def test_timeline_requires_final_snapshot_last():
    g0 = adj_from(3, [(0, 1), (1, 2)])
    final = adj_from(3, [(0, 1)])
    with pytest.raises(ValueError):
        cutset_timeline([(0, g0)], final)
    with pytest.raises(ValueError):
        cutset_timeline([], final)

"""Edge cut-sets between evolving and converged network snapshots.

The cut-set at time t is the set of directed edges of G(t) whose endpoints
lie in different weak components of the converged network G(t_f). By
construction it is the unique minimal edge set whose removal disconnects
G(t) across the final partition. Whether cut-sets shrink monotonically over
a run is a dynamical property of the model, so the timeline reports it
rather than assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import _adjacency_of, component_labels, weakly_connected_components


@dataclass
class CutsetReport:
    """Cut-set of one (G(t), G(t_f)) pair."""

    t: int
    final_partition: tuple[tuple[int, ...], ...]
    cut_edges: frozenset[tuple[int, int]]
    responsible_agents: frozenset[int]


@dataclass
class CutsetTimeline:
    """Per-snapshot reports plus whether the cut-sets were nested in time:
    monotone means E_cs(t') is a subset of E_cs(t) for every t' > t."""

    reports: list[CutsetReport]
    monotone: bool


def edge_cutset(g_t, g_final, t: int = 0, _partition=None, _labels=None) -> CutsetReport:
    """Edges of the time-t snapshot crossing the final partition.

    _partition/_labels let a timeline computation reuse the component
    analysis of the (shared) final graph.
    """
    adj_t = _adjacency_of(g_t)
    adj_f = _adjacency_of(g_final)
    if adj_t.shape != adj_f.shape:
        raise ValueError(
            f"snapshots must share a vertex set, got {adj_t.shape[0]} vs {adj_f.shape[0]}"
        )
    if _partition is None or _labels is None:
        _partition = tuple(tuple(c) for c in weakly_connected_components(adj_f))
        _labels = component_labels(adj_f)
    crossing = adj_t & (_labels[:, np.newaxis] != _labels[np.newaxis, :])
    cut_edges = frozenset((int(u), int(v)) for u, v in np.argwhere(crossing))
    agents = frozenset(u for e in cut_edges for u in e)
    return CutsetReport(
        t=t, final_partition=_partition, cut_edges=cut_edges, responsible_agents=agents
    )


def cutset_timeline(snapshots, g_final) -> CutsetTimeline:
    """Cut-set reports for an ordered run of (t, snapshot) pairs.

    The last snapshot must equal the converged network, whose cut-set against
    itself is empty by definition; that is asserted, not assumed. Subset
    violations (a later cut-set containing an edge absent from an earlier
    one) are surfaced through monotone=False, never suppressed.
    """
    snapshots = list(snapshots)
    if not snapshots:
        raise ValueError("need at least one snapshot")
    final_adj = _adjacency_of(g_final)
    last_adj = _adjacency_of(snapshots[-1][1])
    if not np.array_equal(last_adj, final_adj):
        raise ValueError("last snapshot must equal the converged network")
    partition = tuple(tuple(c) for c in weakly_connected_components(final_adj))
    labels = component_labels(final_adj)
    reports = [
        edge_cutset(snap, final_adj, t=t, _partition=partition, _labels=labels)
        for t, snap in snapshots
    ]
    if reports[-1].cut_edges:
        raise AssertionError("cut-set of the converged network against itself must be empty")
    monotone = all(
        later.cut_edges <= earlier.cut_edges
        for earlier, later in zip(reports, reports[1:])
    )
    return CutsetTimeline(reports=reports, monotone=monotone)

"""Coupled opinion/network dynamics.

One time unit is a full asynchronous sweep: a random permutation of agents,
each updating once against the partially updated opinion vector, followed by
tie gain, tie loss, and a Katz self-weight refresh when the edge set changed.

The graph is static during the sweep, so walk counts and path-weight sums for
all vertex pairs are computed once per step as matrix powers. For a pair
(j, i) with no direct edge j -> i, every 2- or 3-walk from j to i is
automatically a simple path (a repeated vertex would require the edge j -> i
or a self-loop), so the matrix route equals the per-pair path enumeration on
exactly the pairs the dynamics needs it for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .graph import (
    DynGraph,
    KatzParams,
    katz_self_weights,
    renormalize_all,
    renormalize_in_weights,
)
from .opinions import AgentParams, OpinionState

UPDATE_MODES = ("in_place", "frozen")

DEFAULT_EPS = 1e-6
DEFAULT_T_MAX = 250
DEFAULT_P_ND = 0.5


@dataclass
class Neighborhood:
    """Agent i's influence sets at one step: direct one-hop in-neighbors,
    in-tolerance 2/3-hop non-direct contacts, and the random subset of the
    latter actually consulted this step."""

    direct: np.ndarray
    nondirect: np.ndarray
    sampled: np.ndarray


class InteractionLedger:
    """Cumulative counts of sampled interactions per ordered (listener, tie) pair.

    An entry is removed (reset to zero) when the pair is promoted to a direct
    tie; until then counts never decrease.
    """

    def __init__(self, n: int):
        self.counts = np.zeros((n, n), dtype=np.int64)

    def increment(self, i: int, ties: np.ndarray) -> None:
        self.counts[i, ties] += 1

    def count(self, i: int, j: int) -> int:
        return int(self.counts[i, j])

    def remove(self, i: int, j: int) -> None:
        self.counts[i, j] = 0

    def as_dict(self) -> dict[tuple[int, int], int]:
        out = {}
        for i, j in np.argwhere(self.counts > 0):
            out[(int(i), int(j))] = int(self.counts[i, j])
        return out


@dataclass
class RunHistory:
    """Optional per-run trace: opinion snapshots each step, edge-set snapshots
    at t=0 and whenever the set changes, weighted snapshots on a cadence."""

    cadence: int = 1
    record_opinions: bool = True
    record_weighted: bool = False
    opinions: list[tuple[int, np.ndarray]] = field(default_factory=list)
    edge_sets: list[tuple[int, np.ndarray]] = field(default_factory=list)
    weighted: list[tuple[int, np.ndarray, np.ndarray]] = field(default_factory=list)

    def _record(self, t: int, state: "SimState", edges_changed: bool) -> None:
        if self.record_opinions:
            self.opinions.append((t, state.opinions.theta.copy()))
        if edges_changed or not self.edge_sets:
            self.edge_sets.append((t, state.graph.adjacency.copy()))
        if self.record_weighted and t % self.cadence == 0:
            self.weighted.append(
                (t, state.graph.weights.copy(), state.graph.self_weights.copy())
            )

    def seal(self, state: "SimState") -> None:
        """Ensure the trace ends with a snapshot of the final graph."""
        t = state.opinions.t
        if self.edge_sets and self.edge_sets[-1][0] != t:
            self.edge_sets.append((t, state.graph.adjacency.copy()))
        if self.record_weighted and (not self.weighted or self.weighted[-1][0] != t):
            self.weighted.append(
                (t, state.graph.weights.copy(), state.graph.self_weights.copy())
            )


@dataclass
class SimState:
    """Everything one simulation run owns: opinions, graph, agent parameters,
    the interaction ledger, and an explicit rng stream."""

    opinions: OpinionState
    graph: DynGraph
    agents: list[AgentParams]
    rng: np.random.Generator
    ledger: InteractionLedger | None = None
    p_nd: float = DEFAULT_P_ND
    update_mode: str = "in_place"
    katz: KatzParams = field(default_factory=KatzParams)
    history: RunHistory | None = None
    use_kernel: bool = True

    def __post_init__(self):
        n = self.graph.n
        if self.opinions.n != n or len(self.agents) != n:
            raise ValueError("opinions, graph and agents must agree on the population size")
        if not 0.0 <= self.p_nd <= 1.0:
            raise ValueError("p_nd must be in [0, 1]")
        if self.update_mode not in UPDATE_MODES:
            raise ValueError(f"update_mode must be one of {UPDATE_MODES}")
        if self.ledger is None:
            self.ledger = InteractionLedger(n)
        self.tolerances = np.array([a.tolerance for a in self.agents])
        self.sociability_bases = np.array([a.sociability_base for a in self.agents])
        # keep AgentParams.self_weight in sync with the graph vector
        for a, w in zip(self.agents, self.graph.self_weights):
            a.self_weight = float(w)

    @property
    def n(self) -> int:
        return self.graph.n


class _StepCache:
    """Per-step matrix powers of the (static-during-sweep) graph.

    path_counts[j, i]  number of 2/3-walks j -> i (simple paths when no
                       direct edge j -> i exists; see module docstring)
    trust[j, i]        mean path-weight product over those walks
    """

    __slots__ = ("in_adj", "path_counts", "reach", "trust")

    def __init__(self, graph: DynGraph):
        w = graph.weights
        a = (w > 0).astype(float)
        a2 = a @ a
        counts = a2 + a2 @ a
        w2 = w @ w
        sums = w2 + w2 @ w
        self.in_adj = w > 0
        self.path_counts = counts
        self.reach = counts > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            self.trust = np.where(counts > 0, sums / np.where(counts > 0, counts, 1.0), 0.0)


def compute_neighborhood(
    state: SimState,
    i: int,
    cache: _StepCache | None = None,
    u_row: np.ndarray | None = None,
    theta_read: np.ndarray | None = None,
) -> Neighborhood:
    """Partition agent i's contacts into direct / non-direct / sampled sets.

    A direct tie whose opinion has drifted out of tolerance is excluded from
    influence here and will be removed by apply_tie_loss at the end of the
    step.
    """
    if cache is None:
        cache = _StepCache(state.graph)
    if theta_read is None:
        theta_read = state.opinions.theta
    tol_mask = np.abs(theta_read - theta_read[i]) <= state.tolerances[i]
    in_col = cache.in_adj[:, i]
    direct = np.nonzero(in_col & tol_mask)[0]
    nd_mask = cache.reach[:, i] & tol_mask & ~in_col
    nd_mask[i] = False
    nondirect = np.nonzero(nd_mask)[0]
    if u_row is None:
        u_row = state.rng.random(state.n)
    sampled = nondirect[u_row[nondirect] < state.p_nd]
    return Neighborhood(direct=direct, nondirect=nondirect, sampled=sampled)


def update_agent(
    state: SimState,
    i: int,
    cache: _StepCache | None = None,
    u_row: np.ndarray | None = None,
    theta_read: np.ndarray | None = None,
    theta_write: np.ndarray | None = None,
) -> float:
    """One belief update for agent i; returns the new angle.

    Influence set is {i} with weight w_ii, direct ties with their stored
    trust scores, and the sampled non-direct ties with their path-averaged
    temporary scores. Every sampled tie increments the interaction ledger.
    With no direct and no sampled influences the opinion is unchanged.
    """
    if cache is None:
        cache = _StepCache(state.graph)
    if theta_read is None:
        theta_read = state.opinions.theta
    if theta_write is None:
        theta_write = state.opinions.theta
    nb = compute_neighborhood(state, i, cache, u_row, theta_read)
    if nb.sampled.size:
        state.ledger.increment(i, nb.sampled)
    if nb.direct.size + nb.sampled.size == 0:
        return float(theta_read[i])
    w = state.graph.weights
    num = state.graph.self_weights[i] * math.sin(theta_read[i])
    den = state.graph.self_weights[i] * math.cos(theta_read[i])
    if nb.direct.size:
        ang = theta_read[nb.direct]
        wd = w[nb.direct, i]
        num += float(np.dot(wd, np.sin(ang)))
        den += float(np.dot(wd, np.cos(ang)))
    if nb.sampled.size:
        ang = theta_read[nb.sampled]
        ws = cache.trust[nb.sampled, i]
        num += float(np.dot(ws, np.sin(ang)))
        den += float(np.dot(ws, np.cos(ang)))
    new_theta = math.atan2(num, den)
    theta_write[i] = new_theta
    return new_theta


def apply_tie_gain(state: SimState, cache: _StepCache | None = None) -> list[tuple[int, int]]:
    """Promote every ledger pair whose count exceeds the listener's sociability
    index s_i = K_C * w_ii (w_ii read at check time).

    The new persistent edge j -> i starts at the pair's current temporary
    trust score; if no 2/3-hop path remains, at the listener's smallest
    existing in-weight; with no in-edges at all, at 1 - w_ii (the subsequent
    renormalization makes that exact). All promotion weights are evaluated
    against the pre-gain graph so the result is independent of promotion
    order. Returns the promoted (listener, tie) pairs.
    """
    thresholds = state.sociability_bases * state.graph.self_weights
    over = state.ledger.counts > thresholds[:, np.newaxis]
    if not over.any():
        return []
    if cache is None:
        cache = _StepCache(state.graph)
    w_before = state.graph.weights
    col_min = np.where(w_before > 0, w_before, np.inf).min(axis=0)
    promoted: list[tuple[int, int]] = []
    affected = set()
    for i, j in np.argwhere(over).tolist():
        if cache.path_counts[j, i] > 0:
            weight = float(cache.trust[j, i])
        elif math.isfinite(col_min[i]):
            weight = float(col_min[i])
        else:
            weight = 1.0 - float(state.graph.self_weights[i])
        state.graph.add_edge(j, i, weight)
        state.ledger.remove(i, j)
        affected.add(i)
        promoted.append((i, j))
    for i in sorted(affected):
        renormalize_in_weights(state.graph, i)
    return promoted


def apply_tie_loss(state: SimState) -> list[tuple[int, int]]:
    """Remove every persistent edge j -> i that violates the listener's
    tolerance against end-of-step opinions; returns the removed (j, i) edges."""
    theta = state.opinions.theta
    diff = np.abs(theta[:, np.newaxis] - theta[np.newaxis, :])
    violating = (state.graph.weights > 0) & (diff > state.tolerances[np.newaxis, :])
    if not violating.any():
        return []
    removed = [(int(j), int(i)) for j, i in np.argwhere(violating)]
    state.graph.weights[violating] = 0.0
    for i in sorted({i for _, i in removed}):
        if state.graph.weights[:, i].any():
            renormalize_in_weights(state.graph, i)
    return removed


def refresh_self_weights(state: SimState) -> None:
    """Recompute Katz self-weights on the current topology, write them through
    to the agent parameters, and renormalize all in-weights."""
    sw = katz_self_weights(state.graph, state.katz)
    state.graph.self_weights = sw
    for a, w in zip(state.agents, sw):
        a.self_weight = float(w)
    renormalize_all(state.graph)


def _sweep_reference(state: SimState, cache: _StepCache, u: np.ndarray, order: np.ndarray) -> None:
    """The sweep spelled out with the public per-agent operations; the compiled
    kernel must agree with this."""
    theta_live = state.opinions.theta
    theta_read = theta_live.copy() if state.update_mode == "frozen" else theta_live
    for i in order:
        update_agent(state, int(i), cache, u[i], theta_read, theta_live)


def step(state: SimState) -> SimState:
    """Advance the coupled state one time unit.

    Order: random permutation; per-agent neighborhood + belief update against
    the in-place opinion vector (or a frozen sweep-start copy in "frozen"
    mode); tie gain; tie loss; Katz refresh + renormalization when the edge
    set changed.
    """
    n = state.n
    if state.history is not None and not state.history.edge_sets:
        state.history._record(state.opinions.t, state, edges_changed=True)
    cache = _StepCache(state.graph)
    u = state.rng.random((n, n))
    order = state.rng.permutation(n)
    if state.use_kernel:
        _kernel.sweep(
            state.opinions.theta, state.graph.weights, state.graph.self_weights,
            state.tolerances, cache.reach, cache.trust, u, order, state.p_nd,
            state.ledger.counts, state.update_mode == "frozen",
        )
    else:
        _sweep_reference(state, cache, u, order)
    promoted = apply_tie_gain(state, cache)
    removed = apply_tie_loss(state)
    changed = bool(promoted or removed)
    if changed:
        refresh_self_weights(state)
    state.opinions.t += 1
    if state.history is not None:
        state.history._record(state.opinions.t, state, changed)
    return state


def run_to_convergence(
    state: SimState, eps: float = DEFAULT_EPS, t_max: int = DEFAULT_T_MAX
) -> tuple[SimState, int | None]:
    """Step until the largest per-agent opinion change is <= eps and the edge
    set did not change over the last step, or until t_max.

    Returns (state, t_k) on convergence and (state, None) at the cap --
    non-convergence is an outcome, not an error.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    converged_at: int | None = None
    while state.opinions.t < t_max:
        prev_theta = state.opinions.theta.copy()
        prev_edges = state.graph.adjacency
        step(state)
        theta_settled = float(np.max(np.abs(state.opinions.theta - prev_theta))) <= eps
        edges_settled = np.array_equal(state.graph.adjacency, prev_edges)
        if theta_settled and edges_settled:
            converged_at = state.opinions.t
            break
    if state.history is not None:
        state.history.seal(state)
    return state, converged_at

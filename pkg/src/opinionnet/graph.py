"""Adaptive directed weighted influence graph.

Edge direction convention: the influence edge points influencer -> influenced.
An edge j -> i is admissible when j falls within the tolerance of listener i,
and it carries the trust score the paper writes as w_ij ("i trusts j"). The
weight matrix is therefore indexed weights[from, to] = weights[j, i] = w_ij.

Self-influence never lives in the edge set: it is the separate self-weight
vector w_ii, derived from Katz centrality. For every vertex with at least one
in-edge the in-weights are kept normalized to sum(w_ij, j != i) = 1 - w_ii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORMALIZATION_TOL = 1e-9

# Floor applied to raw random edge weights so "strictly positive" survives
# an unlucky 0.0 draw.
MIN_RAW_WEIGHT = 1e-12


class NoPathError(ValueError):
    """No 2- or 3-hop directed path exists between the requested pair."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within the iteration cap."""


class DynGraph:
    """Directed weighted graph over a fixed vertex set 0..n-1.

    weights[j, i] > 0 encodes the edge j -> i; zero means no edge. No
    self-loops. self_weights[i] = w_ii in (0, 1).
    """

    __slots__ = ("n", "weights", "self_weights")

    def __init__(
        self,
        n: int,
        weights: np.ndarray | None = None,
        self_weights: np.ndarray | None = None,
    ):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = n
        if weights is None:
            weights = np.zeros((n, n), dtype=float)
        else:
            weights = np.array(weights, dtype=float)
        if weights.shape != (n, n):
            raise ValueError(f"weights must be {n}x{n}, got {weights.shape}")
        if np.any(weights < 0):
            raise ValueError("edge weights must be non-negative")
        if np.any(np.diagonal(weights) != 0):
            raise ValueError("self-loops are not allowed; self-influence lives in self_weights")
        self.weights = weights
        if self_weights is None:
            self_weights = np.full(n, 0.5)
        else:
            self_weights = np.array(self_weights, dtype=float)
        if self_weights.shape != (n,):
            raise ValueError(f"self_weights must have length {n}")
        if np.any(self_weights <= 0) or np.any(self_weights >= 1):
            raise ValueError("self_weights must lie strictly in (0, 1)")
        self.self_weights = self_weights

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        self_weights: np.ndarray | None = None,
    ) -> "DynGraph":
        """Build from (from, to, weight) triples."""
        g = cls(n, self_weights=self_weights)
        for j, i, w in edges:
            g.add_edge(j, i, w)
        return g

    # -- structure queries -------------------------------------------------

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency, adjacency[j, i] == edge j -> i exists."""
        return self.weights > 0

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.weights))

    def has_edge(self, j: int, i: int) -> bool:
        return self.weights[j, i] > 0

    def edges(self) -> list[tuple[int, int, float]]:
        """Sorted (from, to, weight) triples."""
        js, is_ = np.nonzero(self.weights)
        return [(int(j), int(i), float(self.weights[j, i])) for j, i in zip(js, is_)]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        js, is_ = np.nonzero(self.weights)
        return frozenset(zip(js.tolist(), is_.tolist()))

    def in_neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.weights[:, i])[0]

    def out_degree(self, j: int) -> int:
        return int(np.count_nonzero(self.weights[j, :]))

    def in_weight_sum(self, i: int) -> float:
        return float(self.weights[:, i].sum())

    # -- mutation ----------------------------------------------------------

    def add_edge(self, j: int, i: int, weight: float) -> None:
        if j == i:
            raise ValueError("self-loops are not allowed")
        if weight <= 0:
            raise ValueError(f"edge weight must be strictly positive, got {weight}")
        self.weights[j, i] = weight

    def remove_edge(self, j: int, i: int) -> None:
        if self.weights[j, i] == 0:
            raise KeyError(f"no edge {j} -> {i}")
        self.weights[j, i] = 0.0

    def copy(self) -> "DynGraph":
        return DynGraph(self.n, self.weights.copy(), self.self_weights.copy())

    def normalization_violations(self, tol: float = NORMALIZATION_TOL) -> list[int]:
        """Vertices with in-edges whose in-weight sum misses 1 - w_ii by > tol."""
        sums = self.weights.sum(axis=0)
        has_in = self.adjacency.any(axis=0)
        bad = has_in & (np.abs(sums - (1.0 - self.self_weights)) > tol)
        return np.nonzero(bad)[0].tolist()


# -- path enumeration and non-direct trust ----------------------------------


def enumerate_paths(
    g: DynGraph, frm: int, to: int, max_len: int = 3
) -> list[list[tuple[int, int]]]:
    """All simple directed paths frm -> to of length 2..max_len, as edge lists.

    Length-1 paths (the direct edge) are excluded: they are direct ties, not
    paths through intermediaries. Ordering is lexicographic by vertex
    sequence.
    """
    if frm == to:
        raise ValueError("path endpoints must differ")
    if max_len not in (2, 3):
        raise ValueError("max_len must be 2 or 3")
    adj = g.adjacency
    paths: list[list[tuple[int, int]]] = []
    for mid in range(g.n):
        if mid in (frm, to):
            continue
        if adj[frm, mid] and adj[mid, to]:
            paths.append([(frm, mid), (mid, to)])
        if max_len < 3 or not adj[frm, mid]:
            continue
        for mid2 in range(g.n):
            if mid2 in (frm, to, mid):
                continue
            if adj[mid, mid2] and adj[mid2, to]:
                paths.append([(frm, mid), (mid, mid2), (mid2, to)])
    paths.sort(key=lambda p: [v for v, _ in p] + [p[-1][1]])
    return paths


def nondirect_trust_score(g: DynGraph, frm: int, to: int) -> float:
    """Temporary-edge trust: mean over all 2/3-hop paths of the edge-weight product."""
    paths = enumerate_paths(g, frm, to)
    if not paths:
        raise NoPathError(f"no 2- or 3-hop path from {frm} to {to}")
    products = [math.prod(g.weights[u, v] for u, v in path) for path in paths]
    return sum(products) / len(products)


# -- connectivity ------------------------------------------------------------


def _adjacency_of(g) -> np.ndarray:
    if isinstance(g, DynGraph):
        return g.adjacency
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    return a != 0


def weakly_connected_components(g) -> list[list[int]]:
    """Partition of vertices, ignoring edge direction.

    Canonical form: each component sorted ascending, components ordered by
    their smallest vertex. Accepts a DynGraph or an adjacency matrix.
    Frontier-at-a-time BFS on the symmetrized adjacency keeps this fast at
    the dense end.
    """
    adj = _adjacency_of(g)
    n = adj.shape[0]
    sym = adj | adj.T
    unvisited = np.ones(n, dtype=bool)
    components: list[list[int]] = []
    while True:
        remaining = np.nonzero(unvisited)[0]
        if remaining.size == 0:
            break
        member = np.zeros(n, dtype=bool)
        member[remaining[0]] = True
        frontier = member.copy()
        while frontier.any():
            grown = sym[frontier].any(axis=0) & ~member
            member |= grown
            frontier = grown
        unvisited &= ~member
        components.append(np.nonzero(member)[0].tolist())
    return components


def component_labels(g) -> np.ndarray:
    """Vector mapping each vertex to the index of its weak component."""
    adj = _adjacency_of(g)
    labels = np.empty(adj.shape[0], dtype=int)
    for idx, comp in enumerate(weakly_connected_components(adj)):
        labels[comp] = idx
    return labels


# -- spectral radius and Katz self-weights -----------------------------------


def spectral_radius(g, tol: float = 1e-8, max_iter: int = 10_000) -> float:
    """Largest-magnitude eigenvalue of the 0/1 adjacency, by power iteration.

    Returns 0.0 for the edgeless graph and whenever the iterate collapses to
    the zero vector (nilpotent adjacency). Raises PowerIterationError after
    max_iter without the relative estimate settling below tol; callers may
    fall back to a dense eigensolve at small n.
    """
    adj = _adjacency_of(g).astype(float)
    n = adj.shape[0]
    if not adj.any():
        return 0.0
    x = np.full(n, 1.0 / math.sqrt(n))
    estimate = 0.0
    for _ in range(max_iter):
        y = adj @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0
        new_estimate = norm
        x = y / norm
        if abs(new_estimate - estimate) <= tol * max(new_estimate, 1e-300):
            return new_estimate
        estimate = new_estimate
    raise PowerIterationError(
        f"power iteration did not converge in {max_iter} iterations (last estimate {estimate})"
    )


@dataclass
class KatzParams:
    """Katz centrality configuration.

    alpha = alpha_fraction / lambda_max keeps the resolvent well defined
    (alpha_fraction < 1). When lambda_max == 0 the series terminates for any
    alpha and alpha_fraction is used directly. beta is a uniform bias that
    max-normalization cancels; it stays configurable for completeness. The
    clamp bounds keep both self- and social influence strictly positive.
    """

    beta: float = 1.0
    alpha_fraction: float = 0.9
    clamp_lo: float = 0.05
    clamp_hi: float = 0.95

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not 0.0 < self.alpha_fraction < 1.0:
            raise ValueError("alpha_fraction must be in (0, 1)")
        if not 0.0 < self.clamp_lo < self.clamp_hi < 1.0:
            raise ValueError("clamp bounds must satisfy 0 < lo < hi < 1")


def katz_scores(g, params: KatzParams = KatzParams(), alpha: float | None = None) -> np.ndarray:
    """Raw Katz centrality: solve (I - alpha*A^T) x = beta * 1.

    alpha defaults to params.alpha_fraction / lambda_max; pass it explicitly
    to pin the attenuation independent of the graph's spectrum.
    """
    adj = _adjacency_of(g).astype(float)
    n = adj.shape[0]
    if alpha is None:
        try:
            lam = spectral_radius(adj)
        except PowerIterationError:
            lam = float(np.max(np.abs(np.linalg.eigvals(adj))))
        alpha = params.alpha_fraction / lam if lam > 0 else params.alpha_fraction
    system = np.eye(n) - alpha * adj.T
    try:
        x = np.linalg.solve(system, np.full(n, params.beta))
    except np.linalg.LinAlgError as exc:  # cannot happen while alpha < 1/lambda_max
        raise RuntimeError("Katz system is singular; alpha constraint violated") from exc
    return x


def katz_self_weights(g, params: KatzParams = KatzParams()) -> np.ndarray:
    """Self-weights: max-normalized Katz scores clamped into (0, 1)."""
    x = katz_scores(g, params)
    return np.clip(x / x.max(), params.clamp_lo, params.clamp_hi)


# -- weight normalization ------------------------------------------------------


def renormalize_in_weights(g: DynGraph, i: int) -> None:
    """Scale vertex i's in-weights by a common factor to sum to 1 - w_ii."""
    total = g.weights[:, i].sum()
    if total == 0:
        raise ValueError(f"vertex {i} has no in-edges")
    g.weights[:, i] *= (1.0 - g.self_weights[i]) / total


def renormalize_all(g: DynGraph) -> None:
    """Renormalize every vertex that has at least one in-edge."""
    totals = g.weights.sum(axis=0)
    has_in = totals > 0
    scale = np.ones(g.n)
    scale[has_in] = (1.0 - g.self_weights[has_in]) / totals[has_in]
    g.weights *= scale[np.newaxis, :]


# -- neumann-series oracle (exported for reuse by the test suite) -------------


def katz_scores_neumann(
    g, params: KatzParams = KatzParams(), terms: int = 200
) -> np.ndarray:
    """Truncated-series route to the Katz scores: sum over (alpha*A^T)^k beta*1.

    Independent of the linear solve; intended as a cross-check at small n.
    """
    adj = _adjacency_of(g).astype(float)
    n = adj.shape[0]
    try:
        lam = spectral_radius(adj)
    except PowerIterationError:
        lam = float(np.max(np.abs(np.linalg.eigvals(adj))))
    alpha = params.alpha_fraction / lam if lam > 0 else params.alpha_fraction
    term = np.full(n, params.beta)
    acc = term.copy()
    for _ in range(terms):
        term = alpha * (adj.T @ term)
        acc += term
    return acc

"""Shared builders for engine-level tests."""

import math

import numpy as np
import pytest

from opinionnet.engine import SimState
from opinionnet.graph import DynGraph
from opinionnet.opinions import AgentKind, AgentParams, OpinionState


def make_state(
    theta_deg,
    edges=(),
    tolerances_deg=180.0,
    self_weights=0.5,
    k_c=100.0,
    p_nd=0.5,
    seed=0,
    update_mode="in_place",
    use_kernel=True,
    history=None,
):
    """Hand-built SimState; angles and tolerances in degrees for readability."""
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    n = theta.size
    if np.isscalar(tolerances_deg):
        tolerances_deg = [tolerances_deg] * n
    if np.isscalar(self_weights):
        self_weights = [self_weights] * n
    graph = DynGraph.from_edges(n, edges, self_weights=np.asarray(self_weights, dtype=float))
    agents = [
        AgentParams(
            tolerance=math.radians(tolerances_deg[i]),
            kind=AgentKind.FLEXIBLE,
            sociability_base=k_c,
            self_weight=float(graph.self_weights[i]),
        )
        for i in range(n)
    ]
    return SimState(
        opinions=OpinionState(theta=theta, t=0),
        graph=graph,
        agents=agents,
        rng=np.random.default_rng(seed),
        p_nd=p_nd,
        update_mode=update_mode,
        use_kernel=use_kernel,
        history=history,
    )


def random_state(rng_seed, n=12, density=0.25, use_kernel=True, p_nd=0.5):
    """Randomized but well-formed state for property tests."""
    rng = np.random.default_rng(rng_seed)
    theta_deg = rng.uniform(5.0, 175.0, n)
    weights = rng.uniform(0.05, 1.0, (n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(weights, 0.0)
    state = make_state(
        theta_deg,
        tolerances_deg=rng.uniform(5.0, 120.0, n).tolist(),
        self_weights=rng.uniform(0.1, 0.9, n).tolist(),
        p_nd=p_nd,
        seed=int(rng.integers(0, 2**31)),
        use_kernel=use_kernel,
    )
    state.graph.weights = weights
    return state


@pytest.fixture
def two_agent_mutual():
    return make_state(
        [30.0, 90.0],
        edges=[(0, 1, 0.5), (1, 0, 0.5)],
        tolerances_deg=180.0,
        self_weights=0.5,
        seed=3,
    )

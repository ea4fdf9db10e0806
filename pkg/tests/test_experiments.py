"""Population building, initial networks, consensus classification, sweeps."""

import math

import numpy as np
import pytest

from opinionnet.engine import SimState
from opinionnet.experiments import (
    ExperimentSpec,
    PopulationSpec,
    build_initial_network,
    build_population,
    consensus_of,
    derive_seed,
    run_single,
    run_sweep,
)
from opinionnet.graph import DynGraph
from opinionnet.opinions import AgentKind, AgentParams, OpinionState

DEG = math.radians(1.0)


def tiny_spec(**overrides):
    defaults = dict(
        sigmas_deg=[10.0], theta_rs_deg=[10.0], theta_fs_deg=[40.0],
        rigid_fractions=[0.0, 1.0], runs_per_cell=3, base_seed=123,
        n=20, t_max=40,
    )
    defaults.update(overrides)
    return ExperimentSpec(**defaults)


# -- PopulationSpec ---------------------------------------------------------


def test_group_kind_bands():
    assert PopulationSpec(sigma_deg=10.0).group_kind == "conservative"
    assert PopulationSpec(sigma_deg=15.0).group_kind == "conservative"
    assert PopulationSpec(sigma_deg=20.0).group_kind == "liberal"
    assert PopulationSpec(sigma_deg=25.0).group_kind == "liberal"


def test_population_spec_validation():
    with pytest.raises(ValueError):
        PopulationSpec(rigid_fraction=1.5)
    with pytest.raises(ValueError):
        PopulationSpec(sigma_deg=-1.0)
    with pytest.raises(ValueError):
        PopulationSpec(theta_r_deg=50.0, theta_f_deg=40.0)


# -- build_population ----------------------------------------------------------


def test_all_flexible_population():
    spec = PopulationSpec(n=50, rigid_fraction=0.0, theta_r_deg=10.0, theta_f_deg=40.0)
    _, agents = build_population(spec, np.random.default_rng(0))
    assert all(a.kind == AgentKind.FLEXIBLE for a in agents)
    assert all(a.tolerance == pytest.approx(40 * DEG) for a in agents)


def test_all_rigid_population():
    spec = PopulationSpec(n=100, rigid_fraction=1.0)
    _, agents = build_population(spec, np.random.default_rng(0))
    assert sum(a.kind == AgentKind.RIGID for a in agents) == 100
    assert all(a.tolerance == pytest.approx(10 * DEG) for a in agents)


def test_rigid_count_rounds_exactly():
    spec = PopulationSpec(n=100, rigid_fraction=0.3)
    _, agents = build_population(spec, np.random.default_rng(1))
    assert sum(a.kind == AgentKind.RIGID for a in agents) == 30


def test_population_opinions_within_range():
    spec = PopulationSpec(n=200, sigma_deg=25.0)
    opinions, _ = build_population(spec, np.random.default_rng(2))
    assert opinions.theta.min() >= 0.0
    assert opinions.theta.max() <= math.pi


# -- build_initial_network --------------------------------------------------------


def agents_with(n, tol_deg):
    return [
        AgentParams(tolerance=math.radians(tol_deg), kind=AgentKind.FLEXIBLE)
        for _ in range(n)
    ]


def test_identical_opinions_full_tolerance_all_edges():
    opinions = OpinionState(theta=np.full(3, math.pi / 2))
    g = build_initial_network(opinions, agents_with(3, 180.0), cap=25,
                              rng=np.random.default_rng(0))
    assert g.edge_count == 6


def test_out_of_tolerance_pair_gets_no_edges():
    opinions = OpinionState(theta=np.array([30 * DEG, 150 * DEG]))
    g = build_initial_network(opinions, agents_with(2, 10.0), cap=25,
                              rng=np.random.default_rng(0))
    assert g.edge_count == 0


def test_out_degree_cap_saturates():
    opinions = OpinionState(theta=np.full(100, math.pi / 2))
    g = build_initial_network(opinions, agents_with(100, 180.0), cap=25,
                              rng=np.random.default_rng(3))
    out_degrees = (g.weights > 0).sum(axis=1)
    assert np.all(out_degrees == 25)


def test_initial_network_normalized_and_valid():
    rng = np.random.default_rng(4)
    opinions = OpinionState(theta=rng.uniform(1.0, 2.0, 40))
    agents = agents_with(40, 30.0)
    g = build_initial_network(opinions, agents, cap=10, rng=rng)
    assert g.normalization_violations(1e-9) == []
    assert np.all(g.self_weights > 0) and np.all(g.self_weights < 1)
    # agent params carry the computed self-weights
    assert [a.self_weight for a in agents] == pytest.approx(g.self_weights.tolist())


def test_initial_network_respects_listener_tolerance():
    rng = np.random.default_rng(5)
    theta = rng.uniform(0.5, 2.5, 30)
    opinions = OpinionState(theta=theta)
    tol = [math.radians(d) for d in rng.uniform(5, 60, 30)]
    agents = [AgentParams(tolerance=t, kind=AgentKind.RIGID) for t in tol]
    g = build_initial_network(opinions, agents, cap=25, rng=rng)
    for j, i in g.edge_set():
        assert abs(theta[i] - theta[j]) <= tol[i]


# -- consensus_of -------------------------------------------------------------------


def state_with(theta_deg, edges):
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    n = theta.size
    graph = DynGraph.from_edges(n, [(j, i, 0.5) for j, i in edges])
    agents = [AgentParams(tolerance=1.0, kind=AgentKind.FLEXIBLE) for _ in range(n)]
    return SimState(opinions=OpinionState(theta=theta), graph=graph, agents=agents,
                    rng=np.random.default_rng(0))


def test_consensus_unanimous_connected():
    assert consensus_of(state_with([90.0, 90.0], [(0, 1), (1, 0)]), delta=0.1 * DEG)


def test_consensus_false_for_two_components():
    assert not consensus_of(state_with([90.0, 90.0], []), delta=0.1 * DEG)


def test_consensus_false_when_range_exceeds_delta():
    # one component but a 5-degree spread against delta = 0.057 degrees
    state = state_with([90.0, 95.0], [(0, 1), (1, 0)])
    assert not consensus_of(state, delta=math.radians(0.057))


# -- run_single / run_sweep ------------------------------------------------------------


def test_run_single_deterministic():
    spec = tiny_spec()
    pop = spec.population_for(spec.cells()[0])
    a, _ = run_single(pop, spec, derive_seed(spec.base_seed, 0, 0))
    b, _ = run_single(pop, spec, derive_seed(spec.base_seed, 0, 0))
    assert a.converged_at == b.converged_at
    assert a.consensus == b.consensus
    assert np.array_equal(a.final_opinions, b.final_opinions)


def test_all_rigid_liberal_population_splits():
    # wide spread, low tolerance: the converged network has several factions
    spec = ExperimentSpec(t_max=250)
    pop = PopulationSpec(n=100, sigma_deg=20.0, rigid_fraction=1.0,
                         theta_r_deg=10.0, theta_f_deg=40.0)
    result, _ = run_single(pop, spec, derive_seed(11, 0, 0))
    assert result.n_components >= 2
    assert not result.consensus


def test_sweep_rows_deterministic_grid_order():
    spec = tiny_spec()
    rows = run_sweep(spec)
    assert [(r.sigma_deg, r.theta_r_deg, r.theta_f_deg, r.rigid_fraction) for r in rows] \
        == spec.cells()
    assert all(0.0 <= r.consensus_rate <= 1.0 for r in rows)
    assert all(r.runs == spec.runs_per_cell for r in rows)


def test_sweep_seed_isolation_across_schedules():
    # same spec evaluated serially and with two workers: identical tables
    spec = tiny_spec()
    serial = run_sweep(spec, workers=1)
    parallel = run_sweep(spec, workers=2)
    assert serial == parallel


def test_sweep_cell_results_independent_of_grid_extent():
    # a cell's runs depend on (base_seed, cell_index, run_index) only
    wide = tiny_spec()
    rows_wide, results_wide = run_sweep(wide, keep_results=True)
    narrow = tiny_spec(rigid_fractions=[0.0])
    rows_narrow, results_narrow = run_sweep(narrow, keep_results=True)
    cell = narrow.cells()[0]
    got = [r.final_opinions for r in results_narrow[cell]]
    expected = [r.final_opinions for r in results_wide[cell]]
    assert all(np.array_equal(a, b) for a, b in zip(got, expected))


def test_nonconverged_runs_recorded_not_dropped():
    # t_max=1 forces non-convergence for a stirring population
    spec = tiny_spec(t_max=1, rigid_fractions=[0.0], runs_per_cell=4)
    rows = run_sweep(spec)
    assert rows[0].runs == 4
    assert rows[0].consensus_rate == 0.0
    assert rows[0].mean_t_conv == 1.0

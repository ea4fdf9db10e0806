"""Population construction and seeded Monte Carlo sweeps.

Populations mix rigid (low-tolerance) and flexible (high-tolerance) agents
whose initial opinions come from a truncated Gaussian around a popular
opinion. Group character is the initial spread: conservative groups are
tight, liberal groups wide.

Sweeps run a grid of (sigma, theta_R, theta_F, rigid_fraction) cells with a
fixed number of independent runs per cell. Every run's rng stream derives
from (base_seed, cell_index, run_index), so results do not depend on
evaluation order or scheduling.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .cutset import cutset_timeline
from .engine import (
    DEFAULT_EPS,
    DEFAULT_P_ND,
    DEFAULT_T_MAX,
    RunHistory,
    SimState,
    run_to_convergence,
)
from .graph import (
    MIN_RAW_WEIGHT,
    DynGraph,
    KatzParams,
    katz_self_weights,
    renormalize_all,
    weakly_connected_components,
)
from .opinions import AgentKind, AgentParams, OpinionState, sample_truncated_gaussian

# Sigma bands (degrees) separating group kinds: conservative spreads sit in
# [0, CONSERVATIVE_SIGMA_MAX_DEG], liberal in [LIBERAL_SIGMA_MIN_DEG,
# LIBERAL_SIGMA_MAX_DEG].
CONSERVATIVE_SIGMA_MAX_DEG = 15.0
LIBERAL_SIGMA_MIN_DEG = 20.0
LIBERAL_SIGMA_MAX_DEG = 25.0

DEFAULT_CONSENSUS_DELTA = math.radians(0.1)


class GroupKind:
    CONSERVATIVE = "conservative"
    LIBERAL = "liberal"


@dataclass
class PopulationSpec:
    """Recipe for one population (angles in degrees at this boundary)."""

    n: int = 100
    mu_deg: float = 90.0
    sigma_deg: float = 10.0
    rigid_fraction: float = 0.0
    theta_r_deg: float = 10.0
    theta_f_deg: float = 40.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("population size must be >= 1")
        if not 0.0 <= self.rigid_fraction <= 1.0:
            raise ValueError("rigid_fraction must be in [0, 1]")
        if self.sigma_deg <= 0:
            raise ValueError("sigma_deg must be positive")
        if self.theta_f_deg <= self.theta_r_deg:
            raise ValueError("flexible tolerance must exceed rigid tolerance")

    @property
    def group_kind(self) -> str:
        if self.sigma_deg <= CONSERVATIVE_SIGMA_MAX_DEG:
            return GroupKind.CONSERVATIVE
        return GroupKind.LIBERAL

    @property
    def n_rigid(self) -> int:
        return int(round(self.rigid_fraction * self.n))


@dataclass
class ExperimentSpec:
    """Sweep grid plus the shared run parameters."""

    sigmas_deg: list[float] = field(default_factory=lambda: [10.0, 15.0, 20.0, 25.0])
    theta_rs_deg: list[float] = field(default_factory=lambda: [10.0, 30.0])
    theta_fs_deg: list[float] = field(default_factory=lambda: [40.0, 80.0])
    rigid_fractions: list[float] = field(
        default_factory=lambda: [round(0.1 * k, 1) for k in range(11)]
    )
    runs_per_cell: int = 100
    base_seed: int = 0
    n: int = 100
    mu_deg: float = 90.0
    out_degree_cap: int = 25
    k_c: float = 100.0
    consensus_delta: float = DEFAULT_CONSENSUS_DELTA
    eps: float = DEFAULT_EPS
    t_max: int = DEFAULT_T_MAX
    p_nd: float = DEFAULT_P_ND
    katz: KatzParams = field(default_factory=KatzParams)
    update_mode: str = "in_place"

    def __post_init__(self):
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if self.out_degree_cap < 1:
            raise ValueError("out_degree_cap must be >= 1")

    def cells(self) -> list[tuple[float, float, float, float]]:
        """Grid cells in deterministic order: (sigma, theta_R, theta_F, fraction)."""
        return list(
            itertools.product(
                self.sigmas_deg, self.theta_rs_deg, self.theta_fs_deg, self.rigid_fractions
            )
        )

    def population_for(self, cell: tuple[float, float, float, float]) -> PopulationSpec:
        sigma, theta_r, theta_f, fraction = cell
        return PopulationSpec(
            n=self.n,
            mu_deg=self.mu_deg,
            sigma_deg=sigma,
            rigid_fraction=fraction,
            theta_r_deg=theta_r,
            theta_f_deg=theta_f,
        )


@dataclass
class RunResult:
    """Outcome of one run."""

    converged_at: int | None
    n_components: int
    consensus: bool
    final_opinions: np.ndarray
    cutset_monotone: bool


@dataclass
class SweepRow:
    """Aggregate over one grid cell."""

    sigma_deg: float
    theta_r_deg: float
    theta_f_deg: float
    rigid_fraction: float
    runs: int
    consensus_rate: float
    mean_components: float
    mean_t_conv: float

    @property
    def cell(self) -> tuple[float, float, float, float]:
        return (self.sigma_deg, self.theta_r_deg, self.theta_f_deg, self.rigid_fraction)


def derive_seed(base_seed: int, cell_index: int, run_index: int) -> np.random.SeedSequence:
    """Order-free seed for one run of one cell."""
    return np.random.SeedSequence(entropy=base_seed, spawn_key=(cell_index, run_index))


def build_population(
    spec: PopulationSpec, rng: np.random.Generator, k_c: float = 100.0
) -> tuple[OpinionState, list[AgentParams]]:
    """Sample initial opinions and assign agent types.

    The rigid subset (round(rigid_fraction * n) agents) is chosen uniformly
    at random; agent type is uncorrelated with initial opinion. All agents of
    a type share that type's fixed tolerance.
    """
    theta = sample_truncated_gaussian(
        math.radians(spec.mu_deg), math.radians(spec.sigma_deg), spec.n, rng
    )
    rigid = np.zeros(spec.n, dtype=bool)
    rigid[rng.choice(spec.n, size=spec.n_rigid, replace=False)] = True
    tol_r = math.radians(spec.theta_r_deg)
    tol_f = math.radians(spec.theta_f_deg)
    agents = [
        AgentParams(
            tolerance=tol_r if rigid[i] else tol_f,
            kind=AgentKind.RIGID if rigid[i] else AgentKind.FLEXIBLE,
            sociability_base=k_c,
        )
        for i in range(spec.n)
    ]
    return OpinionState(theta=theta, t=0), agents


def build_initial_network(
    opinions: OpinionState,
    agents: list[AgentParams],
    cap: int = 25,
    rng: np.random.Generator | None = None,
    katz: KatzParams = KatzParams(),
) -> DynGraph:
    """Derive the initial network from opinions and tolerances.

    Every admissible influence edge j -> i (j within i's tolerance) competes
    in a uniformly random order; an edge is kept iff its source is still
    under the out-degree cap. Kept edges get uniform(0,1) raw trust scores,
    then Katz self-weights are computed on the resulting topology and
    in-weights renormalized per listener.
    """
    if cap < 1:
        raise ValueError("out-degree cap must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    n = opinions.n
    theta = opinions.theta
    tol = np.array([a.tolerance for a in agents])
    admissible = np.abs(theta[:, np.newaxis] - theta[np.newaxis, :]) <= tol[np.newaxis, :]
    np.fill_diagonal(admissible, False)
    # Random visiting order interacts with the cap per source only, so keeping
    # the cap smallest-priority edges of each source is equivalent to a global
    # random-order scan.
    priority = rng.random((n, n))
    keep = np.zeros((n, n), dtype=bool)
    for j in range(n):
        targets = np.nonzero(admissible[j])[0]
        if targets.size > cap:
            order = np.argsort(priority[j, targets], kind="stable")
            targets = targets[order[:cap]]
        keep[j, targets] = True
    weights = np.zeros((n, n))
    weights[keep] = np.maximum(rng.uniform(0.0, 1.0, size=int(keep.sum())), MIN_RAW_WEIGHT)
    graph = DynGraph(n, weights=weights)
    graph.self_weights = katz_self_weights(graph, katz)
    renormalize_all(graph)
    for a, w in zip(agents, graph.self_weights):
        a.self_weight = float(w)
    return graph


def consensus_of(state: SimState, delta: float = DEFAULT_CONSENSUS_DELTA) -> bool:
    """Group consensus: a single weak component and opinion range <= delta."""
    if len(weakly_connected_components(state.graph)) != 1:
        return False
    theta = state.opinions.theta
    return float(theta.max() - theta.min()) <= delta


def run_single(
    population: PopulationSpec,
    spec: ExperimentSpec,
    seed: np.random.SeedSequence | int,
    history: RunHistory | None = None,
) -> tuple[RunResult, SimState]:
    """One seeded run: build, converge, classify."""
    rng = np.random.default_rng(seed)
    opinions, agents = build_population(population, rng, k_c=spec.k_c)
    graph = build_initial_network(
        opinions, agents, cap=spec.out_degree_cap, rng=rng, katz=spec.katz
    )
    if history is None:
        history = RunHistory(record_opinions=False)
    state = SimState(
        opinions=opinions,
        graph=graph,
        agents=agents,
        rng=rng,
        p_nd=spec.p_nd,
        update_mode=spec.update_mode,
        katz=spec.katz,
        history=history,
    )
    state, converged_at = run_to_convergence(state, eps=spec.eps, t_max=spec.t_max)
    components = weakly_connected_components(state.graph)
    consensus = converged_at is not None and consensus_of(state, spec.consensus_delta)
    timeline = cutset_timeline(history.edge_sets, state.graph)
    result = RunResult(
        converged_at=converged_at,
        n_components=len(components),
        consensus=consensus,
        final_opinions=state.opinions.theta.copy(),
        cutset_monotone=timeline.monotone,
    )
    return result, state


def _run_cell(args) -> tuple[int, list[RunResult]]:
    spec, cell_index, cell = args
    population = spec.population_for(cell)
    results = []
    for run_index in range(spec.runs_per_cell):
        seed = derive_seed(spec.base_seed, cell_index, run_index)
        result, _ = run_single(population, spec, seed)
        results.append(result)
    return cell_index, results


def _aggregate(cell: tuple[float, float, float, float], spec: ExperimentSpec,
               results: list[RunResult]) -> SweepRow:
    t_conv = [r.converged_at if r.converged_at is not None else spec.t_max for r in results]
    return SweepRow(
        sigma_deg=cell[0],
        theta_r_deg=cell[1],
        theta_f_deg=cell[2],
        rigid_fraction=cell[3],
        runs=len(results),
        consensus_rate=sum(r.consensus for r in results) / len(results),
        mean_components=float(np.mean([r.n_components for r in results])),
        mean_t_conv=float(np.mean(t_conv)),
    )


def run_sweep(
    spec: ExperimentSpec,
    workers: int = 1,
    keep_results: bool = False,
    progress=None,
) -> list[SweepRow] | tuple[list[SweepRow], dict]:
    """Run the full grid; rows come back in deterministic grid order.

    Non-convergent runs count as non-consensus at t_max; they are aggregated,
    never dropped. With keep_results=True the per-run results are returned as
    a dict keyed by cell. progress, when given, is called with (done, total)
    after each finished cell.
    """
    cells = spec.cells()
    jobs = [(spec, idx, cell) for idx, cell in enumerate(cells)]
    per_cell: dict[int, list[RunResult]] = {}
    done = 0
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell_index, results in pool.map(_run_cell, jobs, chunksize=1):
                per_cell[cell_index] = results
                done += 1
                if progress is not None:
                    progress(done, len(cells))
    else:
        for job in jobs:
            cell_index, results = _run_cell(job)
            per_cell[cell_index] = results
            done += 1
            if progress is not None:
                progress(done, len(cells))
    rows = [_aggregate(cell, spec, per_cell[idx]) for idx, cell in enumerate(cells)]
    if keep_results:
        return rows, {cells[idx]: res for idx, res in per_cell.items()}
    return rows

"""Opinion dynamics on adaptive directed weighted networks.

A seedable simulator of bounded-confidence belief updates coupled to an
evolving trust network, plus edge cut-set analysis of group splits and a
Monte Carlo harness for consensus-rate studies.
"""

from .config import ConfigError, RunConfig, default_config, dump_config, parse_config
from .cutset import CutsetReport, CutsetTimeline, cutset_timeline, edge_cutset
from .engine import (
    InteractionLedger,
    Neighborhood,
    RunHistory,
    SimState,
    apply_tie_gain,
    apply_tie_loss,
    compute_neighborhood,
    run_to_convergence,
    step,
    update_agent,
)
from .experiments import (
    ExperimentSpec,
    PopulationSpec,
    RunResult,
    SweepRow,
    build_initial_network,
    build_population,
    consensus_of,
    derive_seed,
    run_single,
    run_sweep,
)
from .graph import (
    DynGraph,
    KatzParams,
    NoPathError,
    PowerIterationError,
    enumerate_paths,
    katz_scores,
    katz_self_weights,
    nondirect_trust_score,
    renormalize_all,
    renormalize_in_weights,
    spectral_radius,
    weakly_connected_components,
)
from .opinions import (
    AgentKind,
    AgentParams,
    OpinionState,
    sample_truncated_gaussian,
    weighted_circular_update,
    within_tolerance,
)

__version__ = "0.1.0"

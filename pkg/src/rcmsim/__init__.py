"""Distributed consensus to the Riemannian center of mass on Lie groups."""

from .geometry import ConvexityParams, Euclidean, SO3, hat, vee
from .graph import Graph, generate
from .rcm import consensus_error, in_convexity_ball, karcher_mean, karcher_residual, rcm_error
from .solvers import NetworkState, SolverConfig, TraceRecord, run, run_tracking

__all__ = [
    "ConvexityParams",
    "Euclidean",
    "SO3",
    "hat",
    "vee",
    "Graph",
    "generate",
    "consensus_error",
    "in_convexity_ball",
    "karcher_mean",
    "karcher_residual",
    "rcm_error",
    "NetworkState",
    "SolverConfig",
    "TraceRecord",
    "run",
    "run_tracking",
]

__version__ = "0.1.0"

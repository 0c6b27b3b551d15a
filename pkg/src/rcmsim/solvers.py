"""Discrete-time consensus solvers behind a uniform run() driver.

All methods are forward-Euler discretizations with simultaneous (Jacobi)
updates: every quantity in a step is computed from the pre-step state, and the
tracking signal v uses the pre-update w.  This keeps the per-agent reading
distributed and preserves sum(w_i) = 0 exactly through the Laplacian update.

Methods:
  algorithm1  gradient flow on the consensus error plus gradient tracking of
              the average local-cost gradient on the Lie algebra
  dgf         the same flow without tracking (ablation; stalls off-consensus)
  tron        Riemannian consensus only, oblivious to the target points
  penalty     escalating quadratic-penalty gradient descent
  lagrangian  first-order augmented-Lagrangian saddle scheme with one
              multiplier per oriented edge
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import math
import numpy as np

from .errors import CutLocusError, DegenerateMatrixError, NumericalError, SolverError
from .rcm import consensus_error, karcher_mean, rcm_error

METHODS = ("algorithm1", "dgf", "tron", "penalty", "lagrangian")
INIT_MODES = ("at_z", "at_identity", "explicit")


@dataclass
class NetworkState:
    """Stacked per-agent states: x (N, ...) on the group, w (N, d) on the algebra."""

    x: np.ndarray
    w: np.ndarray


@dataclass
class SolverConfig:
    method: str = "algorithm1"
    step_size: float = 0.1
    iterations: int = 200
    init_mode: str = "at_z"
    # penalty: inner gradient-descent iterations per outer stage s, with
    # penalty parameter mu(s) = 1/sqrt(s) dividing the consensus term
    penalty_inner: int = 50
    # lagrangian: classical first-order saddle scheme by default; a positive
    # augmentation adds the quadratic consensus term and speeds it up markedly
    dual_step: float = 0.01
    augmentation: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.step_size <= 0.0:
            raise ValueError("step_size must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"unknown init_mode {self.init_mode!r}")
        if self.penalty_inner < 1:
            raise ValueError("penalty_inner must be at least 1")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    consensus_error: float
    rcm_error: float


def consensus_direction(group, x, graph):
    """Per-agent sum over neighbors of left_log(x_i, x_j); shape (N, d)."""
    out = np.zeros((graph.n_agents, group.algebra_dim))
    src, dst = graph.directed_edges
    if src.size:
        np.add.at(out, src, group.left_log(x[src], x[dst]))
    return out


def tracking_signal(group, state, z):
    """v_i = -w_i + left_log(z_i, x_i), the gradient-tracking output."""
    return -state.w + group.left_log(z, state.x)


def algorithm1_step(group, state, z, graph, eps):
    """One Euler step of the tracking-augmented consensus flow."""
    v = tracking_signal(group, state, z)
    direction = consensus_direction(group, state.x, graph) - v
    x_new = group.retract(state.x, direction, eps)
    w_new = state.w + eps * graph.laplacian_apply(v)
    return NetworkState(x_new, w_new)


def dgf_step(group, state, z, graph, eps):
    """Distributed gradient flow: consensus pull plus the raw local-cost pull."""
    direction = consensus_direction(group, state.x, graph) + group.left_log(state.x, z)
    return NetworkState(group.retract(state.x, direction, eps), state.w)


def tron_step(group, state, graph, eps):
    """Riemannian consensus descent on the consensus error alone."""
    direction = consensus_direction(group, state.x, graph)
    return NetworkState(group.retract(state.x, direction, eps), state.w)


def penalty_step(group, state, z, graph, eps, weight):
    """One gradient step on f(x) + weight * phi(x)."""
    direction = group.left_log(state.x, z) + weight * consensus_direction(
        group, state.x, graph
    )
    return NetworkState(group.retract(state.x, direction, eps), state.w)


def lagrangian_step(group, state, multipliers, z, graph, config):
    """Primal descent on the augmented Lagrangian, then dual ascent.

    Constraints are c_e(x) = left_log(x_i, x_j) per oriented edge e = (i, j)
    with i < j; the multiplier coupling uses the flat-space first-order form
    (exact on R^n), the augmentation gradient is exact on the group.
    """
    e = graph.edge_array
    x = state.x
    direction = group.left_log(x, z) + config.augmentation * consensus_direction(
        group, x, graph
    )
    if len(e):
        np.add.at(direction, e[:, 0], multipliers)
        np.add.at(direction, e[:, 1], -multipliers)
        constraint = group.left_log(x[e[:, 0]], x[e[:, 1]])
        multipliers = multipliers + config.dual_step * constraint
    x_new = group.retract(x, direction, config.step_size)
    return NetworkState(x_new, state.w), multipliers


def initial_state(group, z, config, x0=None):
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    if config.init_mode == "explicit":
        if x0 is None:
            raise ValueError("init_mode 'explicit' requires x0")
        x = np.array(x0, dtype=float, copy=True)
    elif config.init_mode == "at_identity":
        x = np.broadcast_to(group.identity(), z.shape).copy()
    else:
        x = np.array(z, copy=True)
    w = np.zeros((n, group.algebra_dim))
    return NetworkState(x, w)


def run(group, z, graph, config, x0=None, z_bar=None) -> Tuple[List[TraceRecord], NetworkState]:
    """Execute config.iterations steps, recording both metrics every iteration.

    z_bar (the centralized Karcher mean) is computed once up front unless
    supplied.  Metrics are recorded at iteration 0 and after each step.
    Deterministic: the driver itself draws no randomness.
    """
    z = np.asarray(z, dtype=float)
    if not graph.is_connected():
        raise ValueError("solvers require a connected graph")
    if z.shape[0] != graph.n_agents:
        raise ValueError("number of points must match number of agents")
    if z_bar is None:
        z_bar = karcher_mean(group, z)
    state = initial_state(group, z, config, x0)
    multipliers = np.zeros((len(graph.edge_array), group.algebra_dim))

    def record(k):
        return TraceRecord(
            iteration=k,
            consensus_error=consensus_error(group, state.x, graph),
            rcm_error=rcm_error(group, state.x, z_bar),
        )

    traces = [record(0)]
    eps = config.step_size
    for k in range(1, config.iterations + 1):
        try:
            if config.method == "algorithm1":
                state = algorithm1_step(group, state, z, graph, eps)
            elif config.method == "dgf":
                state = dgf_step(group, state, z, graph, eps)
            elif config.method == "tron":
                state = tron_step(group, state, graph, eps)
            elif config.method == "penalty":
                stage = (k - 1) // config.penalty_inner + 1
                weight = math.sqrt(stage)  # 1 / mu(s) with mu(s) = 1/sqrt(s)
                state = penalty_step(group, state, z, graph, eps, weight)
            else:
                state, multipliers = lagrangian_step(
                    group, state, multipliers, z, graph, config
                )
        except (CutLocusError, NumericalError, DegenerateMatrixError) as exc:
            raise SolverError(
                f"{config.method} diverged at iteration {k}: {exc}",
                iteration=k,
            ) from exc
        traces.append(record(k))
    return traces, state


def run_tracking(group, z_of_t, graph, config, x0=None) -> Tuple[List[TraceRecord], NetworkState]:
    """Time-varying-input mode: z(t) changes per iteration, algorithm1 only.

    Best-effort empirical mode with no convergence guarantee; the rcm_error of
    each record is measured against the Karcher mean of z at that iteration.
    """
    if config.method != "algorithm1":
        raise ValueError("tracking mode is only defined for algorithm1")
    z0 = np.asarray(z_of_t(0), dtype=float)
    if not graph.is_connected():
        raise ValueError("solvers require a connected graph")
    state = initial_state(group, z0, config, x0)

    def record(k, z_k):
        return TraceRecord(
            iteration=k,
            consensus_error=consensus_error(group, state.x, graph),
            rcm_error=rcm_error(group, state.x, karcher_mean(group, z_k)),
        )

    traces = [record(0, z0)]
    for k in range(1, config.iterations + 1):
        z_k = np.asarray(z_of_t(k), dtype=float)
        try:
            state = algorithm1_step(group, state, z_k, graph, config.step_size)
        except (CutLocusError, NumericalError, DegenerateMatrixError) as exc:
            raise SolverError(
                f"tracking run diverged at iteration {k}: {exc}",
                iteration=k,
            ) from exc
        traces.append(record(k, z_k))
    return traces, state

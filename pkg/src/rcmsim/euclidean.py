"""Exact machinery for the Euclidean case.

In R^n the tracking-augmented flow is linear: with v = -w + x - z the stacked
state obeys (v', x') = (A kron I_n)(v, x) for the 2N x 2N block matrix

    A = [[-L - I, -L],
        [-I,     -L]].

This module builds A, verifies its spectrum (a simple zero eigenvalue, all
other eigenvalues in the open left half-plane on a connected graph), computes
the closed-form limit through the rank-one projector, and runs the dense
simulation used to cross-check the generic solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

ZERO_EIG_TOL = 1e-9


@dataclass(frozen=True)
class SystemMatrix:
    a: np.ndarray
    n_agents: int


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    zero_multiplicity: int
    max_nonzero_real_part: float
    lemma_holds: bool


def _check_laplacian(laplacian):
    l = np.asarray(laplacian, dtype=float)
    if l.ndim != 2 or l.shape[0] != l.shape[1]:
        raise ValueError("Laplacian must be square")
    if not np.allclose(l, l.T, atol=1e-9):
        raise ValueError("Laplacian must be symmetric")
    if np.max(np.abs(l.sum(axis=1))) > 1e-9:
        raise ValueError("Laplacian rows must sum to zero")
    if np.min(np.linalg.eigvalsh(l)) < -1e-9:
        raise ValueError("Laplacian must be positive semidefinite")
    return l


def build_system_matrix(laplacian) -> SystemMatrix:
    """Assemble the 2N x 2N block matrix; no arithmetic beyond negation."""
    l = _check_laplacian(laplacian)
    n = l.shape[0]
    eye = np.eye(n)
    a = np.block([[-l - eye, -l], [-eye, -l]])
    return SystemMatrix(a=a, n_agents=n)


def analyze_spectrum(m: SystemMatrix, tol=ZERO_EIG_TOL) -> SpectrumReport:
    """Dense eigendecomposition with a zero-eigenvalue count.

    lemma_holds is True when zero is simple and every other eigenvalue has
    real part below -tol, which on a connected graph is the marginal-stability
    property the closed-form limit rests on.
    """
    try:
        eigenvalues = np.linalg.eigvals(m.a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    near_zero = np.abs(eigenvalues) <= tol
    zero_multiplicity = int(near_zero.sum())
    nonzero = eigenvalues[~near_zero]
    max_real = float(np.max(nonzero.real)) if len(nonzero) else float("-inf")
    return SpectrumReport(
        eigenvalues=eigenvalues,
        zero_multiplicity=zero_multiplicity,
        max_nonzero_real_part=max_real,
        lemma_holds=(zero_multiplicity == 1 and max_real < -tol),
    )


def predicted_limit(x0, z, n_agents):
    """Closed-form limit of the flow started at x0 with w(0) = 0.

    Computes x* = 1_N kron mean(z) (and v* = 0) directly, and cross-checks it
    against the projector (p q^T) kron I_n applied to (v(0), x(0)) built from
    the zero left/right eigenvectors p = (0, 1), q = (-1, 1)/N.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if x0.shape != z.shape or x0.size % n_agents != 0:
        raise ValueError("x0 and z must be stacked (N*n,) vectors")
    n = x0.size // n_agents
    z_bar = z.reshape(n_agents, n).mean(axis=0)
    x_star = np.tile(z_bar, n_agents)
    v_star = np.zeros_like(x_star)

    p = np.concatenate([np.zeros(n_agents), np.ones(n_agents)])
    q = np.concatenate([-np.ones(n_agents), np.ones(n_agents)]) / n_agents
    projector = np.kron(np.outer(p, q), np.eye(n))
    limit = projector @ np.concatenate([x0 - z, x0])
    if np.max(np.abs(limit - np.concatenate([v_star, x_star]))) > 1e-12:
        raise NumericalError("projector limit disagrees with the direct average")
    return x_star, v_star


def simulate_euclidean(laplacian, z, x0, eps, iterations):
    """Forward-Euler trajectory of (v, x); returns (v_traj, x_traj).

    Both trajectories have shape (iterations + 1, N*n).  Raises NumericalError
    on instability (state norm growth beyond 1e3 of the initial scale) and
    ValueError when eps violates the Euler stability bound.
    """
    m = build_system_matrix(laplacian)
    report = analyze_spectrum(m)
    most_negative = float(np.min(report.eigenvalues.real))
    if most_negative < 0 and eps >= 2.0 / abs(most_negative):
        raise ValueError(
            f"eps={eps} violates the Euler stability bound 2/|lambda_min|="
            f"{2.0 / abs(most_negative):.6g}"
        )
    z = np.asarray(z, dtype=float).ravel()
    x = np.asarray(x0, dtype=float).ravel().copy()
    n = x.size // m.n_agents
    v = x - z  # w(0) = 0 convention
    state = np.concatenate([v, x]).reshape(2 * m.n_agents, n)
    v_traj = np.empty((iterations + 1, m.n_agents * n))
    x_traj = np.empty((iterations + 1, m.n_agents * n))
    v_traj[0], x_traj[0] = v, x
    limit_scale = max(np.linalg.norm(state), 1.0)
    for k in range(1, iterations + 1):
        state = state + eps * (m.a @ state)
        norm = np.linalg.norm(state)
        if not np.isfinite(norm) or norm > 1e3 * limit_scale:
            raise NumericalError(f"trajectory diverged at iteration {k}")
        v_traj[k] = state[: m.n_agents].ravel()
        x_traj[k] = state[m.n_agents :].ravel()
    return v_traj, x_traj

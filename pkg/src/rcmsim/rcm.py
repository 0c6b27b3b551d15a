"""Centralized Karcher-mean oracle and the error metrics used everywhere else.

The fixed-point iteration here is the independent reference the distributed
solvers are checked against, so it deliberately shares no code with them
beyond the group primitives.
"""

from __future__ import annotations

import numpy as np

from .errors import CutLocusError, NoConvergenceError
from .geometry import ConvexityParams


def karcher_mean(group, points, step=1.0, tol=1e-12, max_iter=10000):
    """Riemannian center of mass of stacked points, by fixed-point iteration.

    Iterates y <- retract(y, mean_i left_log(y, z_i), step) until the Karcher
    residual ||sum_i left_log(y, z_i)|| drops below tol.  Contractive for
    points inside a common convexity ball.
    """
    points = np.asarray(points, dtype=float)
    if not 0.0 < step <= 1.0:
        raise ValueError("step must be in (0, 1]")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    n = points.shape[0]
    y = np.array(points[0], copy=True)
    for _ in range(max_iter):
        logs = group.left_log(y, points)
        if group.norm(logs.sum(axis=0)) <= tol:
            return y
        y = group.retract(y, logs.mean(axis=0), step)
    raise NoConvergenceError(f"Karcher iteration did not reach tol={tol} in {max_iter} steps")


def karcher_residual(group, y, points):
    """||sum_i left_log(y, z_i)||; zero exactly at the center of mass."""
    points = np.asarray(points, dtype=float)
    return float(group.norm(group.left_log(y, points).sum(axis=0)))


def consensus_error(group, x, graph):
    """Half the sum of squared geodesic distances along graph edges."""
    x = np.asarray(x, dtype=float)
    e = graph.edge_array
    if len(e) == 0:
        return 0.0
    d = group.distance(x[e[:, 0]], x[e[:, 1]])
    return 0.5 * float(np.sum(d**2))


def rcm_error(group, x, z_bar):
    """Sum of squared geodesic distances of each agent from the mean z_bar."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(group.distance(x, z_bar) ** 2))


def in_convexity_ball(group, points, params=None):
    """Certify that the points fit in a common ball of radius < r*.

    Uses the Karcher mean itself as the candidate center; True certifies
    membership, False is inconclusive (the existential center is not
    constructive).
    """
    if params is None:
        params = ConvexityParams.so3_default()
    points = np.asarray(points, dtype=float)
    if points.shape[0] == 1:
        return True
    try:
        c = karcher_mean(group, points)
        return bool(np.max(group.distance(c, points)) < params.r_star)
    except (CutLocusError, NoConvergenceError):
        return False

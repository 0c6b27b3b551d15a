"""Group primitives for SO(3) and flat Euclidean space.

Every tangent vector is stored left-trivialized: a tangent vector at a point x
is represented by its coordinates in the Lie algebra at the identity, and the
retraction supplies the missing left translation (x, xi) -> x * Exp(xi).  For
SO(3) the algebra coordinates are the axis-angle 3-vector of the skew matrix
under the hat map; with the metric <xi, eta> = tr(xi^T eta) / 2 the induced
norm of the coordinates is exactly the rotation angle, so all algebra-level
linear algebra reduces to ordinary dot products on R^3.

All operations broadcast over leading axes, so a stacked network state of
shape (N, 3, 3) goes through exp/log/retract in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CutLocusError,
    DegenerateMatrixError,
    GroupMismatchError,
    NumericalError,
)

# Below this angle exp/log switch to second-order Taylor forms to avoid
# sin(theta)/theta cancellation.
SMALL_ANGLE = 1e-8

# log refuses inputs with rotation angle above pi - margin instead of
# clamping; silent clamping would mask solver divergence.
CUT_LOCUS_MARGIN = 1e-9

# Derived for SO(3) with the tr/2 metric: injectivity radius pi, sectional
# curvature bounded by 1/4, hence r* = min(pi, 2*pi)/2 = pi/2.  These numbers
# are a consequence of the convexity-radius formula, not quoted from anywhere.
SO3_INJECTIVITY = math.pi
SO3_CURVATURE_UPPER = 0.25


@dataclass(frozen=True)
class ConvexityParams:
    """Injectivity radius, curvature upper bound, and the convexity radius."""

    inj: float
    curvature_upper: float

    @property
    def r_star(self) -> float:
        if self.curvature_upper > 0:
            return 0.5 * min(self.inj, math.pi / math.sqrt(self.curvature_upper))
        return 0.5 * self.inj

    @classmethod
    def so3_default(cls) -> "ConvexityParams":
        return cls(inj=SO3_INJECTIVITY, curvature_upper=SO3_CURVATURE_UPPER)


def hat(v):
    """Axis-angle coordinates (..., 3) -> skew matrices (..., 3, 3)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(m):
    """Inverse of :func:`hat`; takes the skew part's coordinates."""
    m = np.asarray(m, dtype=float)
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


class SO3:
    """The rotation group with the bi-invariant metric <u, v> = tr(u^T v)/2."""

    algebra_dim = 3

    def __eq__(self, other):
        return isinstance(other, SO3)

    def __hash__(self):
        return hash("SO3")

    def __repr__(self):
        return "SO3()"

    def identity(self):
        return np.eye(3)

    def compose(self, x, y):
        return np.asarray(x) @ np.asarray(y)

    def inverse(self, x):
        return np.swapaxes(np.asarray(x), -1, -2)

    def exp(self, xi):
        """Rodrigues formula, with a Taylor branch near zero."""
        xi = np.asarray(xi, dtype=float)
        theta = np.linalg.norm(xi, axis=-1)
        k = hat(xi)
        k2 = k @ k
        small = theta < SMALL_ANGLE
        t = np.where(small, 1.0, theta)
        a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(t) / t)
        b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(t)) / t**2)
        return np.eye(3) + a[..., None, None] * k + b[..., None, None] * k2

    def log(self, g, margin=CUT_LOCUS_MARGIN):
        """Axis-angle coordinates of a rotation.

        Raises CutLocusError if any rotation angle exceeds pi - margin.
        """
        r = np.asarray(g, dtype=float)
        tr = np.trace(r, axis1=-2, axis2=-1)
        theta = np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))
        if np.any(theta > math.pi - margin):
            raise CutLocusError(
                f"rotation angle {np.max(theta):.12g} within {margin:g} of pi"
            )
        w = vee(r - np.swapaxes(r, -1, -2))  # = 2 sin(theta) * axis
        small = theta < SMALL_ANGLE
        t = np.where(small, 1.0, theta)
        c = np.where(small, 0.5 + theta**2 / 12.0, t / (2.0 * np.sin(t)))
        return c[..., None] * w

    def left_log(self, x, y):
        """Left-trivialized log: Log(x^-1 y)."""
        return self.log(self.compose(self.inverse(x), y))

    def distance(self, x, y):
        return np.linalg.norm(self.left_log(x, y), axis=-1)

    def inner(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if xi.shape[-1] != 3 or eta.shape[-1] != 3:
            raise GroupMismatchError("SO(3) algebra vectors must have 3 coordinates")
        return np.einsum("...i,...i->...", xi, eta)

    def norm(self, xi):
        return np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)

    def retract(self, x, xi, step=1.0):
        """x * Exp(step * xi), re-projected to kill orthogonality drift."""
        v = step * np.asarray(xi, dtype=float)
        # a diverging solver produces astronomically large tangent vectors
        # whose Rodrigues terms overflow; fail loudly before that happens
        if not np.all(np.isfinite(v)) or (v.size and np.max(np.abs(v)) > 1e100):
            raise NumericalError("non-finite or overflowing tangent vector in retract")
        return self.project(self.compose(x, self.exp(v)))

    def project(self, g):
        """Nearest special-orthogonal matrix via the polar factor."""
        r = np.asarray(g, dtype=float)
        try:
            u, s, vt = np.linalg.svd(r)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMatrixError(f"polar decomposition failed: {exc}") from None
        if np.any(s[..., -1] <= 1e-8 * np.maximum(s[..., 0], 1e-300)):
            raise DegenerateMatrixError("rank-deficient matrix has no unique polar factor")
        p = u @ vt
        det = np.linalg.det(p)
        if np.any(det < 0):
            u = u.copy()
            u[..., :, -1] *= np.where(det < 0, -1.0, 1.0)[..., None]
            p = u @ vt
        return p

    def sample_in_ball(self, center, radius, rng):
        """Draw a point at geodesic distance < radius from center.

        Uniform axis, radius scaled by u^(1/3) for approximate volume
        weighting; deterministic in the generator state.
        """
        if radius == 0.0:
            return np.array(center, dtype=float, copy=True)
        direction = rng.standard_normal(3)
        while np.linalg.norm(direction) < 1e-12:
            direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        angle = radius * rng.random() ** (1.0 / 3.0)
        return self.retract(center, angle * direction)

    def random_point(self, rng):
        """A random rotation from the QR factor of a Gaussian matrix."""
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1.0
        return q


class Euclidean:
    """R^n as an additive group; every map is the flat-space special case."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n
        self.algebra_dim = n

    def __eq__(self, other):
        return isinstance(other, Euclidean) and other.n == self.n

    def __hash__(self):
        return hash(("Euclidean", self.n))

    def __repr__(self):
        return f"Euclidean({self.n})"

    def identity(self):
        return np.zeros(self.n)

    def compose(self, x, y):
        return np.asarray(x, dtype=float) + np.asarray(y, dtype=float)

    def inverse(self, x):
        return -np.asarray(x, dtype=float)

    def exp(self, xi):
        return np.array(xi, dtype=float, copy=True)

    def log(self, g, margin=None):
        return np.array(g, dtype=float, copy=True)

    def left_log(self, x, y):
        return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

    def distance(self, x, y):
        return np.linalg.norm(self.left_log(x, y), axis=-1)

    def inner(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if xi.shape[-1] != self.n or eta.shape[-1] != self.n:
            raise GroupMismatchError(f"expected {self.n}-dimensional vectors")
        return np.einsum("...i,...i->...", xi, eta)

    def norm(self, xi):
        return np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)

    def retract(self, x, xi, step=1.0):
        return np.asarray(x, dtype=float) + step * np.asarray(xi, dtype=float)

    def project(self, g):
        return np.array(g, dtype=float, copy=True)

    def sample_in_ball(self, center, radius, rng):
        if radius == 0.0:
            return np.array(center, dtype=float, copy=True)
        direction = rng.standard_normal(self.n)
        while np.linalg.norm(direction) < 1e-12:
            direction = rng.standard_normal(self.n)
        direction /= np.linalg.norm(direction)
        length = radius * rng.random() ** (1.0 / self.n)
        return np.asarray(center, dtype=float) + length * direction

    def random_point(self, rng):
        return rng.standard_normal(self.n)

"""Reference elements: the P1-nonconforming vertex basis, the DSSY family and
tensor Gauss-Legendre quadrature on the reference square ``[-1, 1]^2``."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import CORNER_SIGNS, MeshError, UniformMesh

DEFAULT_ELL = 1
DEFAULT_QUAD_POINTS = 6

# DSSY degrees of freedom: midpoints of the right, top, left and bottom edges.
DSSY_NODES = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])

_THETA = {
    0: ((2, 1.0),),
    1: ((2, 1.0), (4, -5.0 / 3.0)),
    2: ((2, 1.0), (4, -25.0 / 6.0), (6, 7.0 / 2.0)),
}


def _check_ell(ell):
    if ell not in _THETA:
        raise ValueError(f"DSSY index ell must be 0, 1 or 2, got {ell!r}")


def theta(ell: int, t):
    _check_ell(ell)
    t = np.asarray(t, dtype=float)
    return sum(c * t**p for p, c in _THETA[ell])


def dtheta(ell: int, t):
    _check_ell(ell)
    t = np.asarray(t, dtype=float)
    return sum(c * p * t ** (p - 1) for p, c in _THETA[ell])


def dssy_coefficients(ell: int = DEFAULT_ELL) -> np.ndarray:
    """Coefficients of the four reference basis functions over the monomials
    ``(1, x, y, theta(x) - theta(y))``; row ``j`` is the function dual to
    ``DSSY_NODES[j]``.

    The weight on the theta term is fixed by duality at the off-axis nodes,
    ``+-1 / (4 theta(1))``; for ``ell = 1`` this is -3/8 for the x-nodes and
    3/8 for the y-nodes.
    """
    _check_ell(ell)
    c = 1.0 / (4.0 * float(theta(ell, 1.0)))
    return np.array(
        [
            [0.25, 0.5, 0.0, c],
            [0.25, 0.0, 0.5, -c],
            [0.25, -0.5, 0.0, c],
            [0.25, 0.0, -0.5, -c],
        ]
    )


def dssy_ref_eval(j: int, xhat, yhat, ell: int = DEFAULT_ELL):
    """Value and gradient of the reference DSSY function ``j`` (1..4).

    Returns ``(value, (d/dxhat, d/dyhat))``; accepts scalars or arrays.
    """
    if j not in (1, 2, 3, 4):
        raise ValueError(f"DSSY basis index must be in 1..4, got {j!r}")
    a0, ax, ay, at = dssy_coefficients(ell)[j - 1]
    xhat = np.asarray(xhat, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    val = a0 + ax * xhat + ay * yhat + at * (theta(ell, xhat) - theta(ell, yhat))
    gx = ax + at * dtheta(ell, xhat)
    gy = ay - at * dtheta(ell, yhat)
    return val, (gx, gy)


def p1nc_gradient(mesh: UniformMesh, vertex: tuple[int, int], cell: tuple[int, int]) -> np.ndarray:
    """Constant gradient of the vertex basis function ``phi_jk`` on a cell
    sharing the vertex ``V_jk``."""
    (vj, vk), (cj, ck) = vertex, cell
    mesh._check_cell(cj, ck)
    dj, dk = cj - vj, ck - vk
    if dj not in (0, 1) or dk not in (0, 1):
        raise MeshError(f"cell {cell} does not contain vertex {vertex}")
    # V_jk is the top-right corner of Q_jk, top-left of Q_{j+1,k}, ...
    sx = 1.0 if dj == 0 else -1.0
    sy = 1.0 if dk == 0 else -1.0
    return np.array([sx, sy]) / mesh.h


def p1nc_local(xhat, yhat):
    """Values of the four local vertex basis functions on a cell in reference
    coordinates; shape ``xhat.shape + (4,)``.  Corner order follows
    :data:`nccavity.mesh.CORNER_SIGNS`."""
    xhat = np.asarray(xhat, dtype=float)[..., None]
    yhat = np.asarray(yhat, dtype=float)[..., None]
    return 0.5 + 0.5 * (CORNER_SIGNS[:, 0] * xhat + CORNER_SIGNS[:, 1] * yhat)


@dataclass(frozen=True)
class AffineMap:
    """``x = center + (h/2) xhat`` from the reference square onto a cell."""

    center: tuple[float, float]
    h: float

    @classmethod
    def for_cell(cls, mesh: UniformMesh, j: int, k: int) -> "AffineMap":
        mesh._check_cell(j, k)
        return cls(((j - 0.5) * mesh.h, (k - 0.5) * mesh.h), mesh.h)

    def forward(self, xhat, yhat):
        return (
            self.center[0] + 0.5 * self.h * np.asarray(xhat),
            self.center[1] + 0.5 * self.h * np.asarray(yhat),
        )

    def inverse(self, x, y):
        return (
            (np.asarray(x) - self.center[0]) * 2.0 / self.h,
            (np.asarray(y) - self.center[1]) * 2.0 / self.h,
        )

    @property
    def jacobian(self) -> float:
        return 0.25 * self.h * self.h


@dataclass(frozen=True)
class QuadratureRule:
    n_points: int
    points: np.ndarray  # (n, 2) on [-1, 1]^2
    weights: np.ndarray  # (n,), summing to 4

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.points[:, 0], self.points[:, 1])))


@lru_cache(maxsize=None)
def gauss_1d(n: int):
    if n < 1:
        raise ValueError("need at least one quadrature point")
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def gauss_rule(n_points: int = DEFAULT_QUAD_POINTS) -> QuadratureRule:
    """Tensor Gauss-Legendre rule, exact for per-variable degree ``2 n - 1``."""
    x, w = gauss_1d(n_points)
    X, Y = np.meshgrid(x, x, indexing="xy")
    W = np.outer(w, w)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    wts = W.ravel()
    pts.flags.writeable = False
    wts.flags.writeable = False
    return QuadratureRule(n_points, pts, wts)

"""Global discrete spaces: vertex-based nonconforming velocity, the
checkerboard-free piecewise-constant pressure and the lid lifting.

A velocity coefficient vector is laid out as ``[xi_0..xi_{n-1}, eta_0..eta_{n-1}]``
with ``n = (N-1)^2`` interior vertices in the order of
:meth:`nccavity.mesh.UniformMesh.vertex_index`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .elements import DEFAULT_ELL, dssy_ref_eval, p1nc_local
from .mesh import CORNER_SIGNS, MeshError, UniformMesh


@dataclass(frozen=True)
class BoundaryLifting:
    """Fixed field carrying the lid velocity ``(1, 0)``.

    Only the first velocity component is nonzero.  On a top-row cell it is
    half the sum of the top-boundary vertex functions touching that cell; the
    two top corner cells additionally carry half of the DSSY function dual to
    the top-edge midpoint.
    """

    mesh: UniformMesh
    p1_coef: np.ndarray  # (n_cells, 4) coefficients of local corner functions
    dssy_coef: np.ndarray  # (n_cells,) coefficient of the top-midpoint DSSY function
    ell: int = DEFAULT_ELL

    @property
    def support(self) -> np.ndarray:
        """Cells on which the lifting is nonzero (the top row)."""
        return np.flatnonzero(np.any(self.p1_coef != 0, axis=1) | (self.dssy_coef != 0))


def build_lifting(mesh: UniformMesh, ell: int = DEFAULT_ELL) -> BoundaryLifting:
    n = mesh.N
    p1 = np.zeros((mesh.n_cells, 4))
    dssy = np.zeros(mesh.n_cells)
    for j in range(1, n + 1):
        c = mesh.cell_index(j, n)
        if j - 1 >= 1:  # V_{j-1,N} is the top-left corner
            p1[c, 3] = 0.5
        if j <= n - 1:  # V_{j,N} is the top-right corner
            p1[c, 2] = 0.5
    dssy[mesh.cell_index(1, n)] = 0.5
    dssy[mesh.cell_index(n, n)] = 0.5
    for a in (p1, dssy):
        a.flags.writeable = False
    return BoundaryLifting(mesh, p1, dssy, ell)


@dataclass
class VelocityField:
    mesh: UniformMesh
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        n = self.mesh.n_interior_vertices
        self.xi = np.asarray(self.xi, dtype=float)
        self.eta = np.asarray(self.eta, dtype=float)
        if self.xi.shape != (n,) or self.eta.shape != (n,):
            raise ValueError(f"expected {n} coefficients per component")

    @classmethod
    def zeros(cls, mesh):
        n = mesh.n_interior_vertices
        return cls(mesh, np.zeros(n), np.zeros(n))

    @classmethod
    def from_vector(cls, mesh, U):
        n = mesh.n_interior_vertices
        U = np.asarray(U, dtype=float)
        return cls(mesh, U[:n].copy(), U[n:].copy())

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.xi, self.eta])

    @property
    def n_dofs(self) -> int:
        return 2 * self.mesh.n_interior_vertices


@dataclass
class PressureField:
    mesh: UniformMesh
    gamma: np.ndarray

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=float)
        if self.gamma.shape != (self.mesh.n_cells,):
            raise ValueError(f"expected {self.mesh.n_cells} cell values")

    def constraint_residual(self) -> np.ndarray:
        """Red and black integrals of the pressure; both vanish in the space."""
        return pressure_constraint_rows(self.mesh) @ self.gamma

    @property
    def n_dofs(self) -> int:
        """Dimension of the checkerboard-free space the field lives in."""
        return self.mesh.n_cells - 2


def velocity_dof_map(mesh: UniformMesh) -> dict[tuple[int, int], int]:
    """Interior vertex ``(j, k)`` to its slot; the eta slot is offset by ``(N-1)^2``."""
    n = mesh.N
    return {(j, k): mesh.vertex_index(j, k) for k in range(1, n) for j in range(1, n)}


def dimensions(mesh: UniformMesh) -> tuple[int, int]:
    """(velocity, pressure) dimensions of the discrete pair."""
    return 2 * mesh.n_interior_vertices, mesh.n_cells - 2


def pressure_constraint_rows(mesh: UniformMesh) -> sp.csr_matrix:
    """Rows integrating a cellwise pressure over the red and the black cells."""
    red = mesh.red
    area = mesh.h * mesh.h
    rows = np.where(red, 0, 1)
    cols = np.arange(mesh.n_cells)
    return sp.csr_matrix((np.full(mesh.n_cells, area), (rows, cols)), shape=(2, mesh.n_cells))


def explicit_pressure_basis(mesh: UniformMesh) -> sp.csr_matrix:
    """Basis of the checkerboard-free space as columns ``chi_Q - chi_Qref``
    with reference cell ``Q_NN`` for red and ``Q_{N-1,N}`` for black cells."""
    n = mesh.N
    ref_red = mesh.cell_index(n, n)
    ref_black = mesh.cell_index(n - 1, n)
    red = mesh.red
    cols = [c for c in range(mesh.n_cells) if c not in (ref_red, ref_black)]
    rows, vals, cidx = [], [], []
    for i, c in enumerate(cols):
        rows += [c, ref_red if red[c] else ref_black]
        vals += [1.0, -1.0]
        cidx += [i, i]
    return sp.csr_matrix((vals, (rows, cidx)), shape=(mesh.n_cells, len(cols)))


def project_pressure(mesh: UniformMesh, gamma) -> np.ndarray:
    """Remove the red and black means (Euclidean-orthogonal projection)."""
    gamma = np.array(gamma, dtype=float)
    red = mesh.red
    gamma[red] -= gamma[red].mean()
    gamma[~red] -= gamma[~red].mean()
    return gamma


def checkerboard(mesh: UniformMesh) -> np.ndarray:
    return np.where(mesh.red, 1.0, -1.0)


# -- pointwise evaluation ------------------------------------------------------

def cell_fields(mesh: UniformMesh, U, cells, xhat, yhat, lifting: BoundaryLifting | None = None):
    """Evaluate ``u_0 (+ lifting)`` on selected cells at reference points.

    ``U`` is a velocity coefficient vector (or ``None`` for zero).  Returns
    ``values`` of shape ``(len(cells), npts, 2)`` and ``grads`` of shape
    ``(len(cells), npts, 2, 2)`` indexed ``[..., component, derivative]``.
    """
    cells = np.atleast_1d(np.asarray(cells, dtype=np.int64))
    xhat = np.atleast_1d(np.asarray(xhat, dtype=float))
    yhat = np.atleast_1d(np.asarray(yhat, dtype=float))
    npts = xhat.size
    phi = p1nc_local(xhat, yhat)  # (npts, 4)
    dphi = CORNER_SIGNS / mesh.h  # (4, 2)
    vals = np.zeros((cells.size, npts, 2))
    grads = np.zeros((cells.size, npts, 2, 2))
    if U is not None:
        nv = mesh.n_interior_vertices
        U = np.asarray(U, dtype=float)
        cv = mesh.cell_vertices[cells]
        mask = cv >= 0
        safe = np.where(mask, cv, 0)
        for comp, coef in enumerate((U[:nv], U[nv:])):
            loc = np.where(mask, coef[safe], 0.0)  # (ncells, 4)
            vals[:, :, comp] = loc @ phi.T
            grads[:, :, comp, :] = (loc @ dphi)[:, None, :]
    if lifting is not None:
        p1 = lifting.p1_coef[cells]
        vals[:, :, 0] += p1 @ phi.T
        grads[:, :, 0, :] += (p1 @ dphi)[:, None, :]
        dc = lifting.dssy_coef[cells]
        if np.any(dc):
            psi, (gx, gy) = dssy_ref_eval(2, xhat, yhat, lifting.ell)
            scale = 2.0 / mesh.h
            vals[:, :, 0] += dc[:, None] * psi[None, :]
            grads[:, :, 0, 0] += dc[:, None] * scale * gx[None, :]
            grads[:, :, 0, 1] += dc[:, None] * scale * gy[None, :]
    return vals, grads


def to_reference(mesh: UniformMesh, cell: int, x, y):
    cx, cy = mesh.centers[cell]
    return (np.asarray(x) - cx) * 2.0 / mesh.h, (np.asarray(y) - cy) * 2.0 / mesh.h


def evaluate_velocity(field: VelocityField | None, lifting: BoundaryLifting | None,
                      point, cell: int | None = None, tol: float = 1e-12) -> np.ndarray:
    """Velocity at ``point`` using the polynomial of ``cell``.

    Traces on cell boundaries are one-sided; without a cell hint the first
    cell containing the point is used.
    """
    mesh = field.mesh if field is not None else lifting.mesh
    x, y = point
    if cell is None:
        cell = mesh.cells_at(x, y)[0]
    xh, yh = to_reference(mesh, cell, x, y)
    if abs(xh) > 1 + tol or abs(yh) > 1 + tol:
        raise MeshError(f"point {point} is not in cell {cell}")
    U = field.vector if field is not None else None
    vals, _ = cell_fields(mesh, U, [cell], [xh], [yh], lifting)
    return vals[0, 0]


def evaluate_velocity_avg(field, lifting, point) -> np.ndarray:
    """Average of the one-sided traces of all cells touching ``point``."""
    mesh = field.mesh if field is not None else lifting.mesh
    cells = mesh.cells_at(*point)
    return np.mean([evaluate_velocity(field, lifting, point, c) for c in cells], axis=0)

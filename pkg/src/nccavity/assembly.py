"""Element-loop assembly of the broken forms.

* ``a_h(u, v) = nu * sum_Q int_Q grad u : grad v``
* ``b_h(v, q) = - sum_Q int_Q (div v) q``
* ``c_h(w; u, v) = sum_Q int_Q (w . grad) u . v``

All loops over cells are vectorised; each cell has four local vertex
functions whose gradients are the constant vectors ``CORNER_SIGNS / h``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .elements import DEFAULT_QUAD_POINTS, gauss_rule
from .mesh import CORNER_SIGNS, UniformMesh
from .spaces import BoundaryLifting, cell_fields, p1nc_local, pressure_constraint_rows

# local stiffness of the vertex functions; independent of h in 2D
_LOCAL_STIFFNESS = CORNER_SIGNS @ CORNER_SIGNS.T


def _scatter_square(mesh: UniformMesh, local: np.ndarray) -> sp.csr_matrix:
    """Assemble per-cell 4x4 blocks (shape (n_cells, 4, 4) or (4, 4)) over interior vertices."""
    nv = mesh.n_interior_vertices
    cv = mesh.cell_vertices
    local = np.broadcast_to(local, (mesh.n_cells, 4, 4))
    rows = np.broadcast_to(cv[:, :, None], local.shape)
    cols = np.broadcast_to(cv[:, None, :], local.shape)
    keep = (rows >= 0) & (cols >= 0)
    return sp.csr_matrix((local[keep], (rows[keep], cols[keep])), shape=(nv, nv))


def _gather_vector(mesh: UniformMesh, local: np.ndarray) -> np.ndarray:
    """Sum per-cell (n_cells, 4) contributions into the interior vertex slots."""
    cv = mesh.cell_vertices
    keep = cv >= 0
    out = np.zeros(mesh.n_interior_vertices)
    np.add.at(out, cv[keep], local[keep])
    return out


def scalar_stiffness(mesh: UniformMesh) -> sp.csr_matrix:
    return _scatter_square(mesh, _LOCAL_STIFFNESS)


def assemble_a(mesh: UniformMesh, nu: float) -> sp.csr_matrix:
    if nu <= 0:
        raise ValueError("viscosity must be positive")
    K = scalar_stiffness(mesh)
    return (nu * sp.block_diag([K, K])).tocsr()


def assemble_b(mesh: UniformMesh) -> sp.csr_matrix:
    """Divergence block: ``q^T B v = b_h(v, q)``; one row per cell."""
    nv = mesh.n_interior_vertices
    cv = mesh.cell_vertices
    cells = np.broadcast_to(np.arange(mesh.n_cells)[:, None], cv.shape)
    keep = cv >= 0
    h = mesh.h
    sx = np.broadcast_to(-h * CORNER_SIGNS[:, 0], cv.shape)
    sy = np.broadcast_to(-h * CORNER_SIGNS[:, 1], cv.shape)
    rows = np.concatenate([cells[keep], cells[keep]])
    cols = np.concatenate([cv[keep], cv[keep] + nv])
    vals = np.concatenate([sx[keep], sy[keep]])
    return sp.csr_matrix((vals, (rows, cols)), shape=(mesh.n_cells, 2 * nv))


def _quadrature(mesh, n_points):
    rule = gauss_rule(n_points)
    jac = 0.25 * mesh.h * mesh.h
    return rule.points[:, 0], rule.points[:, 1], rule.weights * jac


def transport_values(mesh, W, lifting, n_points=DEFAULT_QUAD_POINTS, cells=None):
    """Transport field ``u_0(W) + lifting`` at the quadrature points of ``cells``."""
    xq, yq, _ = _quadrature(mesh, n_points)
    if cells is None:
        cells = np.arange(mesh.n_cells)
    vals, _ = cell_fields(mesh, W, cells, xq, yq, lifting)
    return vals


def assemble_convection(mesh: UniformMesh, W, lifting: BoundaryLifting | None,
                        n_points: int = DEFAULT_QUAD_POINTS) -> sp.csr_matrix:
    """Convection block for the frozen transport field ``u_0(W) + lifting``.

    ``W`` may be ``None`` for the lifting alone.  Returns the block-diagonal
    matrix with ``c_h(w; u, v) = v^T N u``.
    """
    xq, yq, wq = _quadrature(mesh, n_points)
    phi = p1nc_local(xq, yq)  # (nq, 4)
    w = transport_values(mesh, W, lifting, n_points)  # (nc, nq, 2)
    # m[c, a, d] = int_Q w_d phi_a
    m = np.einsum("q,cqd,qa->cad", wq, w, phi)
    local = m @ (CORNER_SIGNS / mesh.h).T  # (nc, a, b)
    S = _scatter_square(mesh, local)
    return sp.block_diag([S, S]).tocsr()


def assemble_rhs(mesh: UniformMesh, nu: float, W, lifting: BoundaryLifting,
                 n_points: int = DEFAULT_QUAD_POINTS, convection: bool = True):
    """Lifting right-hand sides ``f = -a_h(u_b, .) - c_h(w; u_b, .)`` and
    ``g = -b_h(u_b, .)`` for transport ``w = u_0(W) + u_b``.

    With ``convection=False`` the ``c_h`` term is dropped (Stokes load).
    """
    xq, yq, wq = _quadrature(mesh, n_points)
    cells = lifting.support
    phi = p1nc_local(xq, yq)
    dphi = CORNER_SIGNS / mesh.h
    ub, gub = cell_fields(mesh, None, cells, xq, yq, lifting)
    w, _ = cell_fields(mesh, W, cells, xq, yq, lifting)
    grad_u = gub[:, :, 0, :]  # gradient of the first lifting component
    # diffusion: nu * int grad u_b . grad phi_a
    diff = nu * np.einsum("q,cqd,ad->ca", wq, grad_u, dphi)
    local = np.zeros((mesh.n_cells, 4))
    local[cells] = -diff
    if convection:
        local[cells] -= np.einsum("q,cqd,cqd,qa->ca", wq, w, grad_u, phi)
    nv = mesh.n_interior_vertices
    f = np.zeros(2 * nv)
    f[:nv] = _gather_vector(mesh, local)
    g = np.zeros(mesh.n_cells)
    g[cells] = np.einsum("q,cq->c", wq, grad_u[:, :, 0])
    return f, g


def assemble_load(mesh: UniformMesh, source, n_points: int = DEFAULT_QUAD_POINTS) -> np.ndarray:
    """``int f . phi_a`` for a body force ``source(x, y) -> (fx, fy)``."""
    xq, yq, wq = _quadrature(mesh, n_points)
    phi = p1nc_local(xq, yq)
    c = mesh.centers
    X = c[:, 0:1] + 0.5 * mesh.h * xq[None, :]
    Y = c[:, 1:2] + 0.5 * mesh.h * yq[None, :]
    fx, fy = source(X, Y)
    fx = np.broadcast_to(fx, X.shape)
    fy = np.broadcast_to(fy, X.shape)
    return np.concatenate([
        _gather_vector(mesh, np.einsum("q,cq,qa->ca", wq, fx, phi)),
        _gather_vector(mesh, np.einsum("q,cq,qa->ca", wq, fy, phi)),
    ])


@dataclass
class SaddleSystem:
    """Blocks of one Oseen step.

    Unknown ordering of :meth:`matrix`: velocity, cell pressures, then the two
    multipliers enforcing zero red and black pressure means.
    """

    mesh: UniformMesh
    A: sp.csr_matrix  # nu-scaled diffusion
    N: sp.csr_matrix  # convection for the frozen transport field
    B: sp.csr_matrix
    C: sp.csr_matrix
    f: np.ndarray
    g: np.ndarray

    @property
    def K(self) -> sp.csr_matrix:
        return (self.A + self.N).tocsr()

    def matrix(self) -> sp.csc_matrix:
        C = self.C
        return sp.bmat(
            [[self.K, self.B.T, None], [self.B, None, C.T], [None, C, None]],
            format="csc",
        )

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.f, self.g, np.zeros(2)])

    @property
    def n_velocity(self) -> int:
        return self.A.shape[0]


def assemble_system(mesh: UniformMesh, nu: float, W, lifting: BoundaryLifting,
                    convection: bool = True, n_points: int = DEFAULT_QUAD_POINTS,
                    A=None, B=None) -> SaddleSystem:
    """Oseen system linearised at ``w = u_0(W) + u_b``; ``convection=False``
    gives the Stokes system.  ``A`` and ``B`` may be passed in to reuse them."""
    A = assemble_a(mesh, nu) if A is None else A
    B = assemble_b(mesh) if B is None else B
    C = pressure_constraint_rows(mesh)
    nv2 = A.shape[0]
    Nw = assemble_convection(mesh, W, lifting, n_points) if convection else sp.csr_matrix((nv2, nv2))
    f, g = assemble_rhs(mesh, nu, W, lifting, n_points, convection=convection)
    return SaddleSystem(mesh, A, Nw, B, C, f, g)


def dump_coo(matrix, path) -> None:
    """Write a sparse matrix as ``row col value`` lines (zero-based)."""
    m = sp.coo_matrix(matrix)
    with open(path, "w") as fh:
        fh.write(f"% {m.shape[0]} {m.shape[1]} {m.nnz}\n")
        for r, c, v in zip(m.row, m.col, m.data):
            fh.write(f"{r} {c} {v:.17g}\n")

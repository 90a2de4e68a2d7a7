"""Accuracy indicators and post-processing of a discrete cavity solution:
flow rates through section lines, the vorticity compatibility integral,
per-cell divergence, stream function, vortex centres and centerline
profiles."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elements import DEFAULT_QUAD_POINTS, gauss_1d, gauss_rule
from .mesh import CORNER_SIGNS, UniformMesh
from .spaces import BoundaryLifting, VelocityField, build_lifting, cell_fields, evaluate_velocity_avg

# Interior stations of the Re = 1000 centerline tables, mapped to the lid-on-top frame.
U_STATIONS = (0.9766, 0.9688, 0.9609, 0.9531, 0.8516, 0.7344, 0.6172, 0.5,
              0.4531, 0.2813, 0.1719, 0.1016, 0.0703, 0.0625, 0.0547)
V_STATIONS = (0.9688, 0.9609, 0.9531, 0.9453, 0.9063, 0.8594, 0.8047, 0.5,
              0.2344, 0.2266, 0.1563, 0.0938, 0.0781, 0.0703, 0.0625)

VORTEX_REGIONS = {
    "primary": ((0.0, 1.0, 0.0, 1.0), "min"),
    "bottom_left": ((0.0, 0.25, 0.0, 0.25), "max"),
    "bottom_right": ((0.75, 1.0, 0.0, 0.25), "max"),
    "top_left": ((0.0, 0.25, 0.75, 1.0), "max"),
}


class DiagnosticsError(ValueError):
    pass


def _mesh_of(u, lifting):
    return u.mesh if u is not None else lifting.mesh


def _vec(u):
    return None if u is None else u.vector


def _cell_quadrature(u, lifting, n_points):
    mesh = _mesh_of(u, lifting)
    rule = gauss_rule(n_points)
    _, grads = cell_fields(mesh, _vec(u), np.arange(mesh.n_cells),
                           rule.points[:, 0], rule.points[:, 1], lifting)
    return grads, rule.weights * 0.25 * mesh.h * mesh.h


def cell_divergence(u: VelocityField | None, lifting: BoundaryLifting | None = None,
                    n_points: int = DEFAULT_QUAD_POINTS) -> np.ndarray:
    """``int_Q div u_h`` for every cell, by quadrature of the broken gradient."""
    grads, w = _cell_quadrature(u, lifting, n_points)
    return (grads[:, :, 0, 0] + grads[:, :, 1, 1]) @ w


def vorticity_integral(u: VelocityField | None, lifting: BoundaryLifting | None = None,
                       n_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Broken integral of ``dv/dx - du/dy`` over the cavity."""
    grads, w = _cell_quadrature(u, lifting, n_points)
    return float(np.sum((grads[:, :, 1, 0] - grads[:, :, 0, 1]) @ w))


def cell_center_vorticity(u, lifting=None) -> np.ndarray:
    mesh = _mesh_of(u, lifting)
    _, grads = cell_fields(mesh, _vec(u), np.arange(mesh.n_cells), [0.0], [0.0], lifting)
    return grads[:, 0, 1, 0] - grads[:, 0, 0, 1]


def velocity_errors(u: VelocityField | None, lifting: BoundaryLifting | None, exact, grad_exact,
                    n_points: int = DEFAULT_QUAD_POINTS) -> tuple[float, float]:
    """L2 error and broken H1-seminorm error against a smooth field.

    ``exact(x, y) -> (u, v)`` and ``grad_exact(x, y) -> ((ux, uy), (vx, vy))``
    act on arrays of shape ``(n_cells, n_quad)``.
    """
    mesh = _mesh_of(u, lifting)
    rule = gauss_rule(n_points)
    xh, yh = rule.points[:, 0], rule.points[:, 1]
    vals, grads = cell_fields(mesh, _vec(u), np.arange(mesh.n_cells), xh, yh, lifting)
    c = mesh.centers
    X = c[:, 0:1] + 0.5 * mesh.h * xh[None, :]
    Y = c[:, 1:2] + 0.5 * mesh.h * yh[None, :]
    w = rule.weights * 0.25 * mesh.h * mesh.h
    ev = np.stack([np.broadcast_to(a, X.shape) for a in exact(X, Y)], axis=-1)
    eg = np.array([[np.broadcast_to(a, X.shape) for a in row] for row in grad_exact(X, Y)])
    eg = np.moveaxis(eg, (0, 1), (2, 3))
    l2 = np.sum(((vals - ev) ** 2).sum(axis=-1) @ w)
    h1 = np.sum(((grads - eg) ** 2).sum(axis=(-1, -2)) @ w)
    return float(np.sqrt(l2)), float(np.sqrt(h1))


def pressure_error(gamma, mesh: UniformMesh, exact, n_points: int = DEFAULT_QUAD_POINTS) -> float:
    """L2 distance between a cellwise-constant pressure and ``exact(x, y)``."""
    rule = gauss_rule(n_points)
    xh, yh = rule.points[:, 0], rule.points[:, 1]
    c = mesh.centers
    X = c[:, 0:1] + 0.5 * mesh.h * xh[None, :]
    Y = c[:, 1:2] + 0.5 * mesh.h * yh[None, :]
    w = rule.weights * 0.25 * mesh.h * mesh.h
    d = np.asarray(gamma)[:, None] - np.broadcast_to(exact(X, Y), X.shape)
    return float(np.sqrt(np.sum((d * d) @ w)))


def _line_cells(mesh: UniformMesh, c: float, tol=1e-12):
    """Columns (1-based) of cells touching the line at coordinate ``c`` and the
    local reference coordinate of the line in each."""
    s = c * mesh.N
    r = round(s)
    if abs(s - r) <= tol * mesh.N:
        return [(r, 1.0), (r + 1, -1.0)]  # (left/below, right/above)
    j = int(np.floor(s)) + 1
    return [(j, 2.0 * (s - (j - 0.5)))]


def flow_rate_traces(u, lifting, axis: str, c: float, n_points: int = DEFAULT_QUAD_POINTS):
    """Signed section integrals of the normal velocity from each side of the line.

    ``axis="vertical"`` integrates ``u(c, y) dy``, ``"horizontal"`` integrates
    ``v(x, c) dx``.  On a mesh line two one-sided values are returned,
    otherwise one.
    """
    if not 0.0 < c < 1.0:
        raise DiagnosticsError(f"section coordinate must lie in (0, 1), got {c}")
    if axis not in ("vertical", "horizontal"):
        raise DiagnosticsError(f"axis must be 'vertical' or 'horizontal', got {axis!r}")
    mesh = _mesh_of(u, lifting)
    t, w = gauss_1d(n_points)
    n = mesh.N
    out = []
    for col, ref in _line_cells(mesh, c):
        idx = np.arange(1, n + 1)
        if axis == "vertical":
            cells = (idx - 1) * n + (col - 1)
            xh, yh, comp = np.full_like(t, ref), t, 0
        else:
            cells = (col - 1) * n + (idx - 1)
            xh, yh, comp = t, np.full_like(t, ref), 1
        vals, _ = cell_fields(mesh, _vec(u), cells, xh, yh, lifting)
        out.append(float(np.sum(vals[:, :, comp] @ w) * 0.5 * mesh.h))
    return out


def flow_rate(u, lifting, axis: str, c: float, n_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Net volumetric flow rate ``|int u(c, y) dy|`` or ``|int v(x, c) dx|``."""
    return abs(float(np.mean(flow_rate_traces(u, lifting, axis, c, n_points))))


# -- stream function ---------------------------------------------------------------

_Q1_STIFFNESS = np.array([[4, -1, -2, -1], [-1, 4, -1, -2], [-2, -1, 4, -1], [-1, -2, -1, 4]]) / 6.0


def _q1_local(xh, yh):
    xh = np.asarray(xh)[..., None]
    yh = np.asarray(yh)[..., None]
    return 0.25 * (1 + CORNER_SIGNS[:, 0] * xh) * (1 + CORNER_SIGNS[:, 1] * yh)


def stream_function(u: VelocityField | None, lifting: BoundaryLifting | None = None,
                    n_points: int = DEFAULT_QUAD_POINTS, compat_tol: float = 1e-8) -> np.ndarray:
    """Bilinear stream function on the ``(N+1)^2`` vertex grid.

    Solves ``-lap psi = omega`` with Neumann data ``-u, u, v, -v`` on the
    bottom, top, left and right walls, normalised by ``psi(0, 0) = 0``.
    """
    mesh = _mesh_of(u, lifting)
    n, h = mesh.N, mesh.h
    nodes = mesh.cell_nodes
    nn = mesh.n_nodes
    rows = np.broadcast_to(nodes[:, :, None], (mesh.n_cells, 4, 4)).ravel()
    cols = np.broadcast_to(nodes[:, None, :], (mesh.n_cells, 4, 4)).ravel()
    K = sp.csr_matrix((np.broadcast_to(_Q1_STIFFNESS, (mesh.n_cells, 4, 4)).ravel(), (rows, cols)),
                      shape=(nn, nn))

    rule = gauss_rule(n_points)
    xq, yq = rule.points[:, 0], rule.points[:, 1]
    _, grads = cell_fields(mesh, _vec(u), np.arange(mesh.n_cells), xq, yq, lifting)
    omega = grads[:, :, 1, 0] - grads[:, :, 0, 1]
    chi = _q1_local(xq, yq)
    local = np.einsum("q,cq,qa->ca", rule.weights * 0.25 * h * h, omega, chi)
    rhs = np.zeros(nn)
    np.add.at(rhs, nodes.ravel(), local.ravel())

    # Neumann data on the four walls
    t, w = gauss_1d(n_points)
    idx = np.arange(1, n + 1)
    walls = (  # cells, reference points, component, sign
        ((idx - 1), (t, -np.ones_like(t)), 0, -1.0),  # bottom
        ((n - 1) * n + (idx - 1), (t, np.ones_like(t)), 0, 1.0),  # top
        ((idx - 1) * n, (-np.ones_like(t), t), 1, 1.0),  # left
        ((idx - 1) * n + n - 1, (np.ones_like(t), t), 1, -1.0),  # right
    )
    for cells, (xh, yh), comp, sign in walls:
        vals, _ = cell_fields(mesh, _vec(u), cells, xh, yh, lifting)
        chi_e = _q1_local(xh, yh)
        loc = sign * np.einsum("q,cq,qa->ca", w * 0.5 * h, vals[:, :, comp], chi_e)
        np.add.at(rhs, nodes[cells].ravel(), loc.ravel())

    defect = rhs.sum()
    if abs(defect) > compat_tol:
        raise DiagnosticsError(f"Neumann data incompatible with vorticity: defect {defect:.3e}")
    rhs -= defect / nn
    K = K.tolil()
    K[0, :] = 0.0
    K[0, 0] = 1.0
    rhs[0] = 0.0
    return spla.spsolve(K.tocsc(), rhs)


def cell_center_values(mesh: UniformMesh, nodal: np.ndarray) -> np.ndarray:
    """Bilinear interpolant of vertex values at the cell centres."""
    return nodal[mesh.cell_nodes].mean(axis=1)


@dataclass
class VortexRecord:
    name: str
    psi: float
    omega: float
    x: float
    y: float


def locate_vortex(psi_cc, omega_cc, centers, region, mode: str = "min", name: str = "") -> VortexRecord:
    """Extremum of cell-centre stream function values inside ``region``.

    ``region = (x0, x1, y0, y1)``; ties resolve to the first cell in scan order.
    """
    if mode not in ("min", "max"):
        raise DiagnosticsError(f"mode must be 'min' or 'max', got {mode!r}")
    x0, x1, y0, y1 = region
    cx, cy = centers[:, 0], centers[:, 1]
    inside = np.flatnonzero((cx >= x0) & (cx <= x1) & (cy >= y0) & (cy <= y1))
    if inside.size == 0:
        raise DiagnosticsError(f"no cell centre inside region {region}")
    vals = psi_cc[inside]
    i = inside[np.argmin(vals) if mode == "min" else np.argmax(vals)]
    return VortexRecord(name, float(psi_cc[i]), float(omega_cc[i]), float(cx[i]), float(cy[i]))


def centerline_profiles(u, lifting, y_stations=U_STATIONS, x_stations=V_STATIONS):
    """``u(0.5, y)`` and ``v(x, 0.5)``; on mesh lines one-sided traces are averaged."""
    u_prof = [(y, float(evaluate_velocity_avg(u, lifting, (0.5, y))[0])) for y in y_stations]
    v_prof = [(x, float(evaluate_velocity_avg(u, lifting, (x, 0.5))[1])) for x in x_stations]
    return {"u_vertical_centerline": u_prof, "v_horizontal_centerline": v_prof}


@dataclass
class DiagnosticsReport:
    Re: float
    N: int
    flow_rate_u: float
    flow_rate_v: float
    vorticity_integral: float
    compatibility_error: float
    max_cell_divergence: float
    divergence_deviation: float  # max | |int_Q div u| - h^3 |
    divergence_alternates: bool
    vortices: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)
    cell_divergence: np.ndarray | None = field(default=None, repr=False)
    psi: np.ndarray | None = field(default=None, repr=False)
    omega: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("cell_divergence", "psi", "omega"):
            d.pop(key)
        d["vortices"] = {k: asdict(v) for k, v in self.vortices.items()}
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def divergence_alternates(mesh: UniformMesh, div: np.ndarray) -> bool:
    s = np.sign(div)
    red = mesh.red
    return bool(np.all(s[red] == s[red][0]) and np.all(s[~red] == -s[red][0]) and s[red][0] != 0)


def diagnose(u: VelocityField, Re: float, lifting: BoundaryLifting | None = None,
             profiles: bool = True, n_points: int = DEFAULT_QUAD_POINTS) -> DiagnosticsReport:
    mesh = u.mesh
    lifting = lifting or build_lifting(mesh)
    div = cell_divergence(u, lifting, n_points)
    h3 = mesh.h**3
    omega_int = vorticity_integral(u, lifting, n_points)
    psi = stream_function(u, lifting, n_points)
    psi_cc = cell_center_values(mesh, psi)
    omega_cc = cell_center_vorticity(u, lifting)
    vortices = {
        name: locate_vortex(psi_cc, omega_cc, mesh.centers, region, mode, name)
        for name, (region, mode) in VORTEX_REGIONS.items()
    }
    return DiagnosticsReport(
        Re=float(Re),
        N=mesh.N,
        flow_rate_u=flow_rate(u, lifting, "vertical", 0.5, n_points),
        flow_rate_v=flow_rate(u, lifting, "horizontal", 0.5, n_points),
        vorticity_integral=omega_int,
        compatibility_error=abs(omega_int + 1.0),
        max_cell_divergence=float(np.abs(div).max()),
        divergence_deviation=float(np.abs(np.abs(div) - h3).max()),
        divergence_alternates=divergence_alternates(mesh, div),
        vortices=vortices,
        profiles=centerline_profiles(u, lifting) if profiles else {},
        cell_divergence=div,
        psi=psi,
        omega=omega_cc,
    )

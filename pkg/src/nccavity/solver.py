"""Oseen solves and the Picard iteration for the cavity problem."""
from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import SaddleSystem, assemble_a, assemble_b, assemble_system
from .elements import DEFAULT_QUAD_POINTS
from .mesh import UniformMesh
from .spaces import (
    BoundaryLifting,
    PressureField,
    VelocityField,
    build_lifting,
    explicit_pressure_basis,
    project_pressure,
)

log = logging.getLogger(__name__)

LINEAR_TOL = 1e-12
AUTO_SCHEDULE = (100.0, 400.0, 1000.0, 2500.0)


class SolverError(RuntimeError):
    pass


class LinearSolveError(SolverError):
    pass


class PicardError(SolverError):
    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = list(residuals)


@dataclass
class PicardConfig:
    Re: float
    tol_rel: float = 1e-10
    max_iters: int = 200
    continuation: object = "auto"  # "auto", None/False, or an increasing list of Re
    initial: str = "stokes"  # "stokes" | "zero"
    n_points: int = DEFAULT_QUAD_POINTS
    verbose: bool = False

    def __post_init__(self):
        if not self.Re > 0:
            raise ValueError("Reynolds number must be positive")
        if not self.tol_rel > 0:
            raise ValueError("tolerance must be positive")
        if self.initial not in ("stokes", "zero"):
            raise ValueError(f"unknown initial guess {self.initial!r}")

    @property
    def nu(self) -> float:
        return 1.0 / self.Re

    def schedule(self) -> list[float]:
        """Reynolds numbers of the continuation stages, ending at ``Re``."""
        cont = self.continuation
        if cont == "auto":
            stages = [r for r in AUTO_SCHEDULE if r < self.Re] if self.Re > 1000 else []
        elif not cont:
            stages = []
        else:
            stages = [float(r) for r in cont if r < self.Re]
            if any(b <= a for a, b in zip(stages, stages[1:])):
                raise ValueError("continuation schedule must be increasing")
        return stages + [float(self.Re)]


@dataclass
class SolveReport:
    iterations: int = 0
    residuals: list = field(default_factory=list)
    linear_residuals: list = field(default_factory=list)
    stages: list = field(default_factory=list)  # (Re, iterations) per stage
    wall_time: float = 0.0
    converged: bool = False

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "residuals": self.residuals,
            "linear_residuals": self.linear_residuals,
            "stages": [{"Re": r, "iterations": n} for r, n in self.stages],
            "wall_time": self.wall_time,
            "converged": self.converged,
        }


# -- fill-reducing ordering ---------------------------------------------------

@lru_cache(maxsize=8)
def saddle_ordering(N: int, leaf: int = 16) -> np.ndarray:
    """Geometric nested dissection of the saddle unknowns.

    Interior vertices are split recursively along mesh lines of vertices
    (a vertex line separates the vertex stencil); both velocity components
    of a vertex stay together, each cell pressure is placed right after the
    last of its corner vertices and the two multipliers go last.
    """
    nv = (N - 1) ** 2
    order = []

    def dissect(j0, j1, k0, k1):
        nj, nk = j1 - j0 + 1, k1 - k0 + 1
        if nj <= 0 or nk <= 0:
            return
        if nj * nk <= leaf:
            for k in range(k0, k1 + 1):
                order.extend(range((k - 1) * (N - 1) + j0 - 1, (k - 1) * (N - 1) + j1))
            return
        if nj >= nk:
            js = (j0 + j1) // 2
            dissect(j0, js - 1, k0, k1)
            dissect(js + 1, j1, k0, k1)
            order.extend((k - 1) * (N - 1) + js - 1 for k in range(k0, k1 + 1))
        else:
            ks = (k0 + k1) // 2
            dissect(j0, j1, k0, ks - 1)
            dissect(j0, j1, ks + 1, k1)
            order.extend(range((ks - 1) * (N - 1) + j0 - 1, (ks - 1) * (N - 1) + j1))

    dissect(1, N - 1, 1, N - 1)
    pos = np.empty(nv, dtype=np.int64)
    pos[np.asarray(order, dtype=np.int64)] = np.arange(nv)

    from .mesh import _cell_vertices

    cv = _cell_vertices(N)
    cell_key = np.where(cv >= 0, pos[np.where(cv >= 0, cv, 0)], -1).max(axis=1)
    vid = np.arange(nv)
    keys = np.concatenate([3 * pos, 3 * pos + 1, 3 * cell_key + 2])
    ids = np.concatenate([vid, vid + nv, 2 * nv + np.arange(N * N)])
    perm = ids[np.argsort(keys, kind="stable")]
    n_tot = 2 * nv + N * N
    perm = np.concatenate([perm, [n_tot, n_tot + 1]])
    perm.flags.writeable = False
    return perm


def _factor_solve(M: sp.spmatrix, b: np.ndarray, perm=None):
    M = M.tocsc()
    if perm is not None:
        Mp = M[perm][:, perm].tocsc()
        opts = dict(permc_spec="NATURAL", diag_pivot_thresh=0.1, options=dict(SymmetricMode=True))
    else:
        Mp = M
        opts = dict(permc_spec="COLAMD")
    try:
        lu = spla.splu(Mp, **opts)
    except RuntimeError as exc:
        raise LinearSolveError(f"factorisation failed: {exc}") from exc

    def solve(rhs):
        if perm is None:
            return lu.solve(rhs)
        out = np.empty_like(rhs)
        out[perm] = lu.solve(rhs[perm])
        return out

    x = solve(b)
    bnorm = np.linalg.norm(b) or 1.0
    res = np.linalg.norm(b - M @ x) / bnorm
    for _ in range(3):  # iterative refinement
        if res <= LINEAR_TOL:
            break
        x = x + solve(b - M @ x)
        res = np.linalg.norm(b - M @ x) / bnorm
    if not np.all(np.isfinite(x)):
        raise LinearSolveError("factorisation produced non-finite values")
    return x, res


def _locate_failure(system: SaddleSystem, x) -> str:
    nvel = system.n_velocity
    r = system.matrix() @ x - system.rhs()
    blocks = {"velocity": r[:nvel], "pressure": r[nvel:-2], "multiplier": r[-2:]}
    return max(blocks, key=lambda k: np.abs(blocks[k]).max(initial=0.0))


def solve_oseen(system: SaddleSystem, formulation: str = "multiplier"):
    """Solve one linear saddle problem.

    ``formulation="multiplier"`` keeps all cell pressures and enforces the
    zero red and black means with two multiplier rows.  ``"explicit"`` uses
    the pinned-cell basis of the checkerboard-free space instead.

    Returns ``(velocity, pressure, info)``; ``info`` holds the relative
    algebraic residual and, for the multiplier form, the multipliers.
    """
    mesh = system.mesh
    nvel = system.n_velocity
    if formulation == "multiplier":
        M = system.matrix()
        b = system.rhs()
        x, res = _factor_solve(M, b, saddle_ordering(mesh.N))
        U, p, lam = x[:nvel], x[nvel:-2], x[-2:]
    elif formulation == "explicit":
        T = explicit_pressure_basis(mesh)
        BT = (T.T @ system.B).tocsr()
        M = sp.bmat([[system.K, BT.T], [BT, None]], format="csc")
        b = np.concatenate([system.f, T.T @ system.g])
        x, res = _factor_solve(M, b)
        U, p, lam = x[:nvel], T @ x[nvel:], None
    else:
        raise ValueError(f"unknown formulation {formulation!r}")
    if res > LINEAR_TOL:
        where = _locate_failure(system, np.concatenate([U, p, lam])) if lam is not None else "unknown"
        raise LinearSolveError(
            f"linear residual {res:.3e} exceeds {LINEAR_TOL:g}; largest defect in the {where} block"
        )
    info = {"residual": res, "multipliers": lam}
    return VelocityField.from_vector(mesh, U), PressureField(mesh, p), info


# -- nonlinear residual ----------------------------------------------------------

class _Operators:
    """Viscosity-dependent blocks reused over a Picard stage."""

    def __init__(self, mesh, nu, lifting, n_points):
        self.mesh, self.nu, self.lifting, self.n_points = mesh, nu, lifting, n_points
        self.A = assemble_a(mesh, nu)
        self.B = assemble_b(mesh)

    def system(self, W, convection=True):
        return assemble_system(self.mesh, self.nu, W, self.lifting, convection=convection,
                               n_points=self.n_points, A=self.A, B=self.B)

    def residual(self, system: SaddleSystem, U, p) -> float:
        """Relative nonlinear residual of ``(U, p)`` for a system linearised at ``U``."""
        mesh = self.mesh
        r_mom = system.f - system.K @ U - system.B.T @ p
        r_div = project_pressure(mesh, system.g - system.B @ U)
        ref = np.sqrt(np.dot(system.f, system.f) + np.sum(project_pressure(mesh, system.g) ** 2))
        return float(np.sqrt(np.dot(r_mom, r_mom) + np.dot(r_div, r_div)) / ref)


def nonlinear_residual(mesh: UniformMesh, Re: float, u: VelocityField, p: PressureField,
                       lifting: BoundaryLifting | None = None,
                       n_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Relative residual of the discrete Navier-Stokes equations, assembled from scratch.

    The continuity part is tested against the checkerboard-free pressure
    space only, i.e. the red and black means of ``g - B u`` are removed.
    """
    lifting = lifting or build_lifting(mesh)
    ops = _Operators(mesh, 1.0 / Re, lifting, n_points)
    return ops.residual(ops.system(u.vector), u.vector, p.gamma)


def initial_guess(mesh: UniformMesh, config: PicardConfig, lifting=None) -> VelocityField:
    """Zero field, or the Stokes solution at the first stage's viscosity."""
    if config.initial == "zero":
        return VelocityField.zeros(mesh)
    lifting = lifting or build_lifting(mesh)
    nu = 1.0 / config.schedule()[0]
    ops = _Operators(mesh, nu, lifting, config.n_points)
    u, _, _ = solve_oseen(ops.system(None, convection=False))
    return u


def _progress(msg, verbose):
    log.info(msg)
    if verbose:
        print(msg, file=sys.stderr, flush=True)


def picard_solve(mesh: UniformMesh, config: PicardConfig, lifting=None, u0: VelocityField | None = None):
    """Picard iteration, optionally through a Reynolds continuation.

    Returns ``(velocity, pressure, report)``.  Raises :class:`PicardError`
    when ``max_iters`` is exhausted in a stage or when the residual grows
    for ten consecutive steps.
    """
    t0 = time.perf_counter()
    lifting = lifting or build_lifting(mesh)
    report = SolveReport()
    u = u0 if u0 is not None else initial_guess(mesh, config, lifting)
    U = u.vector
    p = None
    for Re in config.schedule():
        ops = _Operators(mesh, 1.0 / Re, lifting, config.n_points)
        system = ops.system(U)
        growth = 0
        last = np.inf
        for it in range(1, config.max_iters + 1):
            unew, pnew, info = solve_oseen(system)
            U, p = unew.vector, pnew.gamma
            report.linear_residuals.append(info["residual"])
            system = ops.system(U)  # linearised at the new iterate; reused next step
            res = ops.residual(system, U, p)
            report.residuals.append(res)
            report.iterations += 1
            _progress(f"Re={Re:g} N={mesh.N} iter={it} residual={res:.3e}", config.verbose)
            if res <= config.tol_rel:
                report.stages.append((Re, it))
                break
            growth = growth + 1 if res > last else 0
            last = res
            if growth >= 10:
                report.wall_time = time.perf_counter() - t0
                raise PicardError(f"Picard iteration diverging at Re={Re:g} (residual {res:.3e})",
                                  report.residuals)
        else:
            report.wall_time = time.perf_counter() - t0
            raise PicardError(
                f"Picard iteration did not reach {config.tol_rel:g} in {config.max_iters} steps "
                f"at Re={Re:g} (residual {report.residuals[-1]:.3e})",
                report.residuals,
            )
    report.converged = True
    report.wall_time = time.perf_counter() - t0
    return VelocityField.from_vector(mesh, U), PressureField(mesh, p), report

"""Smooth Stokes solution with homogeneous boundary data and its forcing."""
import numpy as np
import scipy.sparse as sp
import sympy as s

from nccavity.assembly import SaddleSystem, assemble_a, assemble_b, assemble_load
from nccavity.spaces import pressure_constraint_rows

_x, _y = s.symbols("x y")
_psi = _x**2 * (1 - _x) ** 2 * _y**2 * (1 - _y) ** 2
_u = s.diff(_psi, _y)
_v = -s.diff(_psi, _x)
_p = s.cos(s.pi * _x) * s.cos(s.pi * _y)


def _lam(expr):
    f = s.lambdify((_x, _y), expr, "numpy")
    return lambda X, Y: f(X, Y) + 0 * X


def _lam_pair(e1, e2):
    f1, f2 = _lam(e1), _lam(e2)
    return lambda X, Y: (f1(X, Y), f2(X, Y))


def problem(nu=1.0):
    lap = lambda e: s.diff(e, _x, 2) + s.diff(e, _y, 2)
    fx = -nu * lap(_u) + s.diff(_p, _x)
    fy = -nu * lap(_v) + s.diff(_p, _y)
    exact = _lam_pair(_u, _v)
    grad = lambda X, Y: (
        (_lam(s.diff(_u, _x))(X, Y), _lam(s.diff(_u, _y))(X, Y)),
        (_lam(s.diff(_v, _x))(X, Y), _lam(s.diff(_v, _y))(X, Y)),
    )
    return _lam_pair(fx, fy), exact, grad, _lam(_p)


def stokes_system(mesh, source, nu=1.0):
    A = assemble_a(mesh, nu)
    return SaddleSystem(mesh, A, sp.csr_matrix(A.shape), assemble_b(mesh), pressure_constraint_rows(mesh),
                        assemble_load(mesh, source), np.zeros(mesh.n_cells))

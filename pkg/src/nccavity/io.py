"""CSV serialisation of fields and grids."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .mesh import UniformMesh
from .spaces import PressureField, VelocityField


def write_velocity_csv(u: VelocityField, path) -> None:
    """Rows ``j, k, xi, eta`` for every interior vertex ``V_jk``."""
    mesh = u.mesh
    n = mesh.N
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "k", "xi", "eta"])
        for k in range(1, n):
            for j in range(1, n):
                i = mesh.vertex_index(j, k)
                w.writerow([j, k, repr(float(u.xi[i])), repr(float(u.eta[i]))])


def read_velocity_csv(mesh: UniformMesh, path) -> VelocityField:
    u = VelocityField.zeros(mesh)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            i = mesh.vertex_index(int(row["j"]), int(row["k"]))
            u.xi[i] = float(row["xi"])
            u.eta[i] = float(row["eta"])
    return u


def write_pressure_csv(p: PressureField, path) -> None:
    """Rows ``j, k, gamma`` for every cell ``Q_jk``."""
    mesh = p.mesh
    j, k = mesh.cell_jk(np.arange(mesh.n_cells))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "k", "gamma"])
        for jj, kk, g in zip(j, k, p.gamma):
            w.writerow([int(jj), int(kk), repr(float(g))])


def read_pressure_csv(mesh: UniformMesh, path) -> PressureField:
    gamma = np.zeros(mesh.n_cells)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            gamma[mesh.cell_index(int(row["j"]), int(row["k"]))] = float(row["gamma"])
    return PressureField(mesh, gamma)


def write_grid_csv(points: np.ndarray, values: np.ndarray, path) -> None:
    """Rows ``x, y, value`` for contour plotting."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for (x, y), v in zip(points, values):
            w.writerow([f"{x:.10g}", f"{y:.10g}", repr(float(v))])

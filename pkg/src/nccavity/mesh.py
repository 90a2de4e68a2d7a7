"""Uniform square partition of the unit cavity.

Indexing conventions used throughout the package:

* cells ``Q_jk`` with ``j, k = 1..N`` are numbered row-major with ``j``
  fastest: ``cell = (k - 1) * N + (j - 1)``;
* interior vertices ``V_jk = (j h, k h)`` with ``j, k = 1..N-1`` are numbered
  the same way: ``vertex = (k - 1) * (N - 1) + (j - 1)``;
* all vertices (boundary included, ``j, k = 0..N``) use
  ``node = k * (N + 1) + j``;
* edges: horizontal edges first, then vertical ones (see :func:`edge_midpoints`).

Local cell corners are ordered bottom-left, bottom-right, top-right,
top-left; :data:`CORNER_SIGNS` holds the offset of each corner from the
barycenter in units of ``h/2``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

CORNER_SIGNS = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)


class MeshError(ValueError):
    pass


class CellColor(enum.Enum):
    RED = "red"
    BLACK = "black"


@dataclass(frozen=True)
class Edge:
    index: int
    midpoint: tuple[float, float]
    orientation: str  # "horizontal" | "vertical"
    cells: tuple[int, ...]  # adjacent cell indices, one or two
    side: str | None  # "bottom", "top", "left", "right" for boundary edges

    @property
    def is_boundary(self) -> bool:
        return self.side is not None


@dataclass(frozen=True)
class UniformMesh:
    N: int
    h: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise MeshError(f"N must be an integer, got {self.N!r}")
        if self.N < 2 or self.N % 2:
            raise MeshError(f"N must be an even integer >= 2, got {self.N}")
        object.__setattr__(self, "h", 1.0 / self.N)

    # -- counts -----------------------------------------------------------
    @property
    def n_cells(self) -> int:
        return self.N * self.N

    @property
    def n_interior_vertices(self) -> int:
        return (self.N - 1) ** 2

    @property
    def n_nodes(self) -> int:
        return (self.N + 1) ** 2

    @property
    def n_edges(self) -> int:
        return 2 * self.N * (self.N + 1)

    @property
    def n_boundary_edges(self) -> int:
        return 4 * self.N

    # -- index helpers ----------------------------------------------------
    def cell_index(self, j, k):
        self._check_cell(j, k)
        return (k - 1) * self.N + (j - 1)

    def cell_jk(self, cell):
        """Inverse of :meth:`cell_index`; works on arrays."""
        cell = np.asarray(cell)
        return cell % self.N + 1, cell // self.N + 1

    def vertex_index(self, j, k):
        """Global index of the interior vertex ``V_jk``, or -1 on the boundary."""
        n = self.N
        if not (0 <= j <= n and 0 <= k <= n):
            raise MeshError(f"vertex ({j}, {k}) outside 0..{n}")
        if j in (0, n) or k in (0, n):
            return -1
        return (k - 1) * (n - 1) + (j - 1)

    def _check_cell(self, j, k):
        if not (1 <= j <= self.N and 1 <= k <= self.N):
            raise MeshError(f"cell ({j}, {k}) outside 1..{self.N}")

    # -- geometry (vectorised, cached) -------------------------------------
    @property
    def centers(self) -> np.ndarray:
        """Barycenters, shape (n_cells, 2)."""
        return _centers(self.N)

    @property
    def cell_vertices(self) -> np.ndarray:
        """Interior vertex index of each local corner, -1 for boundary; (n_cells, 4)."""
        return _cell_vertices(self.N)

    @property
    def cell_nodes(self) -> np.ndarray:
        """Node index (boundary included) of each local corner; (n_cells, 4)."""
        return _cell_nodes(self.N)

    @property
    def red(self) -> np.ndarray:
        """Boolean mask of red cells (``j + k`` even)."""
        j, k = self.cell_jk(np.arange(self.n_cells))
        return (j + k) % 2 == 0

    @property
    def nodes(self) -> np.ndarray:
        n = self.N
        jj, kk = np.meshgrid(np.arange(n + 1), np.arange(n + 1))
        return np.column_stack([jj.ravel() * self.h, kk.ravel() * self.h])

    @property
    def interior_vertices(self) -> np.ndarray:
        n = self.N
        jj, kk = np.meshgrid(np.arange(1, n), np.arange(1, n))
        return np.column_stack([jj.ravel() * self.h, kk.ravel() * self.h])

    def cells_at(self, x: float, y: float, tol: float = 1e-12) -> list[int]:
        """Cells whose closure contains ``(x, y)`` (one to four of them)."""
        if not (-tol <= x <= 1 + tol and -tol <= y <= 1 + tol):
            raise MeshError(f"point ({x}, {y}) outside the unit square")

        def span(t):
            s = t * self.N
            r = round(s)
            if abs(s - r) <= tol * self.N:
                return [i for i in (r, r + 1) if 1 <= i <= self.N]
            return [int(np.floor(s)) + 1]

        return [self.cell_index(j, k) for k in span(y) for j in span(x)]


def build_mesh(N: int) -> UniformMesh:
    return UniformMesh(N)


def cell_color(mesh: UniformMesh, j: int, k: int) -> CellColor:
    mesh._check_cell(j, k)
    return CellColor.RED if (j + k) % 2 == 0 else CellColor.BLACK


def edge_midpoints(mesh: UniformMesh) -> list[Edge]:
    """Enumerate all edges: horizontal ones first (row by row), then vertical ones."""
    n, h = mesh.N, mesh.h
    edges = []
    for k in range(n + 1):  # horizontal edge on the line y = k h
        for j in range(1, n + 1):
            cells = tuple(mesh.cell_index(j, kk) for kk in (k, k + 1) if 1 <= kk <= n)
            side = "bottom" if k == 0 else "top" if k == n else None
            edges.append(Edge(len(edges), ((j - 0.5) * h, k * h), "horizontal", cells, side))
    for j in range(n + 1):  # vertical edge on the line x = j h
        for k in range(1, n + 1):
            cells = tuple(mesh.cell_index(jj, k) for jj in (j, j + 1) if 1 <= jj <= n)
            side = "left" if j == 0 else "right" if j == n else None
            edges.append(Edge(len(edges), (j * h, (k - 0.5) * h), "vertical", cells, side))
    return edges


_cache: dict = {}


def _memo(fn):
    def wrapper(n):
        key = (fn.__name__, n)
        if key not in _cache:
            arr = fn(n)
            arr.flags.writeable = False
            _cache[key] = arr
        return _cache[key]

    return wrapper


@_memo
def _centers(n):
    h = 1.0 / n
    jj, kk = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1))
    return np.column_stack([(jj.ravel() - 0.5) * h, (kk.ravel() - 0.5) * h])


@_memo
def _cell_vertices(n):
    jj, kk = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1))
    j, k = jj.ravel(), kk.ravel()
    out = np.empty((n * n, 4), dtype=np.int64)
    # vertex of corner with signs (sx, sy) is V_{j + (sx-1)/2, k + (sy-1)/2}
    for c, (sx, sy) in enumerate(CORNER_SIGNS.astype(int)):
        vj = j + (sx - 1) // 2
        vk = k + (sy - 1) // 2
        inside = (vj >= 1) & (vj <= n - 1) & (vk >= 1) & (vk <= n - 1)
        out[:, c] = np.where(inside, (vk - 1) * (n - 1) + (vj - 1), -1)
    return out


@_memo
def _cell_nodes(n):
    jj, kk = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1))
    j, k = jj.ravel(), kk.ravel()
    out = np.empty((n * n, 4), dtype=np.int64)
    for c, (sx, sy) in enumerate(CORNER_SIGNS.astype(int)):
        out[:, c] = (k + (sy - 1) // 2) * (n + 1) + j + (sx - 1) // 2
    return out

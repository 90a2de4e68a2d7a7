"""Steady lid-driven cavity flow with the cheapest stable nonconforming pair:
P1-nonconforming quadrilateral velocity and checkerboard-free piecewise
constant pressure, with DSSY corner functions carrying the lid data."""
from .mesh import CellColor, UniformMesh, build_mesh, cell_color, edge_midpoints
from .spaces import (
    BoundaryLifting,
    PressureField,
    VelocityField,
    build_lifting,
    evaluate_velocity,
    pressure_constraint_rows,
    velocity_dof_map,
)
from .assembly import SaddleSystem, assemble_a, assemble_b, assemble_convection, assemble_rhs, assemble_system
from .solver import PicardConfig, SolveReport, initial_guess, picard_solve, solve_oseen
from .diagnostics import (
    DiagnosticsReport,
    cell_divergence,
    centerline_profiles,
    diagnose,
    flow_rate,
    locate_vortex,
    pressure_error,
    stream_function,
    velocity_errors,
    vorticity_integral,
)

__version__ = "0.1.0"

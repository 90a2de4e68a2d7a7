import numpy as np
import pytest
import scipy.sparse as sp

from nccavity.assembly import SaddleSystem, assemble_a, assemble_b, assemble_system
from nccavity.diagnostics import cell_divergence, divergence_alternates, flow_rate
from nccavity.mesh import build_mesh
from nccavity.solver import (
    LinearSolveError,
    PicardConfig,
    PicardError,
    initial_guess,
    nonlinear_residual,
    picard_solve,
    saddle_ordering,
    solve_oseen,
)
from nccavity.spaces import build_lifting, checkerboard, pressure_constraint_rows, project_pressure


def _stokes(N, nu=1.0):
    m = build_mesh(N)
    L = build_lifting(m)
    return m, L, assemble_system(m, nu, None, L, convection=False)


@pytest.mark.parametrize("N", [2, 8, 16])
def test_ordering_is_permutation(N):
    perm = saddle_ordering(N)
    n = 2 * (N - 1) ** 2 + N * N + 2
    assert sorted(perm) == list(range(n))
    assert list(perm[-2:]) == [n - 2, n - 1]


def test_stokes_solution():
    m, L, S = _stokes(16)
    u, p, info = solve_oseen(S)
    assert info["residual"] <= 1e-12
    assert abs(flow_rate(u, L, "vertical", 0.5)) <= 1e-10
    assert abs(flow_rate(u, L, "horizontal", 0.5)) <= 1e-10
    assert np.abs(p.constraint_residual()).max() <= 1e-12
    assert abs(checkerboard(m) @ p.gamma) <= 1e-12
    # Stokes velocity does not depend on nu; pressure scales with it
    u2, p2, _ = solve_oseen(assemble_system(m, 0.01, None, L, convection=False))
    np.testing.assert_allclose(u2.vector, u.vector, atol=1e-11)
    np.testing.assert_allclose(p2.gamma, 0.01 * p.gamma, atol=1e-11)


def test_pressure_recovered_from_consistent_forcing():
    m = build_mesh(4)
    A = assemble_a(m, 0.7)
    B = assemble_b(m)
    p0 = project_pressure(m, np.random.default_rng(8).standard_normal(m.n_cells))
    S = SaddleSystem(m, A, sp.csr_matrix(A.shape), B, pressure_constraint_rows(m),
                     B.T @ p0, np.zeros(m.n_cells))
    for form in ("multiplier", "explicit"):
        u, p, _ = solve_oseen(S, formulation=form)
        np.testing.assert_allclose(u.vector, 0, atol=1e-12)
        np.testing.assert_allclose(p.gamma, p0, atol=1e-12)


def test_formulations_agree():
    m = build_mesh(8)
    L = build_lifting(m)
    W = np.random.default_rng(4).standard_normal(2 * m.n_interior_vertices)
    S = assemble_system(m, 0.01, W, L)
    u1, p1, info = solve_oseen(S)
    u2, p2, _ = solve_oseen(S, formulation="explicit")
    np.testing.assert_allclose(u1.vector, u2.vector, atol=1e-10)
    np.testing.assert_allclose(p1.gamma, p2.gamma, atol=1e-10)
    assert info["multipliers"].shape == (2,)
    with pytest.raises(ValueError):
        solve_oseen(S, formulation="other")


def test_singular_system_is_reported():
    m = build_mesh(4)
    n = 2 * m.n_interior_vertices
    S = SaddleSystem(m, sp.csr_matrix((n, n)), sp.csr_matrix((n, n)), assemble_b(m),
                     pressure_constraint_rows(m), np.ones(n), np.zeros(m.n_cells))
    with pytest.raises(LinearSolveError):
        solve_oseen(S)


def test_config_validation_and_schedule():
    with pytest.raises(ValueError):
        PicardConfig(Re=0)
    with pytest.raises(ValueError):
        PicardConfig(Re=10, tol_rel=0)
    with pytest.raises(ValueError):
        PicardConfig(Re=10, initial="other")
    assert PicardConfig(Re=5000).schedule() == [100, 400, 1000, 2500, 5000]
    assert PicardConfig(Re=1000).schedule() == [1000]
    assert PicardConfig(Re=2500, continuation=None).schedule() == [2500]
    assert PicardConfig(Re=300, continuation=[50, 100, 400]).schedule() == [50, 100, 300]
    with pytest.raises(ValueError):
        PicardConfig(Re=300, continuation=[100, 50]).schedule()
    assert PicardConfig(Re=4).nu == 0.25


@pytest.fixture(scope="module")
def re100_n16():
    m = build_mesh(16)
    return m, picard_solve(m, PicardConfig(Re=100))


def test_picard_converges(re100_n16):
    m, (u, p, rep) = re100_n16
    assert rep.converged
    assert len(rep.residuals) == rep.iterations
    assert rep.residuals[-1] <= 1e-10
    assert all(r <= 1e-12 for r in rep.linear_residuals)
    assert np.abs(p.constraint_residual()).max() <= 1e-12
    d = rep.as_dict()
    assert d["stages"] == [{"Re": 100.0, "iterations": rep.iterations}]


def test_residual_recomputed_from_scratch(re100_n16):
    m, (u, p, rep) = re100_n16
    assert nonlinear_residual(m, 100.0, u, p) == pytest.approx(rep.residuals[-1], abs=1e-13)


def test_iterates_satisfy_divergence_law():
    m = build_mesh(16)
    L = build_lifting(m)
    # holds for any frozen transport field, hence for every Picard iterate
    W = np.random.default_rng(1).standard_normal(2 * m.n_interior_vertices)
    u, _, _ = solve_oseen(assemble_system(m, 1 / 400, W, L))
    div = cell_divergence(u, L)
    assert np.abs(np.abs(div) - m.h**3).max() <= 1e-11 * m.h**3 + 1e-13
    assert divergence_alternates(m, div)


def test_stokes_limit_converges_fast():
    m = build_mesh(8)
    _, _, rep = picard_solve(m, PicardConfig(Re=1e-4))
    assert rep.iterations <= 2


def test_max_iters_error_carries_history():
    m = build_mesh(16)
    with pytest.raises(PicardError) as err:
        picard_solve(m, PicardConfig(Re=1000, max_iters=2))
    assert len(err.value.residuals) == 2


def test_continuation_stages():
    m = build_mesh(8)
    _, _, rep = picard_solve(m, PicardConfig(Re=200, continuation=[50, 100]))
    assert [r for r, _ in rep.stages] == [50.0, 100.0, 200.0]
    assert sum(n for _, n in rep.stages) == rep.iterations


def test_initial_guess_strategies():
    m = build_mesh(64)
    L = build_lifting(m)
    assert not initial_guess(m, PicardConfig(Re=1000, initial="zero")).vector.any()
    first = {}
    for strategy in ("stokes", "zero"):
        with pytest.raises(PicardError) as err:
            picard_solve(m, PicardConfig(Re=1000, max_iters=1, initial=strategy), L)
        first[strategy] = err.value.residuals[0]
    assert first["stokes"] < first["zero"]

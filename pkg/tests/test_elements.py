import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nccavity.elements import (
    DSSY_NODES,
    AffineMap,
    dssy_ref_eval,
    gauss_rule,
    p1nc_gradient,
    p1nc_local,
    theta,
)
from nccavity.mesh import MeshError, build_mesh


def test_theta_values():
    assert theta(1, 0.0) == 0.0
    assert theta(1, 1.0) == pytest.approx(-2.0 / 3.0, abs=1e-15)
    assert theta(2, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert theta(0, 0.5) == 0.25
    with pytest.raises(ValueError):
        theta(3, 0.0)


def test_dssy_examples():
    assert dssy_ref_eval(2, 0.0, 1.0)[0] == pytest.approx(1.0, abs=1e-15)
    assert dssy_ref_eval(2, 0.0, -1.0)[0] == pytest.approx(0.0, abs=1e-15)
    total = sum(dssy_ref_eval(j, 0.3, -0.7)[0] for j in range(1, 5))
    assert total == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        dssy_ref_eval(5, 0.0, 0.0)


@pytest.mark.parametrize("ell", [0, 1, 2])
def test_dssy_kronecker(ell):
    for j in range(1, 5):
        for k, (x, y) in enumerate(DSSY_NODES):
            val = dssy_ref_eval(j, x, y, ell)[0]
            assert abs(val - (j == k + 1)) <= 1e-14


def _edges():
    # (parametrisation t -> (x, y), midpoint)
    return [
        (lambda t: (np.ones_like(t), t), (1.0, 0.0)),
        (lambda t: (t, np.ones_like(t)), (0.0, 1.0)),
        (lambda t: (-np.ones_like(t), t), (-1.0, 0.0)),
        (lambda t: (t, -np.ones_like(t)), (0.0, -1.0)),
    ]


@pytest.mark.parametrize("ell", [1, 2])
def test_mean_value_property(ell):
    # 4-point Gauss is exact up to degree 7 along an edge
    t, w = np.polynomial.legendre.leggauss(4)
    for j in range(1, 5):
        for edge, mid in _edges():
            mean = 0.5 * np.dot(w, dssy_ref_eval(j, *edge(t), ell)[0])
            assert abs(mean - dssy_ref_eval(j, *mid, ell)[0]) <= 1e-13


def test_rotated_q1_lacks_mean_value_property():
    t, w = np.polynomial.legendre.leggauss(4)
    edge, mid = _edges()[0]
    mean = 0.5 * np.dot(w, dssy_ref_eval(2, *edge(t), 0)[0])
    # deviation is (1/4) * mean of t^2 over the edge
    assert abs(mean - dssy_ref_eval(2, *mid, 0)[0]) == pytest.approx(1 / 12, abs=1e-14)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.99, 0.99, size=(20, 2))
    step = 1e-6
    for j in range(1, 5):
        for x, y in pts:
            _, (gx, gy) = dssy_ref_eval(j, x, y)
            fx = (dssy_ref_eval(j, x + step, y)[0] - dssy_ref_eval(j, x - step, y)[0]) / (2 * step)
            fy = (dssy_ref_eval(j, x, y + step)[0] - dssy_ref_eval(j, x, y - step)[0]) / (2 * step)
            assert abs(gx - fx) <= 1e-8 and abs(gy - fy) <= 1e-8


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.sampled_from([0, 1, 2]))
def test_partition_of_unity(x, y, ell):
    vals = [dssy_ref_eval(j, x, y, ell)[0] for j in range(1, 5)]
    grads = [dssy_ref_eval(j, x, y, ell)[1] for j in range(1, 5)]
    assert abs(sum(vals) - 1.0) <= 1e-13
    assert abs(sum(g[0] for g in grads)) <= 1e-12
    assert abs(sum(g[1] for g in grads)) <= 1e-12


def test_p1nc_gradients():
    m = build_mesh(8)
    h = m.h
    np.testing.assert_allclose(p1nc_gradient(m, (3, 4), (3, 4)), [1 / h, 1 / h])
    np.testing.assert_allclose(p1nc_gradient(m, (3, 4), (4, 4)), [-1 / h, 1 / h])
    np.testing.assert_allclose(p1nc_gradient(m, (3, 4), (4, 5)), [-1 / h, -1 / h])
    np.testing.assert_allclose(p1nc_gradient(m, (3, 4), (3, 5)), [1 / h, -1 / h])
    total = sum(p1nc_gradient(m, (3, 4), c) for c in [(3, 4), (4, 4), (4, 5), (3, 5)])
    np.testing.assert_allclose(total, [0, 0], atol=1e-12)
    with pytest.raises(MeshError):
        p1nc_gradient(m, (3, 4), (5, 5))


def test_p1nc_local_midpoint_values():
    # corner order BL, BR, TR, TL; midpoints right, top, left, bottom
    mids = DSSY_NODES
    vals = p1nc_local(mids[:, 0], mids[:, 1])
    expected = np.array([
        [0, 0, 1, 1],  # BL corner touches left and bottom edges
        [1, 0, 0, 1],
        [1, 1, 0, 0],
        [0, 1, 1, 0],
    ]).T
    np.testing.assert_allclose(vals, expected, atol=1e-15)


def test_affine_map():
    m = build_mesh(4)
    F = AffineMap.for_cell(m, 2, 3)
    x, y = F.forward(DSSY_NODES[:, 0], DSSY_NODES[:, 1])
    np.testing.assert_allclose(np.column_stack([x, y]),
                               [[0.5, 0.625], [0.375, 0.75], [0.25, 0.625], [0.375, 0.5]])
    xr, yr = F.inverse(x, y)
    np.testing.assert_allclose(np.column_stack([xr, yr]), DSSY_NODES, atol=1e-15)
    assert F.jacobian == pytest.approx(m.h**2 / 4)


def test_gauss_rule():
    r1 = gauss_rule(1)
    np.testing.assert_allclose(r1.points, [[0.0, 0.0]])
    np.testing.assert_allclose(r1.weights, [4.0])
    r2 = gauss_rule(2)
    assert r2.integrate(lambda x, y: x**2 * y**2) == pytest.approx(4 / 9, abs=1e-15)
    r3 = gauss_rule(3)
    assert abs(r3.integrate(lambda x, y: theta(1, x))) <= 1e-15
    for n in range(1, 8):
        r = gauss_rule(n)
        assert np.all(r.weights > 0)
        assert r.weights.sum() == pytest.approx(4.0, abs=1e-14)
        d = 2 * n - 1
        assert r.integrate(lambda x, y: x**d * y ** (d - 1)) == pytest.approx(0.0, abs=1e-14)
        assert r.integrate(lambda x, y: x ** (d - 1) * np.ones_like(y)) == pytest.approx(
            2 * 2 / d, abs=1e-13)

import numpy as np
import pytest
from scipy.optimize import minimize

from conftest import random_ssc_system
from lipstab.errors import InfeasibleRegionError
from lipstab.norms import NormSpec
from lipstab.solvers.projection import project_polyhedron

BOX = [(np.array([1.0, 0.0]), 1.0), (np.array([-1.0, 0.0]), 1.0),
       (np.array([0.0, 1.0]), 1.0), (np.array([0.0, -1.0]), 1.0)]


def grid_refine_distance(x, rows, lo=-3.0, hi=3.0, rounds=10, pts=41):
    """Brute-force oracle: shrinking-grid search of the nearest feasible point."""
    center = np.full(len(x), (lo + hi) / 2.0)
    width = hi - lo
    best = None
    for _ in range(rounds):
        axes = [np.linspace(c - width / 2, c + width / 2, pts) for c in center]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(x))
        feas = np.ones(len(grid), dtype=bool)
        for a, b in rows:
            feas &= grid @ a <= b + 1e-12
        cand = grid[feas]
        d = np.linalg.norm(cand - x, axis=1)
        k = int(np.argmin(d))
        best = d[k]
        center = cand[k]
        width /= pts / 4.0
    return float(best)


def test_halfspace():
    d, y = project_polyhedron(np.array([2.0, 0.0]), [(np.array([1.0, 0.0]), 1.0)])
    assert d == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(y, [1.0, 0.0])


def test_box_corner_distance_matches_grid_oracle():
    x = np.array([2.0, 2.0])
    oracle = grid_refine_distance(x, BOX)
    assert oracle == pytest.approx(np.sqrt(2.0), abs=1e-6)  # frozen from the oracle
    d, y = project_polyhedron(x, BOX)
    assert d == pytest.approx(np.sqrt(2.0), abs=1e-10)
    assert np.allclose(y, [1.0, 1.0], atol=1e-9)


def test_feasible_point_is_identity():
    x = np.array([0.25, -0.75])
    d, y = project_polyhedron(x, BOX)
    assert d == 0.0
    assert np.array_equal(y, x)


def test_empty_region_raises():
    rows = [(np.array([1.0]), 0.0), (np.array([-1.0]), -1.0)]
    with pytest.raises(InfeasibleRegionError):
        project_polyhedron(np.array([5.0]), rows)


def test_zero_row_vacuous_and_empty():
    d, _ = project_polyhedron(np.array([2.0]), [(np.array([0.0]), 1.0),
                                                (np.array([1.0]), 1.0)])
    assert d == pytest.approx(1.0)
    with pytest.raises(InfeasibleRegionError):
        project_polyhedron(np.array([2.0]), [(np.array([0.0]), -1.0)])


def test_l1_linf_box_distances():
    x = np.array([2.0, 2.0])
    d1, _ = project_polyhedron(x, BOX, NormSpec("l1"))
    assert d1 == pytest.approx(2.0, abs=1e-9)  # |2-1| + |2-1|
    dinf, _ = project_polyhedron(x, BOX, NormSpec("linf"))
    assert dinf == pytest.approx(1.0, abs=1e-9)  # max(|2-1|, |2-1|)


def test_random_instances_match_slsqp(rng):
    for _ in range(60):
        system, xhat = random_ssc_system(rng, n=int(rng.integers(2, 5)),
                                         m=int(rng.integers(3, 20)))
        A = system.coefficient_matrix()
        b = system.rhs_vector()
        x = xhat + rng.normal(size=system.dimension) * 2.0
        d, y = project_polyhedron(x, list(zip(A, b)), start=xhat)
        assert (A @ y - b).max() <= 1e-7
        ref = minimize(
            lambda z: ((z - x) ** 2).sum(), xhat, jac=lambda z: 2 * (z - x),
            constraints=[{"type": "ineq", "fun": lambda z, i=i: b[i] - A[i] @ z,
                          "jac": lambda z, i=i: -A[i]} for i in range(len(b))],
            method="SLSQP", options={"maxiter": 500, "ftol": 1e-16})
        oracle = float(np.sqrt(max(ref.fun, 0.0)))
        assert d == pytest.approx(oracle, rel=1e-6, abs=1e-7)

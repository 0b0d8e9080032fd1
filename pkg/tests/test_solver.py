import numpy as np
import pytest
from scipy import sparse

from src.assembly import assemble_system
from src.errors import SolverError
from src.problem import builtin_example
from src.solver import DirectSolver, IterativeSolver, SolverConfig, solve


def test_identity_system():
    b = np.arange(5.0)
    report = solve((sparse.identity(5, format="csr"), b))
    np.testing.assert_allclose(report.solution, b)
    assert report.method == "direct"
    assert report.residual == 0.0


@pytest.mark.parametrize("mode", ["direct", "iterative"])
def test_small_system(mode):
    A = sparse.csr_matrix([[2.0, 1.0], [1.0, 2.0]])
    report = solve((A, np.array([3.0, 3.0])), SolverConfig(mode=mode))
    np.testing.assert_allclose(report.solution, [1.0, 1.0], atol=1e-12)
    assert report.residual <= 1e-10
    assert report.residual_history[-1] == report.residual


def test_direct_and_iterative_agree(voronoi64):
    system = assemble_system(builtin_example(2), voronoi64, 2)
    direct = solve(system, SolverConfig(mode="direct"))
    iterative = solve(system, SolverConfig(mode="iterative", tol=1e-11, restart=100))
    assert iterative.method == "iterative"
    assert iterative.iterations >= 1
    assert len(iterative.residual_history) == iterative.iterations + 1
    scale = np.abs(direct.solution).max()
    np.testing.assert_allclose(iterative.solution, direct.solution, atol=1e-6 * scale)
    assert "relative residual" in iterative.summary()


def test_solvers_agree_on_the_elliptic_system(voronoi256):
    system = assemble_system(builtin_example(2), voronoi256, 2)
    assert system.dim == 256 * 6
    direct = solve(system, SolverConfig(mode="direct")).solution
    config = SolverConfig(mode="iterative", tol=1e-13, max_iter=20, drop_tol=1e-10)
    iterative = solve(system, config).solution
    assert np.linalg.norm(iterative - direct) <= 1e-8 * np.linalg.norm(direct)


def test_singular_matrix_fails():
    A = sparse.csr_matrix([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SolverError):
        DirectSolver().solve(A, np.array([1.0, 0.0]))


def test_shape_mismatch():
    with pytest.raises(SolverError, match="not square"):
        DirectSolver().solve(sparse.identity(3, format="csr"), np.ones(2))


def test_non_convergence_keeps_residual_history(monkeypatch):
    def stalled_gmres(A, b, x0, rtol, atol, restart, maxiter, M, callback, callback_type):
        for _ in range(restart * maxiter):
            callback(0.5)
        return x0, maxiter

    monkeypatch.setattr("src.solver.iterative.gmres", stalled_gmres)
    config = SolverConfig(mode="iterative", max_iter=3, restart=4)
    with pytest.raises(SolverError, match="did not converge within 3 restarts") as info:
        IterativeSolver(config).solve(sparse.identity(4, format="csr"), np.ones(4))
    assert info.value.residuals == [0.5] * 12


@pytest.mark.parametrize("kwargs, match", [
    ({"mode": "cg"}, "unknown solver mode"),
    ({"tol": 0.0}, "tolerance"),
    ({"max_iter": 0}, "positive"),
    ({"restart": 0}, "positive"),
])
def test_bad_config(kwargs, match):
    with pytest.raises(SolverError, match=match):
        SolverConfig(**kwargs)

from .base import LinearSolver, SolveReport, SolverConfig, relative_residual
from .direct import DirectSolver
from .iterative import IterativeSolver

SOLVERS = {
    "direct": DirectSolver,
    "iterative": IterativeSolver,
}


def solve(system, config=None):
    """Solve a LinearSystem (or an ``(A, b)`` pair) with the configured method."""
    config = config or SolverConfig()
    if isinstance(system, tuple):
        A, b = system
    else:
        A, b = system.matrix, system.rhs
    return SOLVERS[config.mode](config).solve(A, b)

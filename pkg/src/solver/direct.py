import numpy as np
from scipy.sparse.linalg import splu

from ..errors import SolverError
from .base import LinearSolver


class DirectSolver(LinearSolver):
    """Sparse LU with partial pivoting (SuperLU)."""

    name = "direct"

    def _solve(self, A, b):
        try:
            lu = splu(A.tocsc())
        except RuntimeError as e:
            raise SolverError(f"sparse LU failed: {e}") from e
        x = lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise SolverError("sparse LU produced non-finite values (zero pivot)")
        return x, 1, []

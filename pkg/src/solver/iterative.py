import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres, spilu

from ..errors import SolverError
from .base import LinearSolver, relative_residual

# extra GMRES runs restarted from the current iterate when the true residual misses tol
MAX_REFINEMENTS = 3


class IterativeSolver(LinearSolver):
    """Restarted GMRES, left-preconditioned with an incomplete LU factorisation."""

    name = "iterative"

    def _preconditioner(self, A):
        try:
            ilu = spilu(A.tocsc(), drop_tol=self.config.drop_tol, fill_factor=self.config.fill_factor)
        except RuntimeError as e:
            raise SolverError(f"incomplete LU failed: {e}") from e
        return LinearOperator(A.shape, matvec=ilu.solve, dtype=float)

    def _solve(self, A, b):
        cfg = self.config
        M = self._preconditioner(A)
        history = []
        x = np.zeros(len(b))
        for _ in range(MAX_REFINEMENTS):
            x, info = gmres(A, b, x0=x, rtol=0.1 * cfg.tol, atol=0.0, restart=cfg.restart,
                            maxiter=cfg.max_iter, M=M, callback=history.append,
                            callback_type="pr_norm")
            if info < 0:
                raise SolverError(f"GMRES breakdown (info={info})", residuals=history)
            if relative_residual(A, x, b) <= cfg.tol:
                break
            if info > 0 and len(history) >= cfg.max_iter * cfg.restart:
                raise SolverError(f"GMRES did not converge within {cfg.max_iter} restarts",
                                  residuals=history)
        return x, len(history), [float(h) for h in history]

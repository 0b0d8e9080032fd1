from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import SolverError

logger = logging.getLogger(__name__)

MODES = ("direct", "iterative")


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "direct"
    tol: float = 1e-10
    max_iter: int = 1000
    restart: int = 50
    drop_tol: float = 1e-5
    fill_factor: float = 20.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise SolverError(f"unknown solver mode {self.mode!r}; choose one of {MODES}")
        if not self.tol > 0:
            raise SolverError("solver tolerance must be positive")
        if int(self.max_iter) < 1 or int(self.restart) < 1:
            raise SolverError("max_iter and restart must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass
class SolveReport:
    solution: np.ndarray
    method: str
    iterations: int
    residual: float
    residual_history: list = field(default_factory=list)

    def summary(self):
        return f"{self.method} solve: {self.iterations} iterations, relative residual {self.residual:.3e}"


def relative_residual(A, x, b):
    r = np.linalg.norm(A @ x - b)
    nb = np.linalg.norm(b)
    return float(r / nb) if nb > 0 else float(r)


class LinearSolver(ABC):
    def __init__(self, config=None):
        self.config = config or SolverConfig()

    @abstractmethod
    def _solve(self, A, b):
        """Return ``(x, iterations, residual_history)``."""

    def solve(self, A, b):
        if A.shape[0] != A.shape[1] or A.shape[0] != len(b):
            raise SolverError(f"system is not square or rhs has the wrong length: {A.shape}, {len(b)}")
        x, iterations, history = self._solve(A, np.asarray(b, dtype=float))
        residual = relative_residual(A, x, b)
        history = list(history) + [residual]
        if not np.isfinite(residual) or residual > self.config.tol:
            raise SolverError(f"{self.name} solve finished with relative residual {residual:.3e} "
                              f"> tolerance {self.config.tol:.1e}", residuals=history)
        report = SolveReport(x, self.name, iterations, residual, history)
        logger.info(report.summary())
        return report

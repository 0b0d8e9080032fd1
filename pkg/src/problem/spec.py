"""Coefficient model of -div(a grad u) + b.grad u + c u = f with boundary data."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ProblemError
from ..spaces import volume_quadrature

logger = logging.getLogger(__name__)


def constant_tensor(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        a = a * np.eye(2)
    return lambda p: np.broadcast_to(a, (len(p), 2, 2)).copy()


def constant_vector(b):
    b = np.asarray(b, dtype=float)
    return lambda p: np.broadcast_to(b, (len(p), 2)).copy()


def constant_scalar(c):
    return lambda p: np.full(len(p), float(c))


ZERO = constant_scalar(0.0)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """All fields are callables on ``(n, 2)`` point arrays.

    ``diffusion`` returns ``(n, 2, 2)``, ``advection`` ``(n, 2)``, scalar fields
    ``(n,)``. ``neumann`` takes ``(points, normals)``. ``neumann_marker`` selects
    the elliptic boundary faces that carry Neumann instead of Dirichlet data and
    ``subdomains`` maps points to subdomain ids for piecewise recovery.
    """

    name: str
    diffusion: Callable
    advection: Callable
    reaction: Callable
    source: Callable
    dirichlet: Callable = ZERO
    div_advection: Callable = ZERO
    neumann: Optional[Callable] = None
    exact: Optional[Callable] = None
    exact_gradient: Optional[Callable] = None
    neumann_marker: Optional[Callable] = None
    subdomains: Optional[Callable] = None
    domain: tuple = (0.0, 1.0, 0.0, 1.0)
    mesh_family: str = "voronoi"

    @property
    def has_exact(self):
        return self.exact is not None and self.exact_gradient is not None

    def neumann_data(self, points, normals):
        if self.neumann is None:
            return np.zeros(len(points))
        return np.asarray(self.neumann(points, normals), dtype=float)

    def c0(self, points):
        """Effective reaction ``c - div(b) / 2``."""
        return self.reaction(points) - 0.5 * self.div_advection(points)


def check_diffusion(spec, points):
    """Raise ProblemError unless ``a`` is symmetric positive semidefinite at ``points``."""
    a = np.asarray(spec.diffusion(points), dtype=float)
    if a.shape != (len(points), 2, 2):
        raise ProblemError(f"{spec.name}: diffusion must return shape (n, 2, 2), got {a.shape}")
    asym = np.abs(a - np.swapaxes(a, 1, 2)).max(axis=(1, 2))
    scale = np.abs(a).max(axis=(1, 2)) + 1.0
    if np.any(asym > 1e-12 * scale):
        k = int(np.argmax(asym))
        raise ProblemError(f"{spec.name}: diffusion tensor is not symmetric at {points[k].tolist()}")
    lam = np.linalg.eigvalsh(a)[:, 0]
    if np.any(lam < -1e-12):
        k = int(np.argmin(lam))
        raise ProblemError(f"{spec.name}: diffusion tensor is not positive semidefinite at "
                           f"{points[k].tolist()} (smallest eigenvalue {lam[k]:.3e})")
    return float(np.linalg.norm(a, ord=2, axis=(1, 2)).max())


def verify_positivity(spec, mesh, order=4):
    """Return ``min(c - div(b)/2)`` over the volume quadrature points (gamma_0 estimate)."""
    points, _ = volume_quadrature(mesh, order)
    flat = points.reshape(-1, 2)
    check_diffusion(spec, flat)
    gamma0 = float(np.min(spec.c0(flat)))
    if gamma0 <= 0:
        logger.warning("%s: c - div(b)/2 has minimum %.3e <= 0; the coercivity assumption "
                       "does not hold, continuing anyway", spec.name, gamma0)
    else:
        logger.info("%s: gamma_0 estimate %.6g", spec.name, gamma0)
    return gamma0

"""Element-wise discontinuous polynomials on the polytopic mesh."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import SpaceError

# relative tolerance of the point-in-element test
INSIDE_TOL = 1e-10


def monomial_exponents(r):
    """Exponent pairs ``(i, j)`` ordered by total degree."""
    return [(d - j, j) for d in range(r + 1) for j in range(d + 1)]


def local_dim(r):
    return (r + 1) * (r + 2) // 2


def _powers(z, r):
    out = np.ones(z.shape + (r + 1,))
    for k in range(1, r + 1):
        out[..., k] = out[..., k - 1] * z
    return out


def scaled_monomials(points, centers, scales, r):
    """Values ``(n, m)`` and gradients ``(n, m, 2)`` of the scaled monomials.

    ``centers`` ``(n, 2)`` and ``scales`` ``(n,)`` give the per-point cell
    center and scale, so points of different cells can be evaluated together.
    """
    points = np.atleast_2d(points)
    xi = (points[:, 0] - centers[:, 0]) / scales
    eta = (points[:, 1] - centers[:, 1]) / scales
    px, py = _powers(xi, r), _powers(eta, r)
    exps = monomial_exponents(r)
    vals = np.empty((len(points), len(exps)))
    grads = np.zeros((len(points), len(exps), 2))
    for k, (i, j) in enumerate(exps):
        vals[:, k] = px[:, i] * py[:, j]
        if i:
            grads[:, k, 0] = i * px[:, i - 1] * py[:, j] / scales
        if j:
            grads[:, k, 1] = j * px[:, i] * py[:, j - 1] / scales
    return vals, grads


def inside_polygon(polygon, points, h):
    """Boolean mask of points inside a convex CCW polygon, up to ``INSIDE_TOL * h``."""
    p = np.atleast_2d(points)
    edges = np.roll(polygon, -1, axis=0) - polygon
    lengths = np.linalg.norm(edges, axis=1)
    rel = p[:, None, :] - polygon[None, :, :]
    cross = edges[None, :, 0] * rel[..., 1] - edges[None, :, 1] * rel[..., 0]
    return np.all(cross >= -INSIDE_TOL * h * lengths[None, :], axis=1)


@dataclass(frozen=True, eq=False)
class DgSpace:
    """Scaled monomials per cell: ``((x - x_T) / s_T)^i ((y - y_T) / s_T)^j``, ``i + j <= r``.

    ``x_T`` is the centre and ``s_T`` the half-diagonal of the cell bounding box.
    Cell ``T`` owns the contiguous dofs ``offsets[T] : offsets[T] + local_dim``.
    """

    mesh: object
    degree: int

    @property
    def local_dim(self):
        return local_dim(self.degree)

    @property
    def dim(self):
        return self.mesh.n_cells * self.local_dim

    @cached_property
    def offsets(self):
        return np.arange(self.mesh.n_cells) * self.local_dim

    @property
    def centers(self):
        return self.mesh.bounding_boxes[0]

    @property
    def scales(self):
        return self.mesh.bounding_boxes[1]

    def cell_dofs(self, cell):
        return self.offsets[cell] + np.arange(self.local_dim)

    def dofs_of(self, cells):
        """Dof index array ``(n, local_dim)`` for an array of cells."""
        return np.asarray(cells)[:, None] * self.local_dim + np.arange(self.local_dim)[None, :]

    def evaluate(self, cells, points):
        """Unchecked vectorised evaluation; ``cells[k]`` is the cell of ``points[k]``."""
        cells = np.asarray(cells)
        return scaled_monomials(points, self.centers[cells], self.scales[cells], self.degree)

    def eval_cell(self, cell, points, check=True):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if check:
            poly = self.mesh.vertices[self.mesh.cells[cell]]
            ok = inside_polygon(poly, points, self.mesh.cell_diameters[cell])
            if not np.all(ok):
                k = int(np.flatnonzero(~ok)[0])
                raise SpaceError(f"point {points[k].tolist()} lies outside cell {cell}")
        return self.evaluate(np.full(len(points), cell), points)


def build_dg_space(mesh, r):
    if isinstance(r, bool) or int(r) != r:
        raise SpaceError(f"polynomial degree must be an integer, got {r!r}")
    if int(r) < 1:
        raise SpaceError(f"unsupported polynomial degree {r}; the recovered method needs r >= 1")
    return DgSpace(mesh=mesh, degree=int(r))

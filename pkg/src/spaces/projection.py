"""Basis evaluation helpers and the element-wise L2 projection."""
from __future__ import annotations

import numpy as np

from ..errors import SpaceError
from .conforming import ConformingSpace
from .dg import DgSpace
from .quadrature import MAX_ORDER, map_triangles, quadrature


def default_order(r):
    return min(2 * r + 4, MAX_ORDER)


def volume_quadrature(mesh, order):
    """Per sub-triangle physical points ``(n_tri, nq, 2)`` and weights ``(n_tri, nq)``."""
    return map_triangles(mesh.vertices, mesh.subtriangles, quadrature("triangle", order))


def eval_basis(space, element, points, check=True):
    """Values and gradients of the local basis on a cell (DG) or sub-triangle (conforming)."""
    if isinstance(space, DgSpace):
        return space.eval_cell(element, points, check=check)
    if isinstance(space, ConformingSpace):
        return space.eval_triangle(element, points, check=check)
    raise SpaceError(f"unsupported space type {type(space).__name__}")


def eval_dg_function(space, coeffs, cells, points):
    """Values and gradients of a DG coefficient vector at points of the given cells."""
    cells = np.asarray(cells)
    vals, grads = space.evaluate(cells, points)
    local = np.asarray(coeffs)[space.dofs_of(cells)]
    return np.einsum("nm,nm->n", vals, local), np.einsum("nmd,nm->nd", grads, local)


def eval_conforming_function(space, coeffs, tris, points):
    tris = np.asarray(tris)
    vals, grads = space.evaluate(tris, points)
    local = np.asarray(coeffs)[space.tri_nodes[tris]]
    return np.einsum("nm,nm->n", vals, local), np.einsum("nmd,nm->nd", grads, local)


def mass_matrices(space, order=None):
    """Local mass matrices ``(n_cells, m, m)`` of a DG space, integrated over sub-triangles."""
    mesh = space.mesh
    points, weights = volume_quadrature(mesh, order or default_order(space.degree))
    n_tri, nq = weights.shape
    cells = np.repeat(mesh.subtriangle_parent, nq)
    vals, _ = space.evaluate(cells, points.reshape(-1, 2))
    vals = vals.reshape(n_tri, nq, -1)
    per_tri = np.einsum("tq,tqi,tqj->tij", weights, vals, vals)
    M = np.zeros((mesh.n_cells,) + per_tri.shape[1:])
    np.add.at(M, mesh.subtriangle_parent, per_tri)
    return M


def l2_project(f, space, order=None):
    """Coefficients of the L2 projection of the scalar field ``f(points)`` onto ``space``."""
    mesh = space.mesh
    order = order or default_order(space.degree)
    points, weights = volume_quadrature(mesh, order)
    n_tri, nq = weights.shape
    flat = points.reshape(-1, 2)
    cells = np.repeat(mesh.subtriangle_parent, nq)
    vals, _ = space.evaluate(cells, flat)
    vals = vals.reshape(n_tri, nq, -1)
    fv = np.asarray(f(flat), dtype=float).reshape(n_tri, nq)

    M = np.zeros((mesh.n_cells, space.local_dim, space.local_dim))
    rhs = np.zeros((mesh.n_cells, space.local_dim))
    np.add.at(M, mesh.subtriangle_parent, np.einsum("tq,tqi,tqj->tij", weights, vals, vals))
    np.add.at(rhs, mesh.subtriangle_parent, np.einsum("tq,tq,tqi->ti", weights, fv, vals))
    try:
        local = np.linalg.solve(M, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as e:
        raise SpaceError("singular local mass matrix; the DG basis is broken") from e
    return local.reshape(-1)

"""Nodal-averaging recovery from DG coefficients to conforming nodal values."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import ContinuousFunctionError, RecoveryError
from ..spaces import (
    default_order,
    eval_conforming_function,
    eval_dg_function,
    face_quadrature,
    face_sizes,
    volume_quadrature,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RecoveryOperator:
    """``matrix[node, dof]``: rows average the point values of the cells sharing the node."""

    matrix: sparse.csr_matrix
    dg: object
    conf: object

    @property
    def partitioned(self):
        return self.conf.partition is not None

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def omega_sizes(self):
        return self.conf.omega_sizes

    def apply(self, v):
        v = np.asarray(v)
        if v.shape[0] != self.matrix.shape[1]:
            raise RecoveryError(f"DG vector has length {v.shape[0]}, expected {self.matrix.shape[1]}")
        return self.matrix @ v

    def kp_ratio(self, v, alpha, order=None):
        return kp_ratio(self, v, alpha, order=order)


def build_recovery(dg, conf):
    if dg.mesh is not conf.mesh:
        raise RecoveryError("DG and conforming spaces live on different meshes")
    if dg.degree != conf.degree:
        raise RecoveryError(f"degree mismatch: DG r={dg.degree}, conforming r={conf.degree}")
    sizes = conf.omega_sizes
    if np.any(sizes < 1):
        raise RecoveryError(f"node {int(np.argmin(sizes))} belongs to no cell")
    nodes = np.repeat(np.arange(conf.n_nodes), sizes)
    cells = conf.omega.indices
    vals, _ = dg.evaluate(cells, conf.node_coords[nodes])
    weights = vals / sizes[nodes][:, None]
    m = dg.local_dim
    matrix = sparse.coo_matrix(
        (weights.ravel(), (np.repeat(nodes, m), dg.dofs_of(cells).ravel())),
        shape=(conf.n_nodes, dg.dim),
    ).tocsr()
    logger.debug("recovery operator %s x %s, %d nonzeros, max |omega| = %d",
                 conf.n_nodes, dg.dim, matrix.nnz, int(sizes.max()))
    return RecoveryOperator(matrix=matrix, dg=dg, conf=conf)


def apply_recovery(R, v):
    return R.apply(v)


def kp_ratio(R, v, alpha, order=None):
    """Ratio of ``sum_T |v - E v|^2_{alpha,T}`` to ``sum_F h_F^(1 - 2 alpha) ||[v]||^2_F``.

    Both sides are integrated by quadrature; the volume seminorm runs over the
    sub-triangles and the jump term over interior polytopic faces.
    """
    if alpha not in (0, 1):
        raise RecoveryError(f"alpha must be 0 or 1, got {alpha!r}")
    dg, conf = R.dg, R.conf
    mesh = dg.mesh
    order = order or default_order(dg.degree)
    v = np.asarray(v, dtype=float)
    ev = R.apply(v)

    points, weights = volume_quadrature(mesh, order)
    nq = weights.shape[1]
    flat = points.reshape(-1, 2)
    tris = np.repeat(np.arange(mesh.n_subtriangles), nq)
    u, gu = eval_dg_function(dg, v, mesh.subtriangle_parent[tris], flat)
    e, ge = eval_conforming_function(conf, ev, tris, flat)
    if alpha == 0:
        density = (u - e) ** 2
    else:
        density = np.sum((gu - ge) ** 2, axis=1)
    lhs = float(np.sum(weights.ravel() * density))

    fq = face_quadrature(mesh, order)
    fq = fq.subset(fq.interior)
    nq = fq.weights.shape[1]
    fp = fq.points.reshape(-1, 2)
    plus, _ = eval_dg_function(dg, v, np.repeat(fq.owner, nq), fp)
    minus, _ = eval_dg_function(dg, v, np.repeat(fq.neighbor, nq), fp)
    h = face_sizes(mesh)[fq.face] ** (1 - 2 * alpha)
    w = (fq.weights * h[:, None]).ravel()
    rhs = float(np.sum(w * (plus - minus) ** 2))
    scale = float(np.sum(w * (plus ** 2 + minus ** 2)))
    if scale == 0.0 or rhs <= 1e-24 * scale:
        raise ContinuousFunctionError("ratio undefined: the function has no jumps across interior faces")
    return lhs / rhs

"""Upwind face terms of the first-order part, tested against recovered functions.

The inflow part of a face is taken pointwise: at each quadrature point only
the side with ``b.n_T < 0`` contributes ``-(b.n_T) (u_T - u_other) E(v)``.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse

from .geometry import per_element, scatter_matrix, scatter_vector
from .nitsche import dirichlet_points


def _upwind_side(ctx, weights, bn, tris, phi, cells_t, psi_t, cells_o, psi_o):
    """Matrix of ``-int min(b.n_T, 0) (u_T - u_other) phi_i`` for one side of the faces."""
    conf, dg = ctx.conf, ctx.dg
    nq = ctx.face_nq
    wT = per_element(weights * np.minimum(bn, 0.0), nq)
    phi, psi_t, psi_o = (per_element(v, nq) for v in (phi, psi_t, psi_o))
    rows = per_element(conf.tri_nodes[tris], nq)[:, 0]
    cells_t = per_element(cells_t, nq)[:, 0]
    cells_o = per_element(cells_o, nq)[:, 0]
    shape = (conf.n_nodes, dg.dim)
    own = scatter_matrix(rows, dg.dofs_of(cells_t), -np.einsum("eq,eqi,eqj->eij", wT, phi, psi_t), shape)
    other = scatter_matrix(rows, dg.dofs_of(cells_o), np.einsum("eq,eqi,eqj->eij", wT, phi, psi_o), shape)
    return own + other


def advection_blocks(spec, ctx, boundary):
    """Conforming-test x DG-trial upwind matrix and the inflow data vector."""
    conf, dg = ctx.conf, ctx.dg
    nq = ctx.face_nq
    D = sparse.csr_matrix((conf.n_nodes, dg.dim))
    rhs = np.zeros(conf.n_nodes)

    fp = dirichlet_points(ctx, boundary)
    if len(fp.weights):
        b = np.asarray(spec.advection(fp.points_in))
        g = np.asarray(spec.dirichlet(fp.points_in))
        bn = np.einsum("pd,pd->p", b, fp.normal)
        wneg = per_element(fp.weights * np.minimum(bn, 0.0), nq)
        phi = per_element(fp.cf_in, nq)
        psi = per_element(fp.dg_in, nq)
        rows = per_element(conf.tri_nodes[fp.tri_in], nq)[:, 0]
        cells = per_element(fp.owner, nq)[:, 0]
        D = D + scatter_matrix(rows, dg.dofs_of(cells), -np.einsum("eq,eqi,eqj->eij", wneg, phi, psi),
                               D.shape)
        rhs += scatter_vector(rows, -np.einsum("eq,eqi->ei", wneg * per_element(g, nq), phi), conf.n_nodes)

    fi = ctx.faces.select(ctx.faces.interior)
    if len(fi.weights):
        bn_in = np.einsum("pd,pd->p", spec.advection(fi.points_in), fi.normal)
        bn_out = -np.einsum("pd,pd->p", spec.advection(fi.points_out), fi.normal)
        D = D + _upwind_side(ctx, fi.weights, bn_in, fi.tri_in, fi.cf_in,
                             fi.owner, fi.dg_in, fi.neighbor, fi.dg_out)
        D = D + _upwind_side(ctx, fi.weights, bn_out, fi.tri_out, fi.cf_out,
                             fi.neighbor, fi.dg_out, fi.owner, fi.dg_in)
    return D.tocsr(), rhs


def assemble_advection_faces(spec, ctx, boundary):
    """DG-level upwind matrix ``R^T D`` and inflow data ``R^T d``."""
    D, d = advection_blocks(spec, ctx, boundary)
    R = ctx.recovery.matrix
    return (R.T @ D).tocsr(), R.T @ d

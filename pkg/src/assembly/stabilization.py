"""Jump penalties on the interior skeleton, acting directly on DG functions.

Faces on a subdomain interface are left out: the recovered solution may jump
there and so may the exact one.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse

from .geometry import per_element, scatter_matrix


def _jump_matrix(ctx, fi, weights, jump_in, jump_out):
    """``sum_q w [u][v]`` over the points ``fi``; the jump of basis function k is ``jump_in``/``-jump_out``."""
    dg = ctx.dg
    if len(fi.weights) == 0:
        return sparse.csr_matrix((dg.dim, dg.dim))
    nq = ctx.face_nq
    J = np.concatenate([per_element(jump_in, nq), -per_element(jump_out, nq)], axis=2)
    local = np.einsum("eq,eqi,eqj->eij", per_element(weights, nq), J, J)
    cells = np.concatenate([dg.dofs_of(per_element(fi.owner, nq)[:, 0]),
                            dg.dofs_of(per_element(fi.neighbor, nq)[:, 0])], axis=1)
    return scatter_matrix(cells, cells, local, (dg.dim, dg.dim))


def assemble_stab_ac(ctx, penalty):
    """``sigma_ac int_{Gamma_int} [u][v]``."""
    fi = ctx.skeleton()
    return _jump_matrix(ctx, fi, penalty.sigma_ac * fi.weights, fi.dg_in, fi.dg_out)


def assemble_stab_b(spec, ctx, penalty):
    """``sigma_b1 int [u][v] + sigma_b2 int [h b.grad u][h b.grad v]`` with face-local h."""
    fi = ctx.skeleton()
    S = _jump_matrix(ctx, fi, penalty.sigma_b1 * fi.weights, fi.dg_in, fi.dg_out)
    if len(fi.weights) == 0:
        return S
    h = ctx.face_h[fi.face]
    streamline_in = np.einsum("pd,pjd->pj", spec.advection(fi.points_in), fi.dg_grad_in)
    streamline_out = np.einsum("pd,pjd->pj", spec.advection(fi.points_out), fi.dg_grad_out)
    w = penalty.sigma_b2 * fi.weights * h ** 2
    return S + _jump_matrix(ctx, fi, w, streamline_in, streamline_out)

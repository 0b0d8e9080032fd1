"""Error norms of the recovered method against an exact solution."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from ..assembly import PenaltyConfig, face_penalties
from ..errors import AnalysisError
from ..problem import classify_boundary

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["h", "dofs", "l2", "h1", "bnorm", "streamline", "stab_ac", "stab_b", "nitsche",
               "l2_rec", "h1_rec"]
FULL_COLUMNS = CSV_COLUMNS + ["energy", "triple"]
NORMS = [c for c in FULL_COLUMNS if c not in ("h", "dofs")]


@dataclass(frozen=True)
class ErrorReport:
    l2: float
    h1_broken: float
    b_norm: float
    streamline: float
    stab_ac: float
    stab_b: float
    nitsche_boundary: float
    energy: float
    l2_rec: float
    h1_rec: float
    triple: float
    h_max: float
    dofs: int

    def to_row(self):
        """Flat mapping keyed by the CSV column names."""
        return {
            "h": self.h_max, "dofs": self.dofs, "l2": self.l2, "h1": self.h1_broken,
            "bnorm": self.b_norm, "streamline": self.streamline, "stab_ac": self.stab_ac,
            "stab_b": self.stab_b, "nitsche": self.nitsche_boundary, "l2_rec": self.l2_rec,
            "h1_rec": self.h1_rec, "energy": self.energy, "triple": self.triple,
        }

    def to_dict(self):
        return asdict(self)


def _sqrt(x):
    return float(np.sqrt(max(float(x), 0.0)))


def _dg_values(ctx, u_h, cells, vals, grads):
    local = np.asarray(u_h)[ctx.dg.dofs_of(cells)]
    return np.einsum("pm,pm->p", vals, local), np.einsum("pmd,pm->pd", grads, local)


def _cf_values(ctx, coeffs, tris, vals, grads):
    local = np.asarray(coeffs)[ctx.conf.tri_nodes[tris]]
    return np.einsum("pm,pm->p", vals, local), np.einsum("pmd,pm->pd", grads, local)


def compute_errors(spec, ctx, u_h, boundary=None, penalty=None):
    """Every error component of the final error bound, for DG and recovered solutions.

    ``ctx`` is an AssemblyContext (or anything with ``.context``, such as a
    LinearSystem). DG components use ``u - u_h``, recovered ones ``u - E(u_h)``.
    """
    if not spec.has_exact:
        raise AnalysisError(f"{spec.name} has no exact solution; errors cannot be computed")
    ctx = getattr(ctx, "context", ctx)
    penalty = penalty or PenaltyConfig()
    mesh = ctx.mesh
    boundary = boundary or classify_boundary(mesh, spec, order=ctx.order)
    u_h = np.asarray(u_h, dtype=float)
    ev = ctx.recovery.apply(u_h)

    vol = ctx.volume
    u = spec.exact(vol.points)
    gu = spec.exact_gradient(vol.points)
    uh, guh = _dg_values(ctx, u_h, vol.cell, vol.dg_vals, vol.dg_grads)
    eh, geh = _cf_values(ctx, ev, vol.tri, vol.cf_vals, vol.cf_grads)
    w = vol.weights
    e_dg, ge_dg = u - uh, gu - guh
    e_rec, ge_rec = u - eh, gu - geh

    a = spec.diffusion(vol.points)
    b = spec.advection(vol.points)
    c0 = np.maximum(spec.c0(vol.points), 0.0)
    h_cell = mesh.cell_diameters[vol.cell]
    energy2 = np.sum(w * np.einsum("pd,pde,pe->p", ge_rec, a, ge_rec))
    streamline2 = np.sum(w * h_cell * np.einsum("pd,pd->p", b, ge_dg) ** 2)
    bvol2 = np.sum(w * c0 * e_dg ** 2)

    fp = ctx.faces
    fb = fp.select(~fp.interior)
    ub = spec.exact(fb.points)
    ubh, _ = _dg_values(ctx, u_h, fb.owner, fb.dg_in, fb.dg_grad_in)
    bn = np.abs(np.einsum("pd,pd->p", spec.advection(fb.points_in), fb.normal))
    bbound2 = 0.5 * np.sum(fb.weights * bn * (ub - ubh) ** 2)

    sigma = face_penalties(spec, ctx, boundary, penalty.c_sigma)
    dmask = np.isin(fb.face, list(sigma))
    nitsche2 = 0.0
    if dmask.any():
        fd = fb.select(dmask)
        s = np.array([sigma[int(f)] for f in fd.face])
        rec, _ = _cf_values(ctx, ev, fd.tri_in, fd.cf_in, fd.cf_grad_in)
        nitsche2 = np.sum(fd.weights * s * (spec.exact(fd.points) - rec) ** 2)

    # one-sided traces of u only where it may jump
    cross = ctx.interface_points[:, None]
    trace_in = np.where(cross, fp.points_in, fp.points)
    trace_out = np.where(cross, fp.points_out, fp.points)
    skeleton = fp.interior & ~ctx.interface_points
    jump2 = jump_b2 = bint2 = 0.0
    if fp.interior.any():
        fi = fp.select(fp.interior)
        p_in, p_out = trace_in[fp.interior], trace_out[fp.interior]
        u_in, gu_in = spec.exact(p_in), spec.exact_gradient(p_in)
        u_out, gu_out = spec.exact(p_out), spec.exact_gradient(p_out)
        v_in, gv_in = _dg_values(ctx, u_h, fi.owner, fi.dg_in, fi.dg_grad_in)
        v_out, gv_out = _dg_values(ctx, u_h, fi.neighbor, fi.dg_out, fi.dg_grad_out)
        e_in, e_out = u_in - v_in, u_out - v_out
        b_in, b_out = spec.advection(fi.points_in), spec.advection(fi.points_out)
        penalised = fi.weights * skeleton[fp.interior]
        jump2 = np.sum(penalised * (e_in - e_out) ** 2)
        h_face = ctx.face_h[fi.face]
        sjump = (np.einsum("pd,pd->p", b_in, gu_in - gv_in) - np.einsum("pd,pd->p", b_out, gu_out - gv_out))
        jump_b2 = np.sum(penalised * h_face ** 2 * sjump ** 2)
        # exactly one side sees inflow at each point
        bn_in = np.einsum("pd,pd->p", b_in, fi.normal)
        bn_out = -np.einsum("pd,pd->p", b_out, fi.normal)
        upwind = np.where(bn_in < 0, -bn_in, np.where(bn_out < 0, -bn_out, 0.0))
        bint2 = 0.5 * np.sum(fi.weights * upwind * (e_in - e_out) ** 2)

    stab_ac2 = penalty.sigma_ac * jump2
    stab_b2 = penalty.sigma_b1 * jump2 + penalty.sigma_b2 * jump_b2
    b_norm2 = bvol2 + bbound2 + bint2
    triple2 = energy2 + nitsche2 + b_norm2 + streamline2 + stab_ac2 + stab_b2

    report = ErrorReport(
        l2=_sqrt(np.sum(w * e_dg ** 2)),
        h1_broken=_sqrt(np.sum(w * np.sum(ge_dg ** 2, axis=1))),
        b_norm=_sqrt(b_norm2),
        streamline=_sqrt(streamline2),
        stab_ac=_sqrt(stab_ac2),
        stab_b=_sqrt(stab_b2),
        nitsche_boundary=_sqrt(nitsche2),
        energy=_sqrt(energy2),
        l2_rec=_sqrt(np.sum(w * e_rec ** 2)),
        h1_rec=_sqrt(np.sum(w * np.sum(ge_rec ** 2, axis=1))),
        triple=_sqrt(triple2),
        h_max=mesh.h_max,
        dofs=ctx.dg.dim,
    )
    logger.debug("errors for %s: %s", spec.name, report)
    return report


def streamline_weights(spec, ctx, penalty=None):
    """Per cell ``lambda_T = min(1 / beta_T, 1 / sigma_T) * h_T``.

    ``beta_T`` is the max of ``|b|`` and ``sigma_T = C_sigma alpha_T r^2 / h_T``
    with ``alpha_T`` the max spectral norm of ``a``, both over the volume
    quadrature points of ``T``. Cells with ``b = 0`` and ``a = 0`` give ``inf``.
    """
    ctx = getattr(ctx, "context", ctx)
    penalty = penalty or PenaltyConfig()
    mesh, vol = ctx.mesh, ctx.volume
    n = mesh.n_cells
    beta = np.zeros(n)
    alpha = np.zeros(n)
    np.maximum.at(beta, vol.cell, np.linalg.norm(spec.advection(vol.points), axis=1))
    np.maximum.at(alpha, vol.cell, np.linalg.norm(spec.diffusion(vol.points), ord=2, axis=(1, 2)))
    h = mesh.cell_diameters
    sigma = penalty.c_sigma * alpha * ctx.degree ** 2 / h
    with np.errstate(divide="ignore"):
        lam = np.minimum(1.0 / beta, 1.0 / sigma) * h
    finite = lam[np.isfinite(lam)]
    if len(finite):
        logger.info("streamline weights lambda_T in [%.3e, %.3e]", finite.min(), finite.max())
    return lam


def solution_range(ctx, u_h):
    """Min and max of ``u_h`` and ``E(u_h)`` over the volume quadrature points."""
    ctx = getattr(ctx, "context", ctx)
    vol = ctx.volume
    uh, _ = _dg_values(ctx, u_h, vol.cell, vol.dg_vals, vol.dg_grads)
    eh, _ = _cf_values(ctx, ctx.recovery.apply(u_h), vol.tri, vol.cf_vals, vol.cf_grads)
    return {"min_dg": float(uh.min()), "max_dg": float(uh.max()),
            "min_rec": float(eh.min()), "max_rec": float(eh.max())}

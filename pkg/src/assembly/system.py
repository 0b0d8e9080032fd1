"""Global system ``B(u_h, v_h) = l(v_h)`` over the DG dofs."""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from ..errors import AssemblyError
from ..problem import classify_boundary, verify_positivity
from ..recovery import build_recovery
from ..spaces import build_conforming_space, build_dg_space
from .advection import assemble_advection_faces
from .geometry import assembly_context
from .nitsche import assemble_neumann, assemble_nitsche_dirichlet
from .stabilization import assemble_stab_ac, assemble_stab_b
from .volume import assemble_source, assemble_volume

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PenaltyConfig:
    c_sigma: float = 10.0
    sigma_ac: float = 10.0
    sigma_b1: float = 10.0
    sigma_b2: float = 10.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (isinstance(value, (int, float)) and value > 0):
                raise AssemblyError(f"penalty {name} must be a positive number, got {value!r}")

    def to_dict(self):
        return asdict(self)


@dataclass(eq=False)
class LinearSystem:
    matrix: sparse.csr_matrix
    rhs: np.ndarray
    context: object
    boundary: object
    blocks: dict = field(default_factory=dict)

    @property
    def dg(self):
        return self.context.dg

    @property
    def conf(self):
        return self.context.conf

    @property
    def recovery(self):
        return self.context.recovery

    @property
    def dim(self):
        return self.matrix.shape[0]


def build_spaces(spec, mesh, r):
    """DG space, (possibly partitioned) conforming space and the recovery operator."""
    dg = build_dg_space(mesh, r)
    conf = build_conforming_space(mesh, r, partition=spec.subdomains)
    return dg, conf, build_recovery(dg, conf)


def assemble_system(spec, mesh, r, penalty=None, order=None, spaces=None):
    """Assemble every term of the recovered method into one sparse matrix and rhs.

    ``spaces`` may pass a prebuilt ``(dg, conf, recovery)`` triple.
    """
    penalty = penalty or PenaltyConfig()
    start = time.perf_counter()
    dg, conf, R = spaces or build_spaces(spec, mesh, r)
    ctx = assembly_context(dg, conf, R, order)
    verify_positivity(spec, mesh)
    boundary = classify_boundary(mesh, spec, order=ctx.order)

    volume = assemble_volume(spec, ctx)
    nitsche, nitsche_rhs = assemble_nitsche_dirichlet(spec, ctx, boundary, penalty)
    advection, inflow_rhs = assemble_advection_faces(spec, ctx, boundary)
    stab_ac = assemble_stab_ac(ctx, penalty)
    stab_b = assemble_stab_b(spec, ctx, penalty)
    source = assemble_source(spec, ctx)
    neumann = assemble_neumann(spec, ctx, boundary)

    matrix = (volume + nitsche + advection + stab_ac + stab_b).tocsr()
    rhs = np.asarray(source + nitsche_rhs + inflow_rhs + neumann).ravel()
    if not np.all(np.isfinite(matrix.data)) or not np.all(np.isfinite(rhs)):
        raise AssemblyError(f"{spec.name}: non-finite entries in the assembled system")
    logger.info("assembled %s: %d dofs, %d nonzeros in %.2fs",
                spec.name, matrix.shape[0], matrix.nnz, time.perf_counter() - start)
    return LinearSystem(
        matrix=matrix,
        rhs=rhs,
        context=ctx,
        boundary=boundary,
        blocks={"volume": volume, "nitsche": nitsche, "advection": advection,
                "stab_ac": stab_ac, "stab_b": stab_b},
    )

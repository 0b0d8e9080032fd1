from .quadrature import QuadratureRule, map_segments, map_triangles, quadrature
from .dg import DgSpace, build_dg_space, local_dim, monomial_exponents, scaled_monomials
from .conforming import ConformingSpace, build_conforming_space, lattice_nodes
from .projection import (
    default_order,
    eval_basis,
    eval_conforming_function,
    eval_dg_function,
    l2_project,
    mass_matrices,
    volume_quadrature,
)
from .faces import FaceQuadrature, face_quadrature, face_sizes

from .geometry import AssemblyContext, assembly_context
from .volume import assemble_source, assemble_volume, volume_blocks
from .nitsche import assemble_neumann, assemble_nitsche_dirichlet, face_penalties, nitsche_blocks, penalty_parameter
from .advection import advection_blocks, assemble_advection_faces
from .stabilization import assemble_stab_ac, assemble_stab_b
from .system import LinearSystem, PenaltyConfig, assemble_system, build_spaces

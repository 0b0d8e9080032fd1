from .config import MeshConfig, OutputConfig, RunConfig
from .commands import (
    COMMANDS,
    cmd_mesh,
    cmd_solve,
    cmd_study,
    make_mesh,
    make_problem,
    run_level,
    write_effective_config,
)

from .norms import (
    CSV_COLUMNS,
    FULL_COLUMNS,
    ErrorReport,
    compute_errors,
    solution_range,
    streamline_weights,
)
from .eoc import EXACT, EocTable, eoc
from .vtk import export_vtk

from .spec import (
    ProblemSpec,
    check_diffusion,
    constant_scalar,
    constant_tensor,
    constant_vector,
    verify_positivity,
)
from .boundary import (
    BoundaryClassification,
    BoundaryLabel,
    FlowClassification,
    classify_boundary,
    classify_element_faces_flow,
)
from .examples import builtin_example
from .expressions import compile_expression, problem_from_expressions

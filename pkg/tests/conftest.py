import numpy as np
import pytest

from src.assembly import assembly_context, build_spaces
from src.mesh import build_mesh, generate_voronoi_mesh, structured_quad_mesh
from src.problem import ProblemSpec, constant_scalar, constant_tensor, constant_vector


def unit_square_mesh():
    return build_mesh(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), [[0, 1, 2, 3]])


def two_cell_mesh():
    """Unit square split at x = 1/2 into two rectangles."""
    vertices = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 1.0], [1.0, 1.0]])
    return build_mesh(vertices, [[0, 1, 4, 3], [1, 2, 5, 4]])


def two_squares_mesh():
    """Two unit squares sharing the edge x = 1."""
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]])
    return build_mesh(vertices, [[0, 1, 4, 3], [1, 2, 5, 4]])


def quad_grid_mesh(n, domain=(0.0, 1.0, 0.0, 1.0)):
    vertices, quads = structured_quad_mesh(n, n, domain)
    return build_mesh(vertices, list(quads))


def simple_problem(a=1.0, b=(0.0, 0.0), c=0.0, f=0.0, name="simple"):
    return ProblemSpec(
        name=name,
        diffusion=constant_tensor(a),
        advection=constant_vector(b),
        reaction=constant_scalar(c),
        source=constant_scalar(f),
    )


def polynomial_problem(r):
    """a = I, b = (1 - y, 1 - x), c = 2 with a global degree-r exact solution."""
    def u(p):
        x, y = p[:, 0], p[:, 1]
        return 1 + x ** r + 2 * y ** r + x * y ** (r - 1)

    def grad_u(p):
        x, y = p[:, 0], p[:, 1]
        return np.column_stack([r * x ** (r - 1) + y ** (r - 1),
                                2 * r * y ** (r - 1) + (r - 1) * x * y ** max(r - 2, 0)])

    def laplace_u(p):
        x, y = p[:, 0], p[:, 1]
        if r < 2:
            return np.zeros(len(p))
        return r * (r - 1) * x ** (r - 2) + 2 * r * (r - 1) * y ** (r - 2) \
            + (r - 1) * (r - 2) * x * y ** max(r - 3, 0)

    def b(p):
        return np.column_stack([1 - p[:, 1], 1 - p[:, 0]])

    def f(p):
        return -laplace_u(p) + np.einsum("pd,pd->p", b(p), grad_u(p)) + 2 * u(p)

    return ProblemSpec(
        name=f"polynomial(r={r})",
        diffusion=constant_tensor(1.0),
        advection=b,
        reaction=constant_scalar(2.0),
        source=f,
        dirichlet=u,
        exact=u,
        exact_gradient=grad_u,
    )


def context_for(spec, mesh, r, order=None):
    dg, conf, R = build_spaces(spec, mesh, r)
    return assembly_context(dg, conf, R, order)


@pytest.fixture(scope="session")
def voronoi64():
    return generate_voronoi_mesh(64, seed=1, lloyd_iterations=20)


@pytest.fixture(scope="session")
def voronoi256():
    return generate_voronoi_mesh(256, seed=1, lloyd_iterations=20)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

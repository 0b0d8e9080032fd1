"""Built-in benchmark problems.

1. hyperbolic: a = 0, curved advection, smooth exact solution on (0, 1)^2;
2. elliptic: a = I, rotating advection, u = sin(pi x) sin(pi y);
3. boundary layers: a = eps I, b = (1, 1), f = 1, zero data, no exact solution;
4. mixed type on (-1, 1)^2: hyperbolic below y = 0, degenerate diffusion above,
   with an exact solution that jumps across y = 0.
"""
from __future__ import annotations

import numpy as np

from ..errors import ProblemError
from .spec import ProblemSpec, ZERO, constant_scalar, constant_tensor, constant_vector

PI = np.pi


def _xy(p):
    p = np.atleast_2d(p)
    return p[:, 0], p[:, 1]


def example_hyperbolic():
    def s(p):
        x, y = _xy(p)
        return (1 + x) * (1 + y) ** 2

    def u(p):
        return 1 + np.sin(PI * s(p) / 8)

    def grad_u(p):
        x, y = _xy(p)
        k = np.cos(PI * s(p) / 8) * PI / 8
        return np.column_stack([k * (1 + y) ** 2, k * 2 * (1 + x) * (1 + y)])

    def b(p):
        x, y = _xy(p)
        return np.column_stack([2 - y ** 2, 2 - x])

    def c(p):
        return 1 + s(p)

    def f(p):
        x, y = _xy(p)
        t = PI * s(p) / 8
        transport = PI / 8 * np.cos(t) * ((2 - y ** 2) * (1 + y) ** 2 + 2 * (2 - x) * (1 + x) * (1 + y))
        return transport + (1 + s(p)) * (1 + np.sin(t))

    return ProblemSpec(
        name="example1",
        diffusion=constant_tensor(0.0),
        advection=b,
        reaction=c,
        source=f,
        dirichlet=u,
        div_advection=ZERO,
        exact=u,
        exact_gradient=grad_u,
    )


def example_elliptic():
    def u(p):
        x, y = _xy(p)
        return np.sin(PI * x) * np.sin(PI * y)

    def grad_u(p):
        x, y = _xy(p)
        return PI * np.column_stack([np.cos(PI * x) * np.sin(PI * y), np.sin(PI * x) * np.cos(PI * y)])

    def b(p):
        x, y = _xy(p)
        return np.column_stack([1 - y, 1 - x])

    def f(p):
        x, y = _xy(p)
        sx, cx, sy, cy = np.sin(PI * x), np.cos(PI * x), np.sin(PI * y), np.cos(PI * y)
        return (2 * PI ** 2 + 2) * sx * sy + PI * (1 - y) * cx * sy + PI * (1 - x) * sx * cy

    return ProblemSpec(
        name="example2",
        diffusion=constant_tensor(1.0),
        advection=b,
        reaction=constant_scalar(2.0),
        source=f,
        dirichlet=u,
        div_advection=ZERO,
        exact=u,
        exact_gradient=grad_u,
    )


def example_boundary_layer(epsilon=1e-2):
    if not epsilon > 0:
        raise ProblemError(f"example 3 needs epsilon > 0, got {epsilon}")
    return ProblemSpec(
        name=f"example3(eps={epsilon:g})",
        diffusion=constant_tensor(float(epsilon)),
        advection=constant_vector([1.0, 1.0]),
        reaction=ZERO,
        source=constant_scalar(1.0),
        dirichlet=ZERO,
        div_advection=ZERO,
    )


def example_interface():
    def upper(y):
        return y > 0

    def a(p):
        x, y = _xy(p)
        out = np.zeros((len(x), 2, 2))
        out[:, 1, 1] = np.where(upper(y), x ** 2, 0.0)
        return out

    def u(p):
        x, y = _xy(p)
        decay = np.where(upper(y), x + PI ** 2 * x ** 3 / 12, x)
        return np.sin(PI * (1 + y) / 2) * np.exp(-decay)

    def grad_u(p):
        x, y = _xy(p)
        decay = np.where(upper(y), x + PI ** 2 * x ** 3 / 12, x)
        rate = np.where(upper(y), 1 + PI ** 2 * x ** 2 / 4, 1.0)
        e = np.exp(-decay)
        return np.column_stack([-rate * np.sin(PI * (1 + y) / 2) * e,
                                PI / 2 * np.cos(PI * (1 + y) / 2) * e])

    def subdomains(p):
        _, y = _xy(p)
        return upper(y).astype(int)

    return ProblemSpec(
        name="example4",
        diffusion=a,
        advection=constant_vector([1.0, 0.0]),
        reaction=constant_scalar(1.0),
        source=ZERO,
        dirichlet=u,
        div_advection=ZERO,
        exact=u,
        exact_gradient=grad_u,
        subdomains=subdomains,
        domain=(-1.0, 1.0, -1.0, 1.0),
        mesh_family="aligned",
    )


def builtin_example(example_id, epsilon=1e-2):
    """Return the ProblemSpec of built-in example 1..4 (``epsilon`` is used by example 3)."""
    if example_id == 1:
        return example_hyperbolic()
    if example_id == 2:
        return example_elliptic()
    if example_id == 3:
        return example_boundary_layer(epsilon)
    if example_id == 4:
        return example_interface()
    raise ProblemError(f"unknown example id {example_id!r}; choose 1, 2, 3 or 4")

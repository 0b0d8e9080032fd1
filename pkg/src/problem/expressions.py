"""Coefficient expressions for custom problems.

Grammar: numbers, ``x``, ``y``, ``pi``, ``e``, ``+ - * / **``, parentheses and
the functions ``sin cos exp sqrt abs heaviside sign``. ``heaviside(s)`` is 1
where ``s > 0`` and 0 elsewhere, so piecewise fields read
``heaviside(y) * f1 + heaviside(-y) * f2``.
"""
from __future__ import annotations

import ast
import operator

import numpy as np

from ..errors import ProblemError
from .spec import ProblemSpec, constant_scalar

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "heaviside": lambda s: (np.asarray(s) > 0).astype(float),
    "sign": np.sign,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
KEYS = {"diffusion", "advection", "reaction", "source", "dirichlet", "neumann", "div_advection",
        "exact", "exact_gradient", "neumann_marker", "partition", "domain", "mesh_family"}


def _check(node, text):
    if isinstance(node, ast.Expression):
        return _check(node.body, text)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return
    if isinstance(node, ast.Name):
        if node.id in ("x", "y") or node.id in CONSTANTS:
            return
        raise ProblemError(f"unknown name {node.id!r} in expression {text!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in BINARY:
        _check(node.left, text)
        _check(node.right, text)
        return
    if isinstance(node, ast.UnaryOp) and type(node.op) in UNARY:
        _check(node.operand, text)
        return
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in FUNCTIONS and len(node.args) == 1 and not node.keywords:
        _check(node.args[0], text)
        return
    raise ProblemError(f"unsupported syntax {type(node).__name__} in expression {text!r}")


def _eval(node, x, y):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id == "x":
            return x
        if node.id == "y":
            return y
        return CONSTANTS[node.id]
    if isinstance(node, ast.BinOp):
        return BINARY[type(node.op)](_eval(node.left, x, y), _eval(node.right, x, y))
    if isinstance(node, ast.UnaryOp):
        return UNARY[type(node.op)](_eval(node.operand, x, y))
    return FUNCTIONS[node.func.id](_eval(node.args[0], x, y))


def compile_expression(text):
    """Compile ``text`` into a callable mapping ``(n, 2)`` points to ``(n,)`` values."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return constant_scalar(text)
    if not isinstance(text, str):
        raise ProblemError(f"expression must be a string or a number, got {text!r}")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ProblemError(f"cannot parse expression {text!r}: {e.msg}") from e
    _check(tree, text)
    body = tree.body

    def field(points):
        points = np.atleast_2d(points)
        with np.errstate(all="ignore"):
            out = _eval(body, points[:, 0], points[:, 1])
        return np.broadcast_to(np.asarray(out, dtype=float), (len(points),)).copy()

    field.expression = text
    return field


def _tensor(entry):
    if isinstance(entry, (str, int, float)):
        s = compile_expression(entry)
        return lambda p: s(p)[:, None, None] * np.eye(2)[None]
    try:
        rows = [[compile_expression(v) for v in row] for row in entry]
    except TypeError as e:
        raise ProblemError("diffusion must be an expression or a 2x2 list of expressions") from e
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ProblemError("diffusion must be an expression or a 2x2 list of expressions")
    return lambda p: np.stack([np.stack([f(p) for f in r], axis=-1) for r in rows], axis=-2)


def _vector(entry, what):
    if not isinstance(entry, (list, tuple)) or len(entry) != 2:
        raise ProblemError(f"{what} must be a list of two expressions")
    fs = [compile_expression(v) for v in entry]
    return lambda p: np.column_stack([f(p) for f in fs])


def numerical_divergence(vector_field, step=1e-6):
    """Central-difference divergence, used when no closed form is supplied."""
    def div(points):
        points = np.atleast_2d(points)
        out = np.zeros(len(points))
        for k in range(2):
            d = np.zeros(2)
            d[k] = step
            out += (vector_field(points + d)[:, k] - vector_field(points - d)[:, k]) / (2 * step)
        return out
    return div


def _positive(text):
    g = compile_expression(text)
    return lambda p: g(p) > 0


def _neumann(text):
    g = compile_expression(text)
    return lambda p, normals: g(p)


def problem_from_expressions(cfg, name="custom"):
    """Build a ProblemSpec from a mapping of expression strings.

    Keys: ``diffusion`` (scalar or 2x2), ``advection`` (2), ``reaction``,
    ``source``, ``dirichlet``, optional ``neumann`` (in terms of x, y only),
    ``div_advection``, ``exact``, ``exact_gradient`` (2), ``neumann_marker``
    (faces where the expression is positive), ``partition`` (subdomain 1 where
    positive) and ``domain``.
    """
    cfg = dict(cfg)
    unknown = sorted(set(cfg) - KEYS)
    if unknown:
        raise ProblemError(f"unknown custom problem keys: {', '.join(unknown)}")
    exact = cfg.get("exact")
    exact_gradient = cfg.get("exact_gradient")
    if (exact is None) != (exact_gradient is None):
        raise ProblemError("exact and exact_gradient must be given together")
    domain = tuple(float(v) for v in cfg.get("domain", (0.0, 1.0, 0.0, 1.0)))
    if len(domain) != 4:
        raise ProblemError("domain must be [xmin, xmax, ymin, ymax]")
    advection = _vector(cfg.get("advection", [0, 0]), "advection")
    div_b = cfg.get("div_advection")
    partition = cfg.get("partition")
    return ProblemSpec(
        name=name,
        diffusion=_tensor(cfg.get("diffusion", 0)),
        advection=advection,
        reaction=compile_expression(cfg.get("reaction", 0)),
        source=compile_expression(cfg.get("source", 0)),
        dirichlet=compile_expression(cfg.get("dirichlet", 0)),
        div_advection=numerical_divergence(advection) if div_b is None else compile_expression(div_b),
        neumann=None if cfg.get("neumann") is None else _neumann(cfg["neumann"]),
        exact=None if exact is None else compile_expression(exact),
        exact_gradient=None if exact_gradient is None else _vector(exact_gradient, "exact_gradient"),
        neumann_marker=None if cfg.get("neumann_marker") is None else _positive(cfg["neumann_marker"]),
        subdomains=None if partition is None else _subdomain(partition),
        domain=domain,
        mesh_family=cfg.get("mesh_family", "voronoi"),
    )


def _subdomain(text):
    positive = _positive(text)
    return lambda p: positive(p).astype(int)

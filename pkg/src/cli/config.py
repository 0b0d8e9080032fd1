"""Run configuration: dataclasses with defaults, validation and dotted-path errors."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from ..assembly import PenaltyConfig
from ..errors import AssemblyError, ConfigError, SolverError
from ..solver import SolverConfig

MESH_KINDS = ("voronoi", "aligned", "file")
ALIGNED_STYLES = ("squares", "voronoi")
MAX_DEGREE = 4


@dataclass(frozen=True)
class MeshConfig:
    # None follows the problem's preferred mesh family
    kind: str | None = None
    n_cells: int = 64
    seed: int = 1
    lloyd: int = 50
    path: str | None = None
    n: int = 8
    style: str = "squares"


@dataclass(frozen=True)
class OutputConfig:
    vtk: bool = False
    report: bool = True


@dataclass(frozen=True)
class RunConfig:
    problem: dict = field(default_factory=lambda: {"example": 2})
    degree: int = 1
    allow_high_degree: bool = False
    mesh: MeshConfig = field(default_factory=MeshConfig)
    levels: int = 1
    quadrature_order: int | None = None
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def from_dict(cls, cfg):
        """Fill defaults and validate; every failure names its dotted field path."""
        if not isinstance(cfg, dict):
            raise ConfigError("configuration must be an object")
        _reject_unknown(cfg, cls, "")
        problem = _problem(cfg.get("problem", {"example": 2}))
        degree = _integer(cfg.get("degree", 1), "degree")
        allow_high = _boolean(cfg.get("allow_high_degree", False), "allow_high_degree")
        if degree < 1:
            raise ConfigError(f"must be >= 1, got {degree}", "degree")
        if degree > MAX_DEGREE and not allow_high:
            raise ConfigError(f"degrees above {MAX_DEGREE} need allow_high_degree=true", "degree")
        levels = _integer(cfg.get("levels", 1), "levels")
        if levels < 1:
            raise ConfigError(f"must be >= 1, got {levels}", "levels")
        order = cfg.get("quadrature_order")
        if order is not None:
            order = _integer(order, "quadrature_order")
            if order < 2 * degree:
                raise ConfigError(f"must be at least 2 * degree = {2 * degree}", "quadrature_order")

        mesh = _section(cfg, "mesh", MeshConfig)
        _check_mesh(mesh, levels)
        try:
            penalty = _section(cfg, "penalty", PenaltyConfig)
        except AssemblyError as e:
            raise ConfigError(str(e), "penalty") from e
        try:
            solver = _section(cfg, "solver", SolverConfig)
        except SolverError as e:
            raise ConfigError(str(e), "solver") from e
        output = _section(cfg, "output", OutputConfig)
        for f in fields(OutputConfig):
            _boolean(getattr(output, f.name), f"output.{f.name}")
        return cls(problem=problem, degree=degree, allow_high_degree=allow_high, mesh=mesh,
                   levels=levels, quadrature_order=order, penalty=penalty, solver=solver,
                   output=output)

    def to_dict(self):
        return asdict(self)


def _reject_unknown(cfg, cls, prefix):
    known = {f.name for f in fields(cls)}
    for key in cfg:
        if key not in known:
            raise ConfigError("unknown field", prefix + key)


def _section(cfg, name, cls):
    raw = cfg.get(name, {})
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("must be an object", name)
    _reject_unknown(raw, cls, name + ".")
    kwargs = {}
    for f in fields(cls):
        if f.name not in raw:
            continue
        value = raw[f.name]
        if f.type in ("int", "int | None") and value is not None:
            value = _integer(value, f"{name}.{f.name}")
        elif f.type == "float":
            value = _number(value, f"{name}.{f.name}")
        kwargs[f.name] = value
    return cls(**kwargs)


def _integer(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", path)
    return int(value)


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    return float(value)


def _boolean(value, path):
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", path)
    return value


def _problem(raw):
    if not isinstance(raw, dict):
        raise ConfigError("must be an object", "problem")
    has_example = "example" in raw
    has_custom = "custom" in raw
    if has_example == has_custom:
        raise ConfigError("give exactly one of 'example' or 'custom'", "problem")
    if has_example:
        extra = set(raw) - {"example", "epsilon"}
        if extra:
            raise ConfigError("unknown field", "problem." + sorted(extra)[0])
        example = _integer(raw["example"], "problem.example")
        if example not in (1, 2, 3, 4):
            raise ConfigError(f"unknown example {example}; choose 1, 2, 3 or 4", "problem.example")
        epsilon = _number(raw.get("epsilon", 1e-2), "problem.epsilon")
        if epsilon <= 0:
            raise ConfigError("must be positive", "problem.epsilon")
        return {"example": example, "epsilon": epsilon}
    extra = set(raw) - {"custom", "name"}
    if extra:
        raise ConfigError("unknown field", "problem." + sorted(extra)[0])
    if not isinstance(raw["custom"], dict):
        raise ConfigError("must be an object of expressions", "problem.custom")
    return {"custom": dict(raw["custom"]), "name": str(raw.get("name", "custom"))}


def _check_mesh(mesh, levels):
    if mesh.kind is not None and mesh.kind not in MESH_KINDS:
        raise ConfigError(f"unknown mesh kind {mesh.kind!r}; choose one of {MESH_KINDS}", "mesh.kind")
    if mesh.n_cells < 1:
        raise ConfigError(f"must be >= 1, got {mesh.n_cells}", "mesh.n_cells")
    if mesh.lloyd < 0:
        raise ConfigError("must be non-negative", "mesh.lloyd")
    if mesh.n < 2 or mesh.n % 2:
        raise ConfigError(f"must be an even integer >= 2, got {mesh.n}", "mesh.n")
    if mesh.style not in ALIGNED_STYLES:
        raise ConfigError(f"unknown style {mesh.style!r}; choose one of {ALIGNED_STYLES}", "mesh.style")
    if mesh.kind == "file":
        if not mesh.path:
            raise ConfigError("a mesh file path is required for kind 'file'", "mesh.path")
        if levels > 1:
            raise ConfigError("file meshes cannot be refined; use levels = 1", "levels")

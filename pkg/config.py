"""
Run configuration - Pydantic BaseSettings with four validated blocks.

Values come from, highest priority first: explicit CLI overrides, a
``key = value`` config file grouped by ``[block]`` headers, environment
variables (``CRITNLS_GRID__M=8000``; also read from ``.env``) and the field
defaults below.

Usage:
    from config import load_config

    cfg = load_config("model.cfg", overrides={"solver": {"seed": 7}})
    params, grid = cfg.problem(), cfg.radial_grid()
"""
import configparser
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from errors import ConfigError
from grids import MAX_TENSOR_NODES, MIN_RADIAL_NODES, RadialGrid, make_radial_grid
from problem import PotentialPair, ProblemParams, model_potentials, validate_params
from solve import SolverOpts
from utils import config_digest

BLOCKS = ("params", "grid", "solver", "output")


class ParamsBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: int = 3
    a: float = 1.0
    b: float = 1.0
    s: float = 0.5
    mu: float = 1.0

    @model_validator(mode="after")
    def admissible(self):
        """Fail fast on inadmissible (N, a, b, s, mu); raises ParamError."""
        validate_params(self.N, self.a, self.b, self.s, self.mu)
        return self


class GridBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r_min: float = Field(1e-3, gt=0)
    r_max: float = Field(40.0, gt=0)
    M: int = Field(4000, ge=MIN_RADIAL_NODES)
    spacing: Literal["uniform", "graded"] = "uniform"
    tensor_n: int = Field(64, ge=4, le=MAX_TENSOR_NODES)
    tensor_L: float = Field(8.0, gt=0)
    scaling_n: int = Field(128, ge=4, le=MAX_TENSOR_NODES)
    scaling_L: float = Field(10.0, gt=0)

    @model_validator(mode="after")
    def ordered(self):
        if self.r_max <= self.r_min:
            raise ValueError(f"r_max={self.r_max} must exceed r_min={self.r_min}")
        for name in ("tensor_n", "scaling_n"):
            if getattr(self, name) % 2:
                raise ValueError(f"{name}={getattr(self, name)} must be even")
        return self


class SolverBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_iters: int = Field(5000, ge=1)
    tol: float = Field(1e-8, gt=0)
    path_nodes: int = Field(40, ge=2)
    path_tol: float = Field(1e-6, gt=0)
    seed: int = Field(0x5EED, ge=0, lt=2 ** 64)

    @field_validator("seed", mode="before")
    @classmethod
    def parse_seed(cls, v):
        """Accept decimal or 0x-prefixed seeds."""
        if isinstance(v, str):
            try:
                return int(v.strip(), 0)
            except ValueError:
                raise ValueError(f"seed {v!r} is not an unsigned integer")
        return v


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: Path = Path("results")
    precision: int = Field(12, ge=1, le=17)

    @field_validator("directory", mode="before")
    @classmethod
    def expand_path(cls, v):
        return Path(v).expanduser()


class RunConfig(BaseSettings):
    """Validated configuration for one CLI invocation."""

    model_config = SettingsConfigDict(
        env_prefix="CRITNLS_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    params: ParamsBlock = Field(default_factory=ParamsBlock)
    grid: GridBlock = Field(default_factory=GridBlock)
    solver: SolverBlock = Field(default_factory=SolverBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)

    def problem(self) -> ProblemParams:
        p = self.params
        return validate_params(p.N, p.a, p.b, p.s, p.mu)

    def potentials(self) -> PotentialPair:
        return model_potentials(self.problem())

    def radial_grid(self) -> RadialGrid:
        g = self.grid
        return make_radial_grid(self.params.N, g.r_min, g.r_max, g.M, g.spacing)

    def solver_opts(self) -> SolverOpts:
        s = self.solver
        return SolverOpts(max_iters=s.max_iters, tol=s.tol, path_nodes=s.path_nodes,
                          path_tol=s.path_tol, seed=s.seed)

    def digest(self) -> str:
        return config_digest(self.model_dump(mode="json"))


def read_config_file(path) -> Dict[str, Dict[str, str]]:
    """Parse ``[block]`` / ``key = value`` text; unknown blocks are rejected."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    # Keys are case sensitive (N vs n)
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from e
    unknown = [s for s in parser.sections() if s not in BLOCKS]
    if unknown:
        raise ConfigError(f"{path}: unknown block [{unknown[0]}]", anchor="blocks: " + ", ".join(BLOCKS))
    return {section: dict(parser.items(section)) for section in parser.sections()}


def _merge(base: Dict[str, Any], extra: Mapping[str, Mapping[str, Any]]) -> Dict[str, Any]:
    merged = {k: dict(v) for k, v in base.items()}
    for block, values in extra.items():
        if block not in BLOCKS:
            raise ConfigError(f"unknown block [{block}]", anchor="blocks: " + ", ".join(BLOCKS))
        present = {k: v for k, v in values.items() if v is not None}
        if present:
            merged.setdefault(block, {}).update(present)
    return merged


def load_config(path=None, overrides: Optional[Mapping[str, Mapping[str, Any]]] = None) -> RunConfig:
    """
    Build a RunConfig from an optional file plus CLI overrides.

    Raises ConfigError for unreadable files, ParamError for inadmissible
    parameters and pydantic.ValidationError for malformed values.
    """
    data = read_config_file(path) if path is not None else {}
    data = _merge(data, overrides or {})
    return RunConfig(**data)

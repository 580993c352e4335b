"""Run configuration: INI files parsed fail-closed.

Sections and keys are validated against a fixed schema; anything
unrecognized raises ``ConfigError`` naming the offender, as do type
errors.  Every key has a default, so an empty or absent file is a valid
configuration; the seed defaults to 0.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields

from .approx.basis import Gaussian, InverseMultiquadric, Multiquadric, Polyharmonic
from .approx.engines import RbfFd, WeightedLeastSquares
from .approx.weights import ConstantWeight, GaussianWeight
from .errors import ConfigError
from .solve import SolverConfig


@dataclass
class DomainSection:
    dim: int = 2
    h: float = 0.0  # 0 picks a per-command default
    resolutions: tuple = (10, 20, 40, 80, 160)
    h_values: tuple = ()


@dataclass
class EngineSection:
    kind: str = ""  # empty means "per-command default"
    rbf: str = "polyharmonic"
    exponent: int = 3
    sigma: float = 1.0
    degree: int = 2
    scale: str = "nearest"
    solver: str = "qr"
    stencil: int = 0  # 0 means per-command default
    weight: str = "constant"
    weight_sigma: float = 1.0


@dataclass
class StepperSection:
    dt: float = 0.0  # 0 picks a stable step from the spacing
    steps: int = 500
    diffusivity: float = 1.0


@dataclass
class BenchSection:
    repetitions: int = 1


@dataclass
class RunConfig:
    seed: int = 0
    domain: DomainSection = field(default_factory=DomainSection)
    engine: EngineSection = field(default_factory=EngineSection)
    solver: SolverConfig = field(default_factory=SolverConfig)
    stepper: StepperSection = field(default_factory=StepperSection)
    bench: BenchSection = field(default_factory=BenchSection)

    def as_dict(self) -> dict:
        out = {"seed": self.seed}
        for name in ("domain", "engine", "solver", "stepper", "bench"):
            section = getattr(self, name)
            out[name] = {f.name: _plain(getattr(section, f.name)) for f in fields(section)}
        return out


def _plain(v):
    if isinstance(v, tuple):
        return list(v)
    return v


def _parse_value(section, key, raw, current):
    try:
        if isinstance(current, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        if isinstance(current, tuple):
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            caster = int if key == "resolutions" else float
            return tuple(caster(p) for p in parts)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from exc


def read_run_config(path: str | None) -> RunConfig:
    """Load a RunConfig; ``None`` yields all defaults."""
    cfg = RunConfig()
    if path is None:
        return cfg
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    targets = {
        "run": cfg,
        "domain": cfg.domain,
        "engine": cfg.engine,
        "solver": cfg.solver,
        "stepper": cfg.stepper,
        "bench": cfg.bench,
    }
    allowed = {
        name: {f.name for f in fields(obj)} if name != "run" else {"seed"}
        for name, obj in targets.items()
    }

    for section in parser.sections():
        if section not in targets:
            raise ConfigError(f"unknown config section [{section}]")
        obj = targets[section]
        for key, raw in parser.items(section):
            if key not in allowed[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            setattr(obj, key, _parse_value(section, key, raw, getattr(obj, key)))

    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    d = cfg.domain
    if d.dim not in (1, 2, 3):
        raise ConfigError(f"[domain] dim must be 1, 2 or 3, got {d.dim}")
    if d.h < 0:
        raise ConfigError(f"[domain] h must be positive, got {d.h}")
    if any(r < 2 for r in d.resolutions):
        raise ConfigError("[domain] resolutions must all be at least 2")
    if any(h <= 0 for h in d.h_values):
        raise ConfigError("[domain] h_values must be positive")
    e = cfg.engine
    if e.kind not in ("", "rbffd", "wls"):
        raise ConfigError(f"[engine] kind must be rbffd or wls, got {e.kind!r}")
    if e.rbf not in ("polyharmonic", "gaussian", "multiquadric", "imq"):
        raise ConfigError(f"[engine] unknown rbf {e.rbf!r}")
    if e.scale not in ("none", "nearest", "support"):
        raise ConfigError(f"[engine] unknown scale {e.scale!r}")
    if e.solver not in ("lu", "qr", "svd"):
        raise ConfigError(f"[engine] unknown solver {e.solver!r}")
    if e.weight not in ("constant", "gaussian"):
        raise ConfigError(f"[engine] unknown weight {e.weight!r}")
    if e.stencil < 0:
        raise ConfigError("[engine] stencil must be non-negative")
    cfg.solver.validate()
    s = cfg.stepper
    if s.dt < 0 or s.steps < 0 or s.diffusivity <= 0:
        raise ConfigError("[stepper] dt and steps must be non-negative, diffusivity positive")
    if cfg.bench.repetitions < 1:
        raise ConfigError("[bench] repetitions must be at least 1")


def make_engine(cfg: RunConfig, *, default_kind: str, default_stencil: int,
                default_solver: str | None = None):
    """Build the weight engine described by [engine], filling in
    per-command defaults for unset fields.  Returns (engine, stencil)."""
    e = cfg.engine
    kind = e.kind or default_kind
    stencil = e.stencil or default_stencil
    solver = e.solver
    if default_solver is not None and e.kind == "" and e.solver == "qr":
        solver = default_solver
    if kind == "rbffd":
        if e.rbf == "polyharmonic":
            rbf = Polyharmonic(e.exponent)
        elif e.rbf == "gaussian":
            rbf = Gaussian(e.sigma)
        elif e.rbf == "multiquadric":
            rbf = Multiquadric(e.sigma)
        else:
            rbf = InverseMultiquadric(e.sigma)
        return RbfFd(rbf, degree=e.degree, scale=e.scale, solver=solver), stencil
    weight = ConstantWeight() if e.weight == "constant" else GaussianWeight(e.weight_sigma)
    return (
        WeightedLeastSquares(e.degree, weight=weight, scale=e.scale, solver=solver),
        stencil,
    )

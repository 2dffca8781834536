"""Scenario configuration files.

Plain ``key = value`` lines grouped in ``[sections]``.  Every key maps onto
one field of :class:`ScenarioConfig`; unknown sections or keys are errors.

Example::

    [physics]
    kappa = 1.0
    V = 4.0

    [scenario]
    mode = packet
    K = 0.3
    Delta = 0.1
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

from .dispersion import DomainError, PhysicalParams, in_klein_window


class ConfigError(ValueError):
    """The configuration is malformed or violates a precondition."""


def _floats(text: str) -> tuple[float, ...]:
    parts = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(float(t) for t in parts)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str) -> float | None:
    t = text.strip().lower()
    return None if t in ("", "auto", "none") else float(t)


# section -> key -> (field name, parser)
_SCHEMA = {
    "physics": {"kappa": ("kappa", float), "V": ("V", float)},
    "scenario": {
        "mode": ("mode", str),
        "k": ("k", float),
        "tau": ("tau", float),
        "K": ("K", float),
        "Delta": ("Delta", float),
    },
    "window": {
        "t_min": ("t_min", float), "t_max": ("t_max", float),
        "x_min": ("x_min", float), "x_max": ("x_max", float),
    },
    "trajectories": {
        "n_trajectories": ("n_trajectories", int),
        "coverage": ("coverage", _opt_float),
        "start_tau": ("start_tau", _opt_float),
    },
    "quadrature": {
        "order": ("quad_order", int),
        "tol": ("quad_tol", float),
        "max_order": ("quad_max_order", int),
    },
    "integrator": {
        "rel_tol": ("rel_tol", float),
        "abs_tol": ("abs_tol", float),
        "max_step": ("max_step", float),
        "density_floor_rel": ("density_floor_rel", float),
        "max_steps": ("max_steps", int),
    },
    "output": {
        "prefix": ("prefix", str),
        "density_taus": ("density_taus", _floats),
        "density_points": ("density_points", int),
        "localization_taus": ("localization_taus", _floats),
        "v1": ("v1", _opt_float),
        "v2": ("v2", _opt_float),
        "svg": ("svg", _bool),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str = "packet"
    kappa: float = 1.0
    V: float = 4.0
    k: float | None = None
    tau: float = 0.0
    K: float | None = None
    Delta: float | None = None
    t_min: float = -180.0
    t_max: float = 200.0
    x_min: float = -100.0
    x_max: float = 300.0
    n_trajectories: int = 16
    coverage: float | None = None
    start_tau: float | None = None
    quad_order: int = 256
    quad_tol: float = 1e-10
    quad_max_order: int = 16384
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = math.inf
    density_floor_rel: float = 1e-10
    max_steps: int = 200_000
    prefix: str = ""
    density_taus: tuple[float, ...] = ()
    density_points: int = 801
    localization_taus: tuple[float, ...] = ()
    v1: float | None = None
    v2: float | None = None
    svg: bool = True
    source: str = field(default="", compare=False)

    def __post_init__(self):
        try:
            self._validate()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def _validate(self):
        if self.mode not in ("plane", "packet"):
            raise ConfigError(f"mode must be 'plane' or 'packet', got {self.mode!r}")
        if not (self.t_min < self.t_max and self.x_min < self.x_max):
            raise ConfigError("window must be nonempty: need t_min < t_max and x_min < x_max")
        p = self.params
        if not p.klein:
            raise ConfigError(f"Klein regime needs V > 2 kappa, got V={self.V}, kappa={self.kappa}")
        if self.mode == "plane":
            if self.k is None:
                raise ConfigError("plane mode needs [scenario] k")
            if not in_klein_window(self.k, p):
                raise ConfigError(f"k={self.k} outside the Klein window (0, {p.k_max:.17g})")
        else:
            if self.K is None or self.Delta is None:
                raise ConfigError("packet mode needs [scenario] K and Delta")
            if not self.Delta > 0:
                raise ConfigError(f"Delta must be positive, got {self.Delta}")
            lo, hi = self.K - 2 * self.Delta, self.K + 2 * self.Delta
            if not (in_klein_window(lo, p) and in_klein_window(hi, p)):
                raise ConfigError(
                    f"support [{lo}, {hi}] must lie in the Klein window (0, {p.k_max:.17g})")
        if self.n_trajectories < 0:
            raise ConfigError("n_trajectories must be >= 0")
        if self.coverage is not None and not 0 < self.coverage < 1:
            raise ConfigError("coverage must lie in (0, 1)")
        if self.start_tau is not None and not self.t_min <= self.start_tau <= self.t_max:
            raise ConfigError("start_tau must lie inside the time window")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("integrator tolerances must be positive")
        if not (self.max_step > 0 and self.max_steps > 0 and self.density_floor_rel >= 0):
            raise ConfigError("max_step, max_steps must be positive; density_floor_rel >= 0")
        if not (self.quad_order >= 2 and self.quad_max_order >= self.quad_order and self.quad_tol > 0):
            raise ConfigError("need 2 <= order <= max_order and tol > 0")
        if self.density_points < 2:
            raise ConfigError("density_points must be >= 2")
        if (self.v1 is None) != (self.v2 is None):
            raise ConfigError("give both v1 and v2 or neither")

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(self.kappa, self.V)

    @property
    def effective_coverage(self) -> float:
        """Explicit coverage, or ``(n-1)/(n+1)`` so the starts sit at quantiles ``i/(n+1)``."""
        if self.coverage is not None:
            return self.coverage
        n = max(self.n_trajectories, 1)
        return (n - 1) / (n + 1) if n > 1 else 0.5

    @property
    def effective_start_tau(self) -> float:
        return self.t_min if self.start_tau is None else self.start_tau

    def canonical(self) -> str:
        """Resolved settings as sorted ``key=value`` lines (digest input)."""
        lines = []
        for f in dataclasses.fields(self):
            if f.name == "source":
                continue
            v = getattr(self, f.name)
            if isinstance(v, float):
                v = format(v, ".17g")
            elif isinstance(v, tuple):
                v = ",".join(format(x, ".17g") for x in v)
            lines.append(f"{f.name}={v}")
        return "\n".join(sorted(lines)) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case sensitive (K vs k)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        keys = _SCHEMA[section]
        for key, raw in cp.items(section):
            if key not in keys:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            name, conv = keys[key]
            try:
                values[name] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {section}.{key}: {raw!r}") from exc
    return ScenarioConfig(source=source, **values)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))

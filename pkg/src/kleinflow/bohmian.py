"""Bohmian trajectories: integral curves of ``dx1/dx0 = j1/j0``.

Any object with a ``current_at(x0, x1) -> (j0, j1)`` method can serve as a
field.  Packets, single step modes and constant test fields are wrapped
below; :class:`GridVelocityField` is an optional interpolated stand-in for
expensive packet fields.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .integrate import Solution, StepControl, dopri5, hermite
from .norms import auto_window
from .packets import Packet
from .spinor import SpacetimePoint
from .step_modes import StepMode, current_step_arrays


class TrajectoryStatus(str, enum.Enum):
    COMPLETED = "completed"
    ABORTED_LOW_DENSITY = "aborted_low_density"
    ABORTED_STEP_LIMIT = "aborted_step_limit"


class InvalidStart(ValueError):
    """Density at the requested start point is at or below the floor."""


# -- fields ------------------------------------------------------------------

class PacketField:
    """Current of a discretized packet."""

    def __init__(self, packet: Packet):
        self.packet = packet
        self.k_max = max(abs(b.p(np.array([b.lo, b.hi]))).max() for b in packet.branches())
        self.metadata = {"field": "packet", "order": packet.order}

    def current_at(self, x0, x1):
        return self.packet.current_at(x0, x1)

    def peak_density(self, tau: float) -> float:
        return auto_window(self.packet, tau)[3]


class StepModeField:
    """Closed-form current of a single incoming step mode."""

    def __init__(self, mode: StepMode):
        self.mode = mode
        self.k_max = max(mode.k, mode.q)
        self.metadata = {"field": "step_mode", "k": mode.k}

    def current_at(self, x0, x1):
        j0, j1 = current_step_arrays(self.mode, x0, x1)
        return float(j0), float(j1)

    def peak_density(self, tau: float) -> float:
        m = self.mode
        return (m.t * m.t * m.omega_q + 4.0 * m.params.kappa * abs(m.r)) / math.pi


class ConstantVelocityField:
    def __init__(self, velocity: float):
        if not abs(velocity) < 1:
            raise ValueError("velocity must be subluminal")
        self.velocity = velocity
        self.k_max = None
        self.metadata = {"field": "constant", "velocity": velocity}

    def current_at(self, x0, x1):
        return 1.0, self.velocity

    def peak_density(self, tau: float) -> float:
        return 1.0


class GridVelocityField:
    """Bicubic interpolation of ``j0`` and ``j1`` sampled on a regular grid."""

    def __init__(self, source, x0_range, x1_range, n0: int = 400, n1: int = 800):
        self.x0 = np.linspace(*x0_range, n0)
        self.x1 = np.linspace(*x1_range, n1)
        T, X = np.meshgrid(self.x0, self.x1, indexing="ij")
        if isinstance(source, Packet):
            j0, j1 = source.current(T, X)
        else:
            j0 = np.empty_like(T)
            j1 = np.empty_like(T)
            for idx in np.ndindex(T.shape):
                j0[idx], j1[idx] = source.current_at(T[idx], X[idx])
        self._j0 = RectBivariateSpline(self.x0, self.x1, j0, kx=3, ky=3)
        self._j1 = RectBivariateSpline(self.x0, self.x1, j1, kx=3, ky=3)
        self.k_max = getattr(source, "k_max", None)
        self.metadata = {
            "field": "grid_bicubic",
            "dx0": float(self.x0[1] - self.x0[0]),
            "dx1": float(self.x1[1] - self.x1[0]),
        }
        self._peak = float(j0.max())

    def current_at(self, x0, x1):
        return float(self._j0(x0, x1)[0, 0]), float(self._j1(x0, x1)[0, 0])

    def peak_density(self, tau: float) -> float:
        return self._peak


# -- trajectories ------------------------------------------------------------

@dataclass
class IntegratorConfig:
    t_span: tuple[float, float]
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = math.inf
    density_floor: float | None = None
    density_floor_rel: float = 1e-10
    x_bounds: tuple[float, float] | None = None
    max_steps: int = 200_000
    step_cap: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.t_span[0] < self.t_span[1]:
            raise ValueError(f"need t_start < t_end, got {self.t_span}")


@dataclass
class Trajectory:
    x0: np.ndarray
    x1: np.ndarray
    velocity: np.ndarray
    start: SpacetimePoint
    status: TrajectoryStatus
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    max_error_estimate: float = 0.0
    error_estimate: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def samples(self):
        return list(zip(self.x0.tolist(), self.x1.tolist()))

    @property
    def stats(self) -> dict:
        return {"steps": self.steps, "max_error_estimate": self.max_error_estimate,
                "error_estimate": self.error_estimate, "rejected": self.rejected,
                "evaluations": self.evaluations}

    def position(self, t):
        """Dense-output position at time(s) ``t`` within the sampled span."""
        return hermite(self.x0, self.x1, self.velocity, t)

    def late_velocity(self, fraction: float = 0.2) -> float:
        """Mean velocity over the final ``fraction`` of the time span."""
        t1 = self.x0[-1]
        ta = t1 - fraction * (t1 - self.x0[0])
        return float((self.x1[-1] - self.position(ta)) / (t1 - ta))

    def early_velocity(self, fraction: float = 0.2) -> float:
        """Mean velocity over the first ``fraction`` of the time span."""
        t0 = self.x0[0]
        tb = t0 + fraction * (self.x0[-1] - t0)
        return float((self.position(tb) - self.x1[0]) / (tb - t0))

    @property
    def transmitted(self) -> bool:
        """Ends on the potential side ``x1 >= 0``."""
        return bool(self.x1[-1] >= 0)

    @property
    def max_speed(self) -> float:
        return float(np.max(np.abs(self.velocity)))


def _step_cap_fn(field_, cfg: IntegratorConfig):
    cap = cfg.step_cap
    if cap is None and getattr(field_, "k_max", None):
        cap = 0.1 / field_.k_max
    if cap is None:
        return None

    def local_cap(t, x):
        # approach x1 = 0 geometrically; |v| < 1 keeps the step from jumping over it
        return max(cap, 0.5 * abs(x))

    return local_cap


def resolve_floor(field_, cfg: IntegratorConfig, tau: float) -> float:
    if cfg.density_floor is not None:
        return cfg.density_floor
    return cfg.density_floor_rel * field_.peak_density(tau)


def integrate_trajectory(field_, start: SpacetimePoint, cfg: IntegratorConfig,
                         floor: float | None = None) -> Trajectory:
    """Trajectory through ``start``, integrated forward and backward over ``t_span``."""
    start = SpacetimePoint(float(start[0]), float(start[1]))
    if floor is None:
        floor = resolve_floor(field_, cfg, start.x0)
    j0, _ = field_.current_at(start.x0, start.x1)
    if not j0 > floor:
        raise InvalidStart(f"density {j0:.3e} at {start} is not above floor {floor:.3e}")

    def rhs(t, x):
        a, b = field_.current_at(t, x)
        return (b / a if a > 0 else 0.0), a

    ctl = StepControl(cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.max_steps,
                      local_cap=_step_cap_fn(field_, cfg))
    t_lo, t_hi = cfg.t_span
    parts: list[Solution] = []
    fwd = dopri5(rhs, start.x0, start.x1, max(t_hi, start.x0), ctl, floor, cfg.x_bounds)
    bwd = dopri5(rhs, start.x0, start.x1, min(t_lo, start.x0), ctl, floor, cfg.x_bounds)
    parts = [bwd, fwd]
    t = np.concatenate([bwd.t[::-1], fwd.t[1:]])
    x = np.concatenate([bwd.y[::-1], fwd.y[1:]])
    v = np.concatenate([bwd.dy[::-1], fwd.dy[1:]])
    status = TrajectoryStatus.COMPLETED
    for s in parts:
        if s.status != "completed":
            status = TrajectoryStatus(s.status)
    notes = [f"{name}: {s.message}" for name, s in (("backward", bwd), ("forward", fwd))
             if s.message]
    return Trajectory(t, x, v, start, status,
                      steps=bwd.steps + fwd.steps,
                      rejected=bwd.rejected + fwd.rejected,
                      evaluations=bwd.evaluations + fwd.evaluations,
                      max_error_estimate=max(bwd.max_local_error, fwd.max_local_error),
                      error_estimate=bwd.error_estimate + fwd.error_estimate,
                      notes=notes)


def batch_trajectories(field_, starts, cfg: IntegratorConfig,
                       threads: int = 1) -> list[Trajectory]:
    """Integrate every start; failures are recorded per trajectory."""
    starts = [SpacetimePoint(float(s[0]), float(s[1])) for s in starts]
    if not starts:
        return []
    floors = {}
    for s in starts:
        if s.x0 not in floors:
            floors[s.x0] = resolve_floor(field_, cfg, s.x0)

    def one(s):
        try:
            return integrate_trajectory(field_, s, cfg, floors[s.x0])
        except InvalidStart as exc:
            return Trajectory(np.array([s.x0]), np.array([s.x1]), np.array([0.0]), s,
                              TrajectoryStatus.ABORTED_LOW_DENSITY, notes=[str(exc)])

    if threads <= 1:
        return [one(s) for s in starts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, starts))


# -- start selection and checks ------------------------------------------------

def quantile_levels(n: int, coverage: float) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 < coverage < 1:
        raise ValueError("coverage must lie in (0, 1)")
    if n == 1:
        return np.array([0.5])
    return (1 - coverage) / 2 + coverage * np.arange(n) / (n - 1)


def density_cdf(packet: Packet, tau: float, n_grid: int = 40001):
    """Cumulative density on a fine grid over the automatic window at ``tau``."""
    lo, hi, q, _ = auto_window(packet, tau)
    x = np.linspace(lo, hi, n_grid)
    j0, _ = q.current(np.full_like(x, tau), x)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (j0[1:] + j0[:-1]) * np.diff(x))])
    return x, cdf / cdf[-1]


def pick_starts(packet: Packet, tau: float, n: int, coverage: float = 0.9,
                n_grid: int = 40001) -> list[SpacetimePoint]:
    """``n`` points at time ``tau`` on density quantiles spanning ``coverage``."""
    levels = quantile_levels(n, coverage)
    x, cdf = density_cdf(packet, tau, n_grid)
    xs = np.interp(levels, cdf, x)
    return [SpacetimePoint(float(tau), float(v)) for v in xs]


def common_grid(trajs, n: int = 4001) -> np.ndarray:
    lo = max(t.x0[0] for t in trajs)
    hi = min(t.x0[-1] for t in trajs)
    if not hi > lo:
        return np.empty(0)
    return np.linspace(lo, hi, n)


def count_crossings(trajs, n: int = 4001) -> int:
    """Adjacent pairs whose spatial ordering flips on a shared time grid."""
    trajs = [t for t in trajs if len(t.x0) > 1]
    if len(trajs) < 2:
        return 0
    grid = common_grid(trajs, n)
    if grid.size == 0:
        return 0
    pos = np.array([t.position(grid) for t in trajs])
    pos = pos[np.argsort(pos[:, 0], kind="stable")]
    gaps = np.diff(pos, axis=0)
    return int(np.sum(np.any(gaps <= 0, axis=1)))


def late_velocities(trajs, fraction: float = 0.2):
    return [t.late_velocity(fraction) for t in trajs]

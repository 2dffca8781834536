"""``kleinflow`` command line: identity suite, plane-mode and packet runs.

Exit codes: 0 success, 2 configuration error, 3 numeric convergence
failure, 4 identity failure.
"""
from __future__ import annotations

import argparse
import hashlib
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .bohmian import (IntegratorConfig, PacketField, StepModeField, TrajectoryStatus,
                      batch_trajectories, count_crossings, integrate_trajectory,
                      pick_starts)
from .config import ConfigError, ScenarioConfig, load_config
from .diagnostics import (default_velocity_bounds, localization_sweep,
                          probability_in_interval, rt_budget)
from .dispersion import DomainError, group_velocity, s_map
from .identities import run_identity_suite
from .norms import norm_at_time
from .output import (DENSITY_COLUMNS, REPORT_COLUMNS, TRAJECTORY_COLUMNS, write_csv)
from .packets import (Packet, PacketKind, WindowTooSmall, converge_packet,
                      gaussian_amplitude, reflected_amplitude)
from .quadrature import QuadratureNotConverged
from .spinor import SpacetimePoint
from .step_modes import closed_form_trajectory, make_step_mode, velocity_bounds
from .svg import PALETTE, Plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IDENTITY = 4

log = logging.getLogger("kleinflow")


class NumericFailure(RuntimeError):
    """A run stage did not converge."""


@dataclass
class RunResult:
    exit_code: int = EXIT_OK
    metrics: list = field(default_factory=list)
    files: list = field(default_factory=list)
    trajectories: list = field(default_factory=list)
    message: str = ""

    def metric(self, name: str):
        for k, v in self.metrics:
            if k == name:
                return v
        raise KeyError(name)


def _integrator_cfg(cfg: ScenarioConfig, **kw) -> IntegratorConfig:
    return IntegratorConfig((cfg.t_min, cfg.t_max), rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                            max_step=cfg.max_step, density_floor_rel=cfg.density_floor_rel,
                            max_steps=cfg.max_steps, **kw)


def _settings(cfg: ScenarioConfig, order_used: int | None = None) -> dict:
    quad = {"rule": "gauss_legendre", "initial_order": cfg.quad_order, "tol": cfg.quad_tol,
            "max_order": cfg.quad_max_order}
    if order_used is not None:
        quad["order_used"] = order_used
    return {
        "quadrature": quad,
        "integrator": {"method": "dopri5", "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol,
                       "max_step": cfg.max_step, "density_floor_rel": cfg.density_floor_rel,
                       "max_steps": cfg.max_steps},
        "kernel": {"backend": _kernels.BACKEND},
    }


def _path(out_dir: Path, cfg: ScenarioConfig, name: str) -> Path:
    return out_dir / f"{cfg.prefix}{name}"


def _write_reports(res: RunResult, out_dir, cfg, settings):
    res.files.append(write_csv(_path(out_dir, cfg, "reports.csv"), REPORT_COLUMNS,
                               res.metrics, cfg.digest(), settings))


# -- plane mode ----------------------------------------------------------------

def run_plane(cfg: ScenarioConfig, out_dir, threads: int = 1) -> RunResult:
    """Trajectory of one incoming step mode: closed form against the ODE."""
    out_dir = Path(out_dir)
    p = cfg.params
    m = make_step_mode(cfg.k, p)
    res = RunResult()
    settings = _settings(cfg)
    for name, v in (("k", m.k), ("q", m.q), ("r", m.r), ("t", m.t),
                    ("R", m.reflection), ("T", m.transmission), ("tau", cfg.tau),
                    ("slope_x0_per_x1_right", m.omega_q / m.q)):
        res.metrics.append((name, v))
    vmin, vmax = velocity_bounds(m)
    res.metrics += [("velocity_min_left", vmin), ("velocity_max_left", vmax)]

    x1 = np.linspace(cfg.x_min, cfg.x_max, 4001)
    x0 = closed_form_trajectory(m, cfg.tau, x1)
    keep = (x0 >= cfg.t_min) & (x0 <= cfg.t_max)
    closed = (x0[keep], x1[keep])

    icfg = _integrator_cfg(cfg, x_bounds=(cfg.x_min, cfg.x_max))
    traj = integrate_trajectory(StepModeField(m), SpacetimePoint(cfg.tau, 0.0), icfg)
    res.trajectories = [traj]
    inside = ((traj.x1 >= cfg.x_min) & (traj.x1 <= cfg.x_max)
              & (traj.x0 >= cfg.t_min) & (traj.x0 <= cfg.t_max))
    dx0 = np.abs(closed_form_trajectory(m, cfg.tau, traj.x1[inside]) - traj.x0[inside])
    max_dx0 = float(dx0.max()) if dx0.size else math.nan
    res.metrics += [
        ("ode_status", traj.status.value),
        ("ode_steps", traj.steps),
        ("ode_rejected", traj.rejected),
        ("ode_max_error_estimate", traj.max_error_estimate),
        ("ode_max_speed", traj.max_speed),
        ("max_abs_dx0", max_dx0),
        ("max_abs_dx0_rel_range", max_dx0 / (cfg.t_max - cfg.t_min)),
    ]

    rows = [(0, a, b) for a, b in zip(*closed)]
    rows += [(1, a, b) for a, b in zip(traj.x0[inside], traj.x1[inside])]
    st = dict(settings, series={"traj_id_0": "closed_form", "traj_id_1": "ode"})
    res.files.append(write_csv(_path(out_dir, cfg, "trajectories.csv"), TRAJECTORY_COLUMNS,
                               rows, cfg.digest(), st))
    _write_reports(res, out_dir, cfg, settings)
    if cfg.svg:
        plot = Plot((cfg.x_min, cfg.x_max), (cfg.t_min, cfg.t_max), xlabel="kappa x1",
                    ylabel="kappa x0", title=f"plane mode k={cfg.k:g}, V={cfg.V:g}")
        plot.vline(0.0, color="#888888", dash="4 3")
        plot.polyline(closed[1], closed[0], color=PALETTE[0], width=1.5)
        plot.polyline(traj.x1[inside], traj.x0[inside], color=PALETTE[1], width=0.8, dash="2 2")
        res.files.append(plot.save(_path(out_dir, cfg, "figure.svg"),
                                   f"config_sha256={cfg.digest()}"))
    if traj.status is not TrajectoryStatus.COMPLETED:
        res.exit_code = EXIT_NUMERIC
        res.message = f"ODE trajectory ended with {traj.status.value}: {traj.notes}"
    return res


# -- packet mode -----------------------------------------------------------------

def _probe_points(cfg: ScenarioConfig, n: int = 64):
    # deterministic low-discrepancy probes over the window
    i = np.arange(1, n + 1)
    u = (i * 0.6180339887498949) % 1.0
    v = (i * 0.7548776662466927) % 1.0
    return cfg.t_min + u * (cfg.t_max - cfg.t_min), cfg.x_min + v * (cfg.x_max - cfg.x_min)


def build_packet(cfg: ScenarioConfig) -> Packet:
    """Incoming step packet at an order converged over the window."""
    a = gaussian_amplitude(cfg.K, cfg.Delta)
    P = Packet(PacketKind.STEP_IN, a, cfg.params, cfg.quad_order)
    P = P.adapted(max(abs(cfg.t_min), abs(cfg.t_max)), max(abs(cfg.x_min), abs(cfg.x_max)))
    x0, x1 = _probe_points(cfg)
    return converge_packet(P, x0, x1, cfg.quad_tol, cfg.quad_max_order)


def run_packet(cfg: ScenarioConfig, out_dir, threads: int = 1, seed: int = 0) -> RunResult:
    """Density snapshots, budgets and a trajectory ensemble for a step packet."""
    out_dir = Path(out_dir)
    p = cfg.params
    res = RunResult()
    settings = _settings(cfg)
    a = gaussian_amplitude(cfg.K, cfg.Delta)
    try:
        P = build_packet(cfg)
        settings = _settings(cfg, P.order)
        res.metrics += [("quadrature_order", P.order), ("seed", seed)]

        budget = rt_budget(a, p, max(512, cfg.quad_order))
        res.metrics += [("R", budget.R), ("T", budget.T), ("R_plus_T", budget.R + budget.T)]
        vin = float(group_velocity(cfg.K, p))
        vout = float(group_velocity(s_map(cfg.K, p), p))
        res.metrics += [("group_velocity_incoming", vin), ("group_velocity_transmitted", vout)]

        norm_sq = P.norm_sq_kspace()
        taus = cfg.density_taus or (cfg.effective_start_tau, cfg.t_max)
        xs = np.linspace(cfg.x_min, cfg.x_max, cfg.density_points)
        rows, drift = [], 0.0
        for tau in taus:
            j0, j1 = P.current(np.full_like(xs, tau), xs)
            rows += [(tau, x, u, v) for x, u, v in zip(xs, j0, j1)]
            n = norm_at_time(P, tau) ** 2 / norm_sq - 1.0
            res.metrics.append((f"norm_drift_tau={tau:.17g}", n))
            drift = max(drift, abs(n))
        res.metrics.append(("max_norm_drift", drift))
        res.files.append(write_csv(_path(out_dir, cfg, "densities.csv"), DENSITY_COLUMNS,
                                   rows, cfg.digest(), settings))
        res.metrics.append(("transmitted_probability_t_max",
                            probability_in_interval(P, cfg.t_max, 0.0, math.inf)))

        if cfg.localization_taus:
            U = Packet(PacketKind.FREE_U, a, p, cfg.quad_order)
            v1, v2 = (cfg.v1, cfg.v2) if cfg.v1 is not None else default_velocity_bounds(U)
            res.metrics += [("localization_v1", v1), ("localization_v2", v2)]
            for rep in localization_sweep(U, cfg.localization_taus, v1, v2):
                res.metrics.append((f"localization_fraction_tau={rep.tau:.17g}",
                                    rep.mass_fraction))
            Ur = Packet(PacketKind.FREE_U, reflected_amplitude(a, p), p, cfg.quad_order)
            for tau in cfg.localization_taus:
                if tau > 0:
                    frac = probability_in_interval(Ur, tau, -math.inf, 0.0) * Ur.norm_sq_kspace()
                    res.metrics.append((f"reflected_left_mass_over_R_tau={tau:.17g}",
                                        frac / norm_sq / budget.R))
    except (QuadratureNotConverged, WindowTooSmall) as exc:
        res.exit_code = EXIT_NUMERIC
        res.message = f"{type(exc).__name__}: {exc}"
        res.metrics.append(("error", res.message))
        _write_reports(res, out_dir, cfg, settings)
        return res

    if cfg.n_trajectories > 0:
        _run_ensemble(P, cfg, res, out_dir, settings, threads)
    _write_reports(res, out_dir, cfg, settings)
    return res


def _run_ensemble(P: Packet, cfg, res: RunResult, out_dir, settings, threads):
    tau0 = cfg.effective_start_tau
    starts = pick_starts(P, tau0, cfg.n_trajectories, cfg.effective_coverage)
    trajs = batch_trajectories(PacketField(P), starts, _integrator_cfg(cfg), threads)
    res.trajectories = trajs
    rows = []
    for i, t in enumerate(trajs):
        rows += [(i, a, b) for a, b in zip(t.x0, t.x1)]
    res.files.append(write_csv(_path(out_dir, cfg, "trajectories.csv"), TRAJECTORY_COLUMNS,
                               rows, cfg.digest(), settings))

    ok = [t for t in trajs if t.status is TrajectoryStatus.COMPLETED]
    trans = [t for t in ok if t.transmitted]
    refl = [t for t in ok if not t.transmitted]
    late_t = [t.late_velocity() for t in trans]
    late_r = [t.late_velocity() for t in refl]
    early = [t.early_velocity() for t in ok]
    res.metrics += [
        ("start_tau", tau0),
        ("coverage", cfg.effective_coverage),
        ("n_trajectories", len(trajs)),
        ("n_completed", len(ok)),
        ("n_aborted_low_density",
         sum(t.status is TrajectoryStatus.ABORTED_LOW_DENSITY for t in trajs)),
        ("n_aborted_step_limit",
         sum(t.status is TrajectoryStatus.ABORTED_STEP_LIMIT for t in trajs)),
        ("n_starts_left", sum(s.x1 < 0 for s in starts)),
        ("n_transmitted", len(trans)),
        ("transmitted_fraction", len(trans) / len(trajs)),
        ("incoming_velocity_median", float(np.median(early)) if early else math.nan),
        ("transmitted_late_velocity_median", float(np.median(late_t)) if late_t else math.nan),
        ("transmitted_late_velocity_min", min(late_t) if late_t else math.nan),
        ("transmitted_late_velocity_max", max(late_t) if late_t else math.nan),
        ("reflected_late_velocity_median", float(np.median(late_r)) if late_r else math.nan),
        ("crossings", count_crossings(trajs)),
        ("max_speed", max((t.max_speed for t in trajs), default=0.0)),
        ("max_error_estimate", max((t.max_error_estimate for t in trajs), default=0.0)),
    ]
    if cfg.svg:
        plot = Plot((cfg.x_min, cfg.x_max), (cfg.t_min, cfg.t_max), xlabel="kappa x1",
                    ylabel="kappa x0",
                    title=f"K={cfg.K:g}, Delta={cfg.Delta:g}, V={cfg.V:g}")
        plot.vline(0.0, color="#888888", dash="4 3")
        for i, t in enumerate(trajs):
            plot.polyline(t.x1, t.x0, color=PALETTE[0 if t.transmitted else 1], width=0.9)
        res.files.append(plot.save(_path(out_dir, cfg, "figure.svg"),
                                   f"config_sha256={cfg.digest()}"))
    if any(t.status is TrajectoryStatus.ABORTED_STEP_LIMIT for t in trajs):
        res.exit_code = EXIT_NUMERIC
        res.message = "trajectory integration hit the step limit"


# -- identities ------------------------------------------------------------------

def run_identities(out_dir=None, samples: int = 128, seed: int = 0, kappa: float = 1.0,
                   V: float | None = None, perturb_r: float = 0.0) -> RunResult:
    results = run_identity_suite(samples=samples, seed=seed, kappa=kappa, V=V,
                                 perturb_r=perturb_r)
    res = RunResult()
    failed = []
    for r in results:
        res.metrics.append((r.name, r.max_residual))
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  max_residual={r.max_residual:.3e}"
              f"  samples={r.samples}")
        if not r.passed:
            failed.append(r.name)
    if out_dir is not None:
        settings = {"identities": {"samples": samples, "seed": seed, "kappa": kappa,
                                   "V": "random" if V is None else V, "perturb_r": perturb_r,
                                   "tolerance": results[0].tolerance},
                    "kernel": {"backend": _kernels.BACKEND}}
        digest = hashlib.sha256(repr(sorted(settings["identities"].items())).encode()).hexdigest()
        res.files.append(write_csv(Path(out_dir) / "identities.csv", REPORT_COLUMNS,
                                   res.metrics, digest, settings))
    if failed:
        res.exit_code = EXIT_IDENTITY
        res.message = "failing identities: " + "; ".join(failed)
    return res


# -- entry point -------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default="out", help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for trajectories")
    common.add_argument("--seed", type=int, default=0,
                        help="random seed (identity sampling; packet starts are deterministic)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="kleinflow", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"kleinflow {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    ident = sub.add_parser("identities", parents=[common], help="run the identity suite")
    ident.add_argument("--samples", type=int, default=128)
    ident.add_argument("--kappa", type=float, default=1.0)
    ident.add_argument("--V", type=float, default=None, help="fix the step height")
    ident.add_argument("--perturb-r", type=float, default=0.0,
                       help="shift r(k) before checking (fault injection)")
    for name, text in (("plane", "single step-mode trajectory"),
                       ("packet", "wave packet with trajectory ensemble")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--config", required=True, help="scenario file (key = value)")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "identities":
            if args.samples < 1:
                raise ConfigError("--samples must be >= 1")
            res = run_identities(args.out_dir, args.samples, args.seed, args.kappa, args.V,
                                 args.perturb_r)
        else:
            cfg = load_config(args.config)
            if cfg.mode != args.command:
                raise ConfigError(f"config mode is {cfg.mode!r}, command is {args.command!r}")
            run = run_plane if cfg.mode == "plane" else run_packet
            kw = {"seed": args.seed} if cfg.mode == "packet" else {}
            res = run(cfg, Path(args.out_dir), args.threads, **kw)
            for k, v in res.metrics:
                print(f"{k},{v}")
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureNotConverged, WindowTooSmall, NumericFailure) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for f in res.files:
        log.info("wrote %s", f)
    if res.message:
        print(res.message, file=sys.stderr)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())

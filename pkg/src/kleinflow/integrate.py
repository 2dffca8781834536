"""Scalar Dormand-Prince 5(4) integrator with PI step-size control.

Written for ``dx/dt = v(t, x)`` with ``|v| < 1``; the right-hand side also
reports the density so the caller can stop near nodes of the wave function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Dormand & Prince (1980) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6] + (0.0,)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA
FAC_MIN, FAC_MAX = 0.2, 10.0


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    status: str
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    max_local_error: float = 0.0
    error_estimate: float = 0.0
    message: str = ""


@dataclass
class StepControl:
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float = math.inf
    max_steps: int = 200_000
    first_step: float | None = None
    local_cap: Callable[[float, float], float] | None = field(default=None, repr=False)


def dopri5(rhs: Callable[[float, float], tuple[float, float]], t0: float, y0: float,
           t_end: float, ctl: StepControl, density_floor: float = 0.0,
           y_bounds: tuple[float, float] | None = None) -> Solution:
    """Integrate from ``t0`` to ``t_end`` (either direction).

    ``rhs(t, y)`` returns ``(dy/dt, density)``.  Integration stops with
    status ``aborted_low_density`` when the density at an accepted point
    drops to ``density_floor`` or below, and ``completed`` when ``t_end``
    is reached or ``y`` leaves ``y_bounds``.
    """
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)
    ts, ys, dys = [t0], [y0], []
    f0, d0 = rhs(t0, y0)
    nfev = 1
    dys.append(f0)
    if span == 0.0:
        return Solution(np.array(ts), np.array(ys), np.array(dys), "completed",
                        evaluations=nfev)

    h = ctl.first_step or min(ctl.max_step, 0.01 * span, 1.0)
    t, y, f = t0, y0, f0
    err_old = 1e-4
    steps = rejected = 0
    max_err = total_err = 0.0
    status, message = "completed", ""
    k = [0.0] * 7
    while True:
        if steps >= ctl.max_steps:
            status, message = "aborted_step_limit", f"{steps} steps"
            break
        cap = ctl.max_step
        if ctl.local_cap is not None:
            cap = min(cap, ctl.local_cap(t, y))
        h = min(h, cap, abs(t_end - t))
        last = h >= abs(t_end - t) * (1 - 1e-12)
        hs = direction * h
        k[0] = f
        for i in range(1, 7):
            a = _A[i]
            yi = y + hs * sum(a[j] * k[j] for j in range(i))
            k[i], dens_new = rhs(t + _C[i] * hs, yi)
        nfev += 6
        y_new = y + hs * sum(_B[j] * k[j] for j in range(6))
        err_abs = abs(hs * sum(_E[j] * k[j] for j in range(7)))
        scale = ctl.atol + ctl.rtol * max(abs(y), abs(y_new))
        err = err_abs / scale
        if err <= 1.0:
            t = t_end if last else t + hs
            y, f = y_new, k[6]
            steps += 1
            max_err = max(max_err, err_abs)
            total_err += err_abs
            ts.append(t)
            ys.append(y)
            dys.append(f)
            err_c = max(err, 1e-10)
            fac = SAFETY * err_c ** (-ALPHA) * err_old ** BETA
            h *= min(FAC_MAX, max(FAC_MIN, fac))
            err_old = err_c
            if dens_new <= density_floor:
                status, message = "aborted_low_density", f"density {dens_new:.3e} at t={t}"
                break
            if y_bounds is not None and not (y_bounds[0] <= y <= y_bounds[1]):
                message = "left spatial window"
                break
            if last:
                break
        else:
            rejected += 1
            h *= max(FAC_MIN, SAFETY * err ** (-ALPHA))
            if h < 1e-14 * max(1.0, abs(t)):
                status, message = "aborted_step_limit", f"step size underflow at t={t}"
                break
    return Solution(np.array(ts), np.array(ys), np.array(dys), status, steps,
                    rejected, nfev, max_err, total_err, message)


def hermite(t: np.ndarray, y: np.ndarray, dy: np.ndarray, tq) -> np.ndarray:
    """Cubic Hermite interpolation through samples with known slopes.

    ``t`` must be increasing; queries outside are clamped to the ends.
    """
    tq = np.clip(np.asarray(tq, dtype=float), t[0], t[-1])
    i = np.clip(np.searchsorted(t, tq, side="right") - 1, 0, len(t) - 2)
    h = t[i + 1] - t[i]
    s = (tq - t[i]) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1]

"""Incoming single-frequency solutions of the Klein step problem.

For ``V > 2 kappa`` and ``0 < k`` with ``omega_bar(k) < V - kappa`` the
right-incoming mode is

    U_k + r U_{-k}                 for x1 < 0
    exp(-i V x0) t V_q             for x1 >= 0

with ``q = s(k)`` and real coefficients ``r < 0``, ``t < 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import (DomainError, PhysicalParams, group_velocity,
                         omega_bar, omega_cap)
from .free_modes import INV_SQRT_2PI, u_components, v_components
from .spinor import CurrentVector, SpacetimePoint, Spinor


class NoKleinRegime(DomainError):
    """``V > 2 kappa`` is violated."""


class OutsideKleinWindow(DomainError):
    """``0 < k`` and ``omega_bar(k) < V - kappa`` is violated."""


def check_klein(k, p: PhysicalParams) -> None:
    if not p.V > 2.0 * p.kappa:
        raise NoKleinRegime(
            f"V > 2*kappa violated: V={p.V}, 2*kappa={2.0 * p.kappa}")
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise OutsideKleinWindow(f"k > 0 violated: k={k}")
    w = np.hypot(p.kappa, k)
    if np.any(~(w < p.V - p.kappa)):
        raise OutsideKleinWindow(
            f"omega_bar(k) < V - kappa violated: omega_bar={w}, V-kappa={p.V - p.kappa}")


def step_coefficients(k, p: PhysicalParams):
    """Return ``(q, r, t)`` for scalar or array ``k`` inside the Klein window."""
    check_klein(k, p)
    k = np.asarray(k, dtype=float)
    kap, V = p.kappa, p.V
    e = V - np.hypot(kap, k)
    q = np.sqrt((e - kap) * (e + kap))
    r = -2.0 * kap * V / (V * V - (k - q) ** 2)
    t = -2.0 * (k / kap) * omega_cap(k, p) * omega_cap(-q, p) / (V + k - q)
    if k.ndim == 0:
        return float(q), float(r), float(t)
    return q, r, t


@dataclass(frozen=True)
class StepMode:
    params: PhysicalParams
    k: float
    q: float
    r: float
    t: float

    @property
    def omega(self) -> float:
        return float(omega_bar(self.k, self.params))

    @property
    def omega_q(self) -> float:
        return float(omega_bar(self.q, self.params))

    @property
    def reflection(self) -> float:
        return self.r * self.r

    @property
    def transmission(self) -> float:
        return self.q * self.t * self.t / self.k


def make_step_mode(k: float, p: PhysicalParams) -> StepMode:
    q, r, t = step_coefficients(float(k), p)
    return StepMode(p, float(k), q, r, t)


def step_mode_arrays(m: StepMode, x0, x1):
    """Spinor components of ``U_k^in`` at arrays of points."""
    p = m.params
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    w = m.omega
    uk1, uk2 = u_components(m.k, p)
    um1, um2 = u_components(-m.k, p)
    vq1, vq2 = v_components(m.q, p)
    tphase = np.exp(-1j * w * x0)
    fwd = np.exp(1j * m.k * x1)
    bwd = np.exp(-1j * m.k * x1)
    left1 = uk1 * fwd + m.r * um1 * bwd
    left2 = uk2 * fwd + m.r * um2 * bwd
    # exp(-i V x0) exp(i(wq x0 - q x1)) = exp(-i w x0) exp(-i q x1)
    tr = m.t * np.exp(-1j * m.q * x1)
    right1 = vq1 * tr
    right2 = vq2 * tr
    neg = x1 < 0
    c1 = INV_SQRT_2PI * tphase * np.where(neg, left1, right1)
    c2 = INV_SQRT_2PI * tphase * np.where(neg, left2, right2)
    return c1, c2


def eval_step_mode(m: StepMode, pt: SpacetimePoint) -> Spinor:
    c1, c2 = step_mode_arrays(m, pt[0], pt[1])
    return Spinor(complex(c1), complex(c2))


def current_step_arrays(m: StepMode, x0, x1):
    """Closed-form current; ``x0`` only fixes the output shape."""
    x1 = np.asarray(x1, dtype=float)
    shape = np.broadcast(np.asarray(x0), x1).shape
    t2 = m.t * m.t
    # e^{ikx} and r e^{-ikx} interfere at wave number 2k
    osc = np.where(x1 < 0, np.cos(2.0 * m.k * x1) - 1.0, 0.0)
    j0 = (t2 * m.omega_q + 2.0 * m.params.kappa * m.r * osc) / math.pi
    j1 = np.full(shape, t2 * m.q / math.pi)
    return np.broadcast_to(j0, shape), j1


def current_step_mode(m: StepMode, pt: SpacetimePoint) -> CurrentVector:
    j0, j1 = current_step_arrays(m, pt[0], pt[1])
    return CurrentVector(float(j0), float(j1))


def velocity_step_mode(m: StepMode, pt: SpacetimePoint) -> float:
    return velocity_step_x1(m, pt[1])


def velocity_step_x1(m: StepMode, x1: float) -> float:
    osc = 1.0 - math.cos(2.0 * m.k * x1) if x1 < 0 else 0.0
    return m.q / (m.omega_q - 2.0 * m.params.kappa * m.r / (m.t * m.t) * osc)


def velocity_bounds(m: StepMode) -> tuple[float, float]:
    """Range of the velocity over the left half line."""
    vmax = m.q / m.omega_q
    vmin = m.q / (m.omega_q + 4.0 * m.params.kappa * abs(m.r) / (m.t * m.t))
    return vmin, vmax


def transmitted_velocity(m: StepMode) -> float:
    return float(group_velocity(m.q, m.params))


def closed_form_trajectory(m: StepMode, tau: float, x1):
    """Time ``x0`` at which the trajectory through ``(tau, 0)`` reaches ``x1``."""
    x1 = np.asarray(x1, dtype=float)
    kx = 2.0 * m.k * x1
    left = np.where(x1 < 0, kx - np.sin(kx), 0.0)
    x0 = (tau + (m.omega_q / m.q) * x1
          - m.params.kappa * m.r / (m.k * m.q * m.t * m.t) * left)
    return x0 if x0.ndim else float(x0)

"""Verification measures: probabilities, localization, reflection/transmission
budget, divergence and Dirac residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dispersion import PhysicalParams, group_velocity
from .packets import (AmplitudeProfile, Packet, PacketKind, reflected_amplitude,
                      transmitted_amplitude)
from .norms import spatial_mass


class ZeroNorm(ValueError):
    """The amplitude carries no probability."""


@dataclass(frozen=True)
class LocalizationReport:
    tau: float
    interval: tuple[float, float]
    mass_fraction: float
    total_norm_sq: float
    quadrature_order: int


def probability_in_interval(packet: Packet, tau: float, lo: float, hi: float) -> float:
    """Probability of ``[lo, hi]`` on the slice ``x0 = tau``.

    Normalized by the Fourier-space norm, which equals the spatial norm at
    every time for these solutions.
    """
    norm_sq = packet.norm_sq_kspace()
    if norm_sq == 0:
        raise ZeroNorm(f"zero norm for {packet!r}")
    return spatial_mass(packet, tau, lo, hi) / norm_sq


def localization_interval(tau: float, v1: float, v2: float) -> tuple[float, float]:
    a, b = tau * v1, tau * v2
    return (a, b) if a <= b else (b, a)


def default_velocity_bounds(packet: Packet, slack: float = 0.1) -> tuple[float, float]:
    """Bracket of the packet's group velocities widened by ``slack`` of their span."""
    a = packet.amplitude
    vs = group_velocity(np.array([a.k1, a.k2]), packet.params)
    lo, hi = float(vs.min()), float(vs.max())
    pad = slack * (hi - lo)
    return lo - pad, hi + pad


def localization_sweep(packet: Packet, taus, v1: float, v2: float) -> list[LocalizationReport]:
    """Mass fraction inside ``tau [v1, v2]`` for each ``tau``.

    Requires ``v1 < v_g(k1)`` and ``v_g(k2) < v2`` for the packet's support.
    """
    a = packet.amplitude
    vg = group_velocity(np.array([a.k1, a.k2]), packet.params)
    if not (v1 < vg.min() and vg.max() < v2):
        raise ValueError(
            f"need v1 < {vg.min():.6g} and {vg.max():.6g} < v2, got [{v1}, {v2}]")
    norm_sq = packet.norm_sq_kspace()
    out = []
    for tau in taus:
        lo, hi = localization_interval(float(tau), v1, v2)
        frac = spatial_mass(packet, float(tau), lo, hi) / norm_sq if hi > lo else 0.0
        out.append(LocalizationReport(float(tau), (lo, hi), frac, norm_sq,
                                      packet.adapted(abs(tau), max(abs(lo), abs(hi))).order))
    return out


@dataclass(frozen=True)
class RTBudget:
    R: float
    T: float
    incident_norm_sq: float
    quadrature_order: int
    extras: dict = field(default_factory=dict)


def rt_budget(a: AmplitudeProfile, p: PhysicalParams, order: int = 512) -> RTBudget:
    """Packet reflection and transmission probabilities from Fourier-space norms.

    ``R = ||U[a_r]||^2 / ||U[a]||^2`` and ``T = ||V[a_t]||^2 / ||U[a]||^2``
    with the transmitted packet integrated in its own wave number ``q``.
    """
    inc = Packet(PacketKind.FREE_U, a, p, 8).left_branches[0].kspace_norm_sq(order)
    if inc == 0:
        raise ZeroNorm(f"amplitude {a.label!r} has zero norm")
    refl = Packet(PacketKind.FREE_U, reflected_amplitude(a, p), p, 8)
    trans = Packet(PacketKind.FREE_V, transmitted_amplitude(a, p), p, 8)
    R = refl.left_branches[0].kspace_norm_sq(order) / inc
    T = trans.left_branches[0].kspace_norm_sq(order) / inc
    return RTBudget(R, T, inc, order)


# -- differential checks -----------------------------------------------------

def divergence(current, x0, x1, h: float = 1e-3):
    """Central-difference ``d0 j0 + d1 j1``; ``current(x0, x1)`` is vectorized."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    j0p, _ = current(x0 + h, x1)
    j0m, _ = current(x0 - h, x1)
    _, j1p = current(x0, x1 + h)
    _, j1m = current(x0, x1 - h)
    return (j0p - j0m) / (2 * h) + (j1p - j1m) / (2 * h)


def dirac_residual(evaluate, x0, x1, V: float, kappa: float, h: float = 1e-4):
    """Residual of ``i d0 psi = H psi`` by central differences.

    ``H`` has ``-i d1 + V Theta(x1)`` and ``i d1 + V Theta(x1)`` on the
    diagonal and ``kappa`` off it.  Returns the two component residuals.
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    p1, p2 = evaluate(x0, x1)
    t1p, t2p = evaluate(x0 + h, x1)
    t1m, t2m = evaluate(x0 - h, x1)
    s1p, s2p = evaluate(x0, x1 + h)
    s1m, s2m = evaluate(x0, x1 - h)
    d0_1 = (t1p - t1m) / (2 * h)
    d0_2 = (t2p - t2m) / (2 * h)
    d1_1 = (s1p - s1m) / (2 * h)
    d1_2 = (s2p - s2m) / (2 * h)
    pot = np.where(x1 >= 0, V, 0.0)
    r1 = 1j * d0_1 - (-1j * d1_1 + pot * p1 + kappa * p2)
    r2 = 1j * d0_2 - (kappa * p1 + 1j * d1_2 + pot * p2)
    return r1, r2


def asymptotic_mass_split(packet: Packet, tau: float) -> tuple[float, float]:
    """Probabilities of the left and right half lines at ``tau``."""
    return (probability_in_interval(packet, tau, -math.inf, 0.0),
            probability_in_interval(packet, tau, 0.0, math.inf))

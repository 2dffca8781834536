"""Spatial integrals of the density ``j0`` on a time slice.

The hard cut of the amplitude at the ends of its support leaves
algebraic tails ``~ 1/x^2`` in the density.  Integrals over half lines
therefore use a finite window plus the analytic far-field mass beyond it
(see :meth:`Packet.tail_mass`).
"""
from __future__ import annotations

import math

import numpy as np

from .packets import Packet, WindowTooSmall
from .quadrature import composite_nodes

EDGE_FLOOR = 1e-6
PANEL_NODES = 16


def _panel_length(packet: Packet, side: str) -> float:
    # j0 holds beats exp(i(p - p')x); keep (max beat) * panel <= 6 rad
    span = packet.p_span(side)
    return float(min(20.0, 6.0 / max(span, 1e-9)))


def _nodes(packet: Packet, lo: float, hi: float):
    xs, ws = [], []
    if lo < 0:
        x, w = composite_nodes([lo, min(hi, 0.0)], _panel_length(packet, "left"), PANEL_NODES)
        xs.append(x)
        ws.append(w)
    if hi > 0:
        x, w = composite_nodes([max(lo, 0.0), hi], _panel_length(packet, "right"), PANEL_NODES)
        xs.append(x)
        ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


def auto_window(packet: Packet, tau: float, edge_floor: float = EDGE_FLOOR,
                max_doublings: int = 8) -> tuple[float, float, Packet, float]:
    """Window around the packet body whose edge densities are below the floor.

    Returns ``(lo, hi, adapted_packet, peak_density)``.
    """
    lo_r, hi_r = packet.ray_hull(tau)
    margin = 6.0 * packet.body_width()
    for _ in range(max_doublings + 1):
        lo, hi = lo_r - margin, hi_r + margin
        q = packet.adapted(abs(tau), max(abs(lo), abs(hi)))
        x = np.linspace(lo, hi, 4001)
        j0, _ = q.current(np.full_like(x, tau), x)
        peak = float(j0.max())
        edge = float(max(j0[:40].max(), j0[-40:].max()))
        if peak == 0.0 or edge <= edge_floor * peak:
            return lo, hi, q, peak
        margin *= 2.0
    raise WindowTooSmall(
        f"edge density {edge:.3e} above {edge_floor:.1e} x peak {peak:.3e} at tau={tau}")


def spatial_mass(packet: Packet, tau: float, lo: float = -math.inf,
                 hi: float = math.inf, edge_floor: float = EDGE_FLOOR,
                 tails: bool = True) -> float:
    """``int_lo^hi j0(tau, x) dx``; infinite ends use window plus far-field tail."""
    if not hi > lo:
        return 0.0
    if math.isinf(lo) or math.isinf(hi):
        wlo, whi, q, _ = auto_window(packet, tau, edge_floor)
        a = wlo if math.isinf(lo) else lo
        b = whi if math.isinf(hi) else hi
        if math.isinf(lo) and not math.isinf(hi):
            a = min(a, b)
        if math.isinf(hi) and not math.isinf(lo):
            b = max(a, b)
        q = q.adapted(abs(tau), max(abs(a), abs(b)))
    else:
        a, b = lo, hi
        q = packet.adapted(abs(tau), max(abs(a), abs(b)))
    if not b > a:
        mass = 0.0
    else:
        x, w = _nodes(q, a, b)
        j0, _ = q.current(np.full_like(x, tau), x)
        mass = float(np.sum(w * j0))
    if math.isinf(lo) and tails:
        mass += q.tail_mass(tau, a, -1)
    if math.isinf(hi) and tails:
        mass += q.tail_mass(tau, b, +1)
    return mass


def norm_at_time(packet: Packet, tau: float, spatial_window=None,
                 edge_floor: float = EDGE_FLOOR) -> float:
    """``||psi_tau|| = (int j0(tau, x) dx)^(1/2)``.

    With an explicit ``spatial_window`` the density at its edges must be
    below ``edge_floor`` times the peak, else :class:`WindowTooSmall`.
    """
    if spatial_window is None:
        return math.sqrt(spatial_mass(packet, tau, edge_floor=edge_floor))
    lo, hi = spatial_window
    q = packet.adapted(abs(tau), max(abs(lo), abs(hi)))
    x = np.linspace(lo, hi, 4001)
    j0, _ = q.current(np.full_like(x, tau), x)
    peak = float(j0.max())
    if peak > 0 and max(j0[0], j0[-1]) > edge_floor * peak:
        raise WindowTooSmall(
            f"density at window edges {max(j0[0], j0[-1]):.3e} exceeds "
            f"{edge_floor:.1e} x peak {peak:.3e}")
    if peak == 0:
        return 0.0
    xs, ws = _nodes(q, lo, hi)
    j0, _ = q.current(np.full_like(xs, tau), xs)
    mass = float(np.sum(ws * j0)) + q.tail_mass(tau, lo, -1) + q.tail_mass(tau, hi, 1)
    return math.sqrt(mass)

"""Relativistic kinematics: dispersion, spinor weights, group velocity and
the energy-partition map across the step.

Every function accepts scalars or numpy arrays for ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside the region where a formula holds."""


@dataclass(frozen=True)
class PhysicalParams:
    """Inverse Compton length ``kappa`` and step height ``V`` (units of kappa)."""

    kappa: float = 1.0
    V: float = 0.0

    def __post_init__(self):
        if not (self.kappa > 0 and np.isfinite(self.kappa)):
            raise DomainError(f"kappa must be positive and finite, got {self.kappa}")
        if not np.isfinite(self.V):
            raise DomainError(f"V must be finite, got {self.V}")

    @property
    def klein(self) -> bool:
        return self.V > 2.0 * self.kappa

    @property
    def k_max(self) -> float:
        """Upper end of the Klein window in wave number, ``sqrt(V^2 - 2 kappa V)``."""
        require_klein(self)
        return float(np.sqrt(self.V * self.V - 2.0 * self.kappa * self.V))


def require_klein(p: PhysicalParams) -> None:
    if not p.V > 2.0 * p.kappa:
        raise DomainError(
            f"no Klein regime: need V > 2*kappa, got V={p.V}, kappa={p.kappa}")


def omega_bar(k, p: PhysicalParams):
    return np.hypot(p.kappa, k)


def omega_cap(k, p: PhysicalParams):
    """``sqrt(omega_bar(k) + k)`` evaluated without cancellation for k < 0."""
    k = np.asarray(k, dtype=float)
    w = np.hypot(p.kappa, k)
    # omega_bar + k = kappa^2 / (omega_bar - k)
    s = np.where(k >= 0, w + k, p.kappa * p.kappa / (w - k))
    out = np.sqrt(s)
    return out if out.ndim else float(out)


def group_velocity(k, p: PhysicalParams):
    return k / np.hypot(p.kappa, k)


def s_map(k, p: PhysicalParams):
    """Transmitted wave number ``q`` with ``omega_bar(k) + omega_bar(q) = V``.

    Defined on ``0 < k < sqrt(V^2 - 2 kappa V)``; an involution there.
    """
    require_klein(p)
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)) or np.any(~(k < p.k_max)):
        raise DomainError(
            f"k outside (0, sqrt(V^2-2 kappa V)) = (0, {p.k_max}): {k}")
    e = p.V - np.hypot(p.kappa, k)
    q = np.sqrt((e - p.kappa) * (e + p.kappa))
    return q if q.ndim else float(q)


def s_map_derivative(k, p: PhysicalParams):
    """``ds/dk = -v_g(k) / v_g(s(k))``."""
    q = s_map(k, p)
    return -group_velocity(k, p) / group_velocity(q, p)


def fixed_point_k0(p: PhysicalParams) -> float:
    require_klein(p)
    return 0.5 * p.V * float(np.sqrt(1.0 - (2.0 * p.kappa / p.V) ** 2))


def in_klein_window(k, p: PhysicalParams) -> bool:
    """True when ``0 < k`` and ``omega_bar(k) < V - kappa`` for every entry."""
    k = np.asarray(k, dtype=float)
    return bool(p.klein and np.all(k > 0) and np.all(np.hypot(p.kappa, k) < p.V - p.kappa))

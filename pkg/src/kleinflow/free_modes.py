"""Plane-wave solutions of the free Dirac equation.

``U_k = exp(-i(w x0 - k x1)) u(k) / sqrt(2 pi)`` has positive frequency,
``V_k = exp(+i(w x0 - k x1)) v(k) / sqrt(2 pi)`` negative frequency, with
``w = omega_bar(k)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dispersion import PhysicalParams, omega_bar, omega_cap
from .spinor import SpacetimePoint, Spinor

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class FrequencySign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def u_components(k, p: PhysicalParams):
    return omega_cap(k, p), omega_cap(-np.asarray(k), p)


def v_components(k, p: PhysicalParams):
    a, b = u_components(k, p)
    return -a, b


def spinor_u(k: float, p: PhysicalParams) -> Spinor:
    a, b = u_components(k, p)
    return Spinor(complex(a), complex(b))


def spinor_v(k: float, p: PhysicalParams) -> Spinor:
    a, b = v_components(k, p)
    return Spinor(complex(a), complex(b))


@dataclass(frozen=True)
class FreeMode:
    k: float
    frequency_sign: FrequencySign = FrequencySign.POSITIVE
    params: PhysicalParams = PhysicalParams()

    @property
    def frequency(self) -> float:
        w = float(omega_bar(self.k, self.params))
        return w if self.frequency_sign is FrequencySign.POSITIVE else -w

    def phase_velocity(self) -> float:
        return float(omega_bar(self.k, self.params)) / self.k


def free_mode_arrays(m: FreeMode, x0, x1):
    """Components of the mode at arrays of points."""
    p = m.params
    w = omega_bar(m.k, p)
    theta = w * np.asarray(x0, dtype=float) - m.k * np.asarray(x1, dtype=float)
    if m.frequency_sign is FrequencySign.POSITIVE:
        a, b = u_components(m.k, p)
        ph = np.exp(-1j * theta)
    else:
        a, b = v_components(m.k, p)
        ph = np.exp(1j * theta)
    return INV_SQRT_2PI * a * ph, INV_SQRT_2PI * b * ph


def eval_free_mode(m: FreeMode, pt: SpacetimePoint) -> Spinor:
    c1, c2 = free_mode_arrays(m, pt[0], pt[1])
    return Spinor(complex(c1), complex(c2))

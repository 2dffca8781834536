"""Two-component spinor algebra for the 1+1 dimensional Dirac equation.

Components are taken with respect to an orthonormal basis ``(e1, e2)``.
All functions are pure and work on immutable :class:`Spinor` values; the
array helpers at the bottom operate on component arrays and are what the
packet and trajectory code uses in bulk.
"""
from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np


class Spinor(NamedTuple):
    c1: complex
    c2: complex

    def __add__(self, other):  # type: ignore[override]
        return Spinor(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return Spinor(self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self):
        return Spinor(-self.c1, -self.c2)

    def scale(self, z: complex) -> "Spinor":
        return Spinor(z * self.c1, z * self.c2)

    def is_finite(self) -> bool:
        return cmath.isfinite(self.c1) and cmath.isfinite(self.c2)


class SpacetimePoint(NamedTuple):
    """Coordinates ``(x0, x1)`` in units of the Compton length."""

    x0: float
    x1: float


class CurrentVector(NamedTuple):
    """Components of the probability current ``j0 d0 + j1 d1``."""

    j0: float
    j1: float

    @property
    def minkowski_square(self) -> float:
        return self.j0 * self.j0 - self.j1 * self.j1

    @property
    def velocity(self) -> float:
        return self.j1 / self.j0


ZERO = Spinor(0j, 0j)


def gamma0(s: Spinor) -> Spinor:
    return Spinor(s.c2, s.c1)


def gamma1(s: Spinor) -> Spinor:
    return Spinor(-s.c2, s.c1)


def scalar_inner(v: Spinor, w: Spinor) -> complex:
    """Positive definite product, antilinear in the first slot."""
    return v.c1.conjugate() * w.c1 + v.c2.conjugate() * w.c2


def lorentz_inner(v: Spinor, w: Spinor) -> complex:
    """Indefinite product ``L(v, w) = S(v, gamma0 w)``."""
    return v.c2.conjugate() * w.c1 + v.c1.conjugate() * w.c2


def current_of(s: Spinor) -> CurrentVector:
    a = abs(s.c1) ** 2
    b = abs(s.c2) ** 2
    return CurrentVector(a + b, a - b)


def current_defect(s: Spinor) -> float:
    """Return ``j0**2 - j1**2 - 4|c1 c2|**2``, zero up to rounding."""
    j = current_of(s)
    return j.minkowski_square - 4.0 * abs(s.c1 * s.c2) ** 2


def as_spinor(z1: complex, z2: complex) -> Spinor:
    return Spinor(complex(z1), complex(z2))


# -- array forms -------------------------------------------------------------

def current_arrays(psi1: np.ndarray, psi2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Current components for arrays of spinor components."""
    a = psi1.real ** 2 + psi1.imag ** 2
    b = psi2.real ** 2 + psi2.imag ** 2
    return a + b, a - b


def phase(theta: float) -> complex:
    return complex(math.cos(theta), math.sin(theta))

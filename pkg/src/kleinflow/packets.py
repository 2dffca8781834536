"""Finite-norm wave packets built by Gauss-Legendre quadrature over k.

A packet is a superposition ``int dk/(2 w(k)) a(k) X_k`` of plane waves.
Internally each packet is a list of *branches*: one continuous family of
plane waves ``g(k) exp(i(p(k) x1 - E(k) x0))`` on an interval of k.  A
quadrature rule turns every branch into a finite plane-wave sum that the
compiled kernel evaluates.  The step packet uses one set of branches on
``x1 < 0`` and another on ``x1 >= 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .dispersion import (PhysicalParams, group_velocity, omega_bar,
                         s_map)
from .free_modes import INV_SQRT_2PI, u_components, v_components
from .quadrature import (QuadratureNotConverged, QuadratureRule,
                         gauss_legendre, order_for_phase)
from .spinor import CurrentVector, SpacetimePoint, Spinor
from .step_modes import check_klein, step_coefficients

DEFAULT_ORDER = 256
MAX_ORDER = 16384


class PacketKind(str, enum.Enum):
    FREE_U = "freeU"
    FREE_V = "freeV"
    STEP_IN = "stepIn"


# -- amplitudes --------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeProfile:
    """Continuous amplitude on the compact support ``[k1, k2]``."""

    k1: float
    k2: float
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.k1) and np.isfinite(self.k2) and self.k1 < self.k2):
            raise ValueError(f"need finite k1 < k2, got [{self.k1}, {self.k2}]")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return np.asarray(self.func(k), dtype=complex) * np.ones_like(k)

    @property
    def support(self) -> tuple[float, float]:
        return self.k1, self.k2


def gaussian_amplitude(K: float, Delta: float) -> AmplitudeProfile:
    """``exp(-(k-K)^2/Delta^2)`` cut to ``[K - 2 Delta, K + 2 Delta]``."""
    if not Delta > 0:
        raise ValueError(f"Delta must be positive, got {Delta}")
    return AmplitudeProfile(
        K - 2.0 * Delta, K + 2.0 * Delta,
        lambda k: np.exp(-((k - K) / Delta) ** 2),
        f"gaussian(K={K!r}, Delta={Delta!r})")


def zero_amplitude(k1: float, k2: float) -> AmplitudeProfile:
    return AmplitudeProfile(k1, k2, lambda k: np.zeros_like(k), "zero")


def reflected_amplitude(a: AmplitudeProfile, p: PhysicalParams) -> AmplitudeProfile:
    """``a_r(k) = r(-k) a(-k)`` on ``[-k2, -k1]``."""
    check_klein(np.array([a.k1, a.k2]), p)

    def func(k):
        _, r, _ = step_coefficients(-k, p)
        return r * a(-k)

    return AmplitudeProfile(-a.k2, -a.k1, func, f"reflected[{a.label}]")


def transmitted_amplitude(a: AmplitudeProfile, p: PhysicalParams) -> AmplitudeProfile:
    """``a_t(q) = (q/k) t(k) a(k)`` with ``k = s(q)``, on ``[s(k2), s(k1)]``."""
    check_klein(np.array([a.k1, a.k2]), p)

    def func(q):
        k = s_map(q, p)
        _, _, t = step_coefficients(k, p)
        return (q / k) * t * a(k)

    return AmplitudeProfile(s_map(a.k2, p), s_map(a.k1, p), func,
                            f"transmitted[{a.label}]")


# -- branches ----------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    """``int_lo^hi g(k) exp(i(p(k) x1 - E(k) x0)) dk`` for one plane-wave family.

    ``coeff`` returns both spinor components of ``g``; ``dp``/``dE`` are
    the k-derivatives used for ray positions and far-field tails.
    """

    lo: float
    hi: float
    coeff: Callable
    p: Callable
    E: Callable
    dp: Callable
    dE: Callable
    name: str = ""

    def discretize(self, rule: QuadratureRule):
        k, w = rule.mapped(self.lo, self.hi)
        g1, g2 = self.coeff(k)
        return (np.asarray(self.p(k), dtype=float), np.asarray(self.E(k), dtype=float),
                w * g1, w * g2)

    def samples(self, n: int = 65) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)

    def ray_velocity(self, k):
        return self.dE(k) / self.dp(k)

    def kspace_norm_sq(self, order: int = 256) -> float:
        """Plancherel: ``int |psi|^2 dx = 2 pi int |g|^2 / |dp/dk| dk``."""
        k, w = gauss_legendre(order).mapped(self.lo, self.hi)
        g1, g2 = self.coeff(k)
        dens = (np.abs(g1) ** 2 + np.abs(g2) ** 2) / np.abs(self.dp(k))
        return float(2.0 * math.pi * np.sum(w * dens))

    def endpoint_terms(self):
        """``(k_e, sign_e, |g_e|^2)`` for both ends of the interval."""
        ks = np.array([self.lo, self.hi])
        g1, g2 = self.coeff(ks)
        mag = np.abs(g1) ** 2 + np.abs(g2) ** 2
        return [(self.lo, -1.0, float(mag[0])), (self.hi, 1.0, float(mag[1]))]


def _dmu_weight(a: AmplitudeProfile, p: PhysicalParams):
    return lambda k: INV_SQRT_2PI * a(k) / (2.0 * omega_bar(k, p))


def free_u_branch(a: AmplitudeProfile, p: PhysicalParams, name="U") -> Branch:
    base = _dmu_weight(a, p)

    def coeff(k):
        b = base(k)
        u1, u2 = u_components(k, p)
        return b * u1, b * u2

    return Branch(a.k1, a.k2, coeff, lambda k: k, lambda k: omega_bar(k, p),
                  lambda k: np.ones_like(k), lambda k: group_velocity(k, p), name)


def free_v_branch(a: AmplitudeProfile, p: PhysicalParams, name="V") -> Branch:
    base = _dmu_weight(a, p)

    def coeff(k):
        b = base(k)
        v1, v2 = v_components(k, p)
        return b * v1, b * v2

    return Branch(a.k1, a.k2, coeff, lambda k: -k, lambda k: -omega_bar(k, p),
                  lambda k: -np.ones_like(k), lambda k: -group_velocity(k, p), name)


def step_branches(a: AmplitudeProfile, p: PhysicalParams):
    """Left (incident, reflected) and right (transmitted) branches of ``U^in[a]``."""
    check_klein(np.array([a.k1, a.k2]), p)
    base = _dmu_weight(a, p)
    incident = free_u_branch(a, p, "incident")

    def refl_coeff(k):
        _, r, _ = step_coefficients(k, p)
        b = base(k) * r
        u1, u2 = u_components(-k, p)
        return b * u1, b * u2

    reflected = Branch(a.k1, a.k2, refl_coeff, lambda k: -k,
                       lambda k: omega_bar(k, p), lambda k: -np.ones_like(k),
                       lambda k: group_velocity(k, p), "reflected")

    def trans_coeff(k):
        q, _, t = step_coefficients(k, p)
        b = base(k) * t
        v1, v2 = v_components(q, p)
        return b * v1, b * v2

    def trans_dp(k):
        q = s_map(k, p)
        return group_velocity(k, p) / group_velocity(q, p)

    transmitted = Branch(a.k1, a.k2, trans_coeff, lambda k: -s_map(k, p),
                         lambda k: omega_bar(k, p), trans_dp,
                         lambda k: group_velocity(k, p), "transmitted")
    return (incident, reflected), (transmitted,)


# -- packets -----------------------------------------------------------------

def _concat(parts):
    p = np.concatenate([x[0] for x in parts])
    E = np.concatenate([x[1] for x in parts])
    c1 = np.ascontiguousarray(np.concatenate([x[2] for x in parts]), dtype=complex)
    c2 = np.ascontiguousarray(np.concatenate([x[3] for x in parts]), dtype=complex)
    return (np.ascontiguousarray(p), np.ascontiguousarray(E), c1, c2)


class Packet:
    """A discretized packet ready for evaluation at spacetime points.

    ``left`` branches apply on ``x1 < 0`` and ``right`` on ``x1 >= 0``; for
    free packets both sides share one branch list.
    """

    def __init__(self, kind: PacketKind, amplitude: AmplitudeProfile,
                 params: PhysicalParams, order: int = DEFAULT_ORDER):
        self.kind = PacketKind(kind)
        self.amplitude = amplitude
        self.params = params
        self.order = int(order)
        if self.kind is PacketKind.FREE_U:
            left = right = (free_u_branch(amplitude, params),)
        elif self.kind is PacketKind.FREE_V:
            left = right = (free_v_branch(amplitude, params),)
        else:
            left, right = step_branches(amplitude, params)
        self.left_branches = left
        self.right_branches = right
        rule = gauss_legendre(self.order)
        self._left = _concat([b.discretize(rule) for b in left])
        self._right = (self._left if right is left
                       else _concat([b.discretize(rule) for b in right]))

    @property
    def split(self) -> bool:
        return self.left_branches is not self.right_branches

    def __repr__(self):
        return (f"Packet({self.kind.value}, {self.amplitude.label}, "
                f"V={self.params.V}, kappa={self.params.kappa}, order={self.order})")

    def with_order(self, order: int) -> "Packet":
        if int(order) == self.order:
            return self
        return Packet(self.kind, self.amplitude, self.params, order)

    def branches(self):
        if self.split:
            return self.left_branches + self.right_branches
        return self.left_branches

    # evaluation

    def evaluate(self, x0, x1):
        """Spinor components at arrays of points (broadcast together)."""
        x0, x1 = np.broadcast_arrays(np.asarray(x0, dtype=float),
                                     np.asarray(x1, dtype=float))
        shape = x0.shape
        x0 = np.ascontiguousarray(x0.ravel())
        x1 = np.ascontiguousarray(x1.ravel())
        if not self.split:
            psi1, psi2 = _kernels.plane_wave_sum(x0, x1, *self._left)
        else:
            psi1 = np.empty(x0.shape, dtype=complex)
            psi2 = np.empty(x0.shape, dtype=complex)
            neg = x1 < 0
            for mask, sums in ((neg, self._left), (~neg, self._right)):
                if mask.any():
                    a, b = _kernels.plane_wave_sum(
                        np.ascontiguousarray(x0[mask]), np.ascontiguousarray(x1[mask]), *sums)
                    psi1[mask] = a
                    psi2[mask] = b
        return psi1.reshape(shape), psi2.reshape(shape)

    def current(self, x0, x1):
        psi1, psi2 = self.evaluate(x0, x1)
        a = psi1.real ** 2 + psi1.imag ** 2
        b = psi2.real ** 2 + psi2.imag ** 2
        return a + b, a - b

    def current_at(self, x0: float, x1: float) -> tuple[float, float]:
        sums = self._left if x1 < 0 else self._right
        return _kernels.current_at(float(x0), float(x1), *sums)

    def spinor(self, pt: SpacetimePoint) -> Spinor:
        a, b = self.evaluate(pt[0], pt[1])
        return Spinor(complex(a), complex(b))

    # geometry

    def norm_sq_kspace(self) -> float:
        """Squared norm from the Fourier amplitude (time independent)."""
        return self.left_branches[0].kspace_norm_sq()

    def p_span(self, side: str) -> float:
        """Range of spatial wave numbers on one side."""
        br = self.left_branches if side == "left" else self.right_branches
        ps = np.concatenate([b.p(b.samples()) for b in br])
        return float(ps.max() - ps.min())

    def phase_range(self, x0max: float, x1max: float) -> float:
        """Upper bound of the k-space phase variation of any branch in the box."""
        best = 0.0
        for b in self.branches():
            k = b.samples(257)
            pr = np.ptp(b.p(k))
            er = np.ptp(b.E(k))
            best = max(best, pr * abs(x1max) + er * abs(x0max))
        return best

    def required_order(self, x0max: float, x1max: float) -> int:
        return order_for_phase(self.phase_range(x0max, x1max), DEFAULT_ORDER)

    def adapted(self, x0max: float, x1max: float) -> "Packet":
        """This packet with at least the order the box needs."""
        n = self.required_order(x0max, x1max)
        return self if n <= self.order else self.with_order(n)

    def ray_hull(self, tau: float) -> tuple[float, float]:
        """Interval swept at time ``tau`` by the classical rays of all branches."""
        los, his = [], []
        sides = ([("left", b) for b in self.left_branches]
                 + [("right", b) for b in self.right_branches]) if self.split else \
            [(None, b) for b in self.left_branches]
        for side, b in sides:
            x = b.ray_velocity(b.samples()) * tau
            lo, hi = float(x.min()), float(x.max())
            if side == "left":
                hi = min(hi, 0.0)
                lo = min(lo, hi)
                if float(x.min()) > 0:
                    continue
            elif side == "right":
                lo = max(lo, 0.0)
                hi = max(hi, lo)
                if float(x.max()) < 0:
                    continue
            los.append(lo)
            his.append(hi)
        if not los:
            return 0.0, 0.0
        return min(los), max(his)

    def body_width(self) -> float:
        """Rough spatial width of the packet body (inverse of the k span)."""
        spans = [np.ptp(b.p(b.samples())) for b in self.branches()]
        return 4.0 / max(min(spans), 1e-12)

    def tail_mass(self, tau: float, edge: float, direction: int) -> float:
        """Leading-order mass beyond ``edge`` (``direction`` +1 right, -1 left).

        The hard edges of the amplitude produce far fields
        ``g_e exp(i phi_e) / (i phi'_e)`` with ``phi' = p'(x - c_e)``; the
        non-oscillating part integrates to ``|g_e|^2 / (p'^2 |edge - c_e|)``.
        """
        br = self.right_branches if direction > 0 else self.left_branches
        total = 0.0
        for b in br:
            for k_e, _, mag in b.endpoint_terms():
                dp = float(b.dp(np.array(k_e)))
                c = float(b.dE(np.array(k_e))) / dp * tau
                dist = (edge - c) * direction
                if dist <= 0:
                    raise WindowTooSmall(
                        f"edge {edge} does not lie beyond the ray {c} of branch {b.name}")
                total += mag / (dp * dp * dist)
        return total


class WindowTooSmall(RuntimeError):
    """Density at the edge of the spatial window is above the floor."""


# -- functional interface ----------------------------------------------------

def converge_packet(packet: Packet, x0, x1, tol: float = 1e-10,
                    max_order: int = MAX_ORDER) -> Packet:
    """Double the order until values at the probe points settle to ``tol``.

    Returns the lowest tested packet whose doubled version agrees within
    ``tol`` at every probe point.
    """
    cur = packet
    a1, a2 = cur.evaluate(x0, x1)
    while True:
        nxt = cur.with_order(2 * cur.order)
        b1, b2 = nxt.evaluate(x0, x1)
        diff = max(np.max(np.abs(a1 - b1), initial=0.0), np.max(np.abs(a2 - b2), initial=0.0))
        if diff <= tol:
            return cur
        if nxt.order >= max_order:
            raise QuadratureNotConverged(
                f"orders {cur.order} and {nxt.order} differ by {diff:.3e} > {tol:.1e}")
        cur, a1, a2 = nxt, b1, b2


def eval_packet(kind, a: AmplitudeProfile, pt: SpacetimePoint,
                quad: QuadratureRule | int | None = None,
                params: PhysicalParams = PhysicalParams(),
                tol: float = 1e-10, adaptive: bool = True) -> Spinor:
    """Value of ``U[a]``, ``V[a]`` or ``U^in[a]`` at one point.

    With ``adaptive`` the order is doubled from the starting rule until
    two consecutive orders agree within ``tol``; otherwise a single
    doubling check is made and :class:`QuadratureNotConverged` raised on
    disagreement.
    """
    n = DEFAULT_ORDER if quad is None else (quad if isinstance(quad, int) else quad.size)
    packet = Packet(kind, a, params, n)
    x0, x1 = np.array([pt[0]]), np.array([pt[1]])
    if adaptive:
        packet = converge_packet(packet, x0, x1, tol)
    else:
        converge_packet(packet, x0, x1, tol, max_order=2 * n)
    return packet.spinor(pt)


def packet_current(kind, a: AmplitudeProfile, pt: SpacetimePoint,
                   quad: QuadratureRule | int | None = None,
                   params: PhysicalParams = PhysicalParams(), **kw) -> CurrentVector:
    s = eval_packet(kind, a, pt, quad, params, **kw)
    a1 = abs(s.c1) ** 2
    b1 = abs(s.c2) ** 2
    return CurrentVector(a1 + b1, a1 - b1)

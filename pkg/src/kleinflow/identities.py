"""Randomized identity checks over the analytic building blocks.

Every check evaluates one algebraic identity on many parameter samples and
reports the largest relative residual.  ``perturb_r`` shifts every
reflection coefficient before the checks run, which lets callers confirm
that a corrupted coefficient is detected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import PhysicalParams, omega_bar, s_map
from .free_modes import u_components, v_components
from .step_modes import NoKleinRegime, step_coefficients

TOLERANCE = 1e-10


@dataclass(frozen=True)
class IdentityResult:
    name: str
    max_residual: float
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_residual) and self.max_residual < self.tolerance)


def _rel(lhs, rhs, scale):
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    denom = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), scale)
    return float(np.max(np.abs(lhs - rhs) / denom))


def _S(v1, v2, w1, w2):
    return np.conj(v1) * w1 + np.conj(v2) * w2


def _L(v1, v2, w1, w2):
    return np.conj(v2) * w1 + np.conj(v1) * w2


def _g1(w1, w2):
    return -w2, w1


def inner_product_checks(k: np.ndarray, p: PhysicalParams) -> list[IdentityResult]:
    """The eight relations between ``u(+-k)``, ``v(+-k)`` under ``S`` and ``L``."""
    kap = p.kappa
    w = omega_bar(k, p)
    u = u_components(k, p)
    um = u_components(-k, p)
    v = v_components(k, p)
    vm = v_components(-k, p)
    n = len(k)
    out = []
    for tag, a, b in (("u", u, um), ("v", v, vm)):
        out.append(IdentityResult(f"S({tag}(k),{tag}(k)) = 2 omega_bar(k)",
                                  _rel(_S(*a, *a), 2 * w, kap), TOLERANCE, n))
        out.append(IdentityResult(f"S({tag}(k),{tag}(-k)) = 2 kappa",
                                  _rel(_S(*a, *b), 2 * kap, kap), TOLERANCE, n))
        out.append(IdentityResult(f"L({tag}(k),g1 {tag}(k)) = 2k",
                                  _rel(_L(*a, *_g1(*a)), 2 * k, w), TOLERANCE, n))
        out.append(IdentityResult(f"L({tag}(k),g1 {tag}(-k)) = 0",
                                  _rel(_L(*a, *_g1(*b)), 0.0, w), TOLERANCE, n))
    return out


def sample_klein(n: int, rng: np.random.Generator, kappa: float = 1.0,
                 V: float | None = None):
    """``n`` pairs ``(k, V)`` strictly inside the Klein window."""
    if V is None:
        Vs = rng.uniform(2.05 * kappa, 10.0 * kappa, n)
    else:
        Vs = np.full(n, float(V))
    kmax = np.sqrt(Vs * Vs - 2 * kappa * Vs)
    ks = kmax * rng.uniform(0.01, 0.99, n)
    return ks, Vs


def step_checks(ks, Vs, kappa: float = 1.0, perturb_r: float = 0.0) -> list[IdentityResult]:
    qs, rs, ts = [], [], []
    for k, V in zip(ks, Vs):
        q, r, t = step_coefficients(k, PhysicalParams(kappa, V))
        qs.append(q)
        rs.append(r + perturb_r)
        ts.append(t)
    q, r, t = np.array(qs), np.array(rs), np.array(ts)
    k = np.asarray(ks)
    V = np.asarray(Vs)
    wk = np.hypot(kappa, k)
    wq = np.hypot(kappa, q)
    n = len(k)
    sq = []
    for kk, VV in zip(k, V):
        pp = PhysicalParams(kappa, VV)
        sq.append(s_map(s_map(kk, pp), pp))
    return [
        IdentityResult("j0 continuity: w(k)(1+r^2) + 2 kappa r = w(q) t^2",
                       _rel(wk * (1 + r * r) + 2 * kappa * r, wq * t * t, kappa), TOLERANCE, n),
        IdentityResult("j1 continuity: k(1-r^2) = q t^2",
                       _rel(k * (1 - r * r), q * t * t, k), TOLERANCE, n),
        IdentityResult("bound -1 < r < 0",
                       0.0 if np.all((r > -1) & (r < 0)) else float("inf"), TOLERANCE, n),
        IdentityResult("bound t < 0",
                       0.0 if np.all(t < 0) else float("inf"), TOLERANCE, n),
        IdentityResult("energy partition: w(k) + w(s(k)) = V",
                       _rel(wk + wq, V, kappa), TOLERANCE, n),
        IdentityResult("involution: s(s(k)) = k", _rel(np.array(sq), k, kappa), TOLERANCE, n),
    ]


def solve_matching(k: float, p: PhysicalParams) -> tuple[complex, complex]:
    """Solve ``u(k) + beta u(-k) = gamma v(q)`` as a real 4x4 system.

    Independent of the closed forms: ``q`` comes from bisection on
    ``omega_bar(q) = V - omega_bar(k)``.
    """
    from scipy.optimize import brentq

    target = p.V - float(omega_bar(k, p))
    q = brentq(lambda x: float(omega_bar(x, p)) - target, 0.0, p.V, xtol=1e-15, rtol=1e-15)
    uk = np.array(u_components(k, p), dtype=complex)
    um = np.array(u_components(-k, p), dtype=complex)
    vq = np.array(v_components(q, p), dtype=complex)
    # unknowns (Re beta, Im beta, Re gamma, Im gamma)
    A = np.zeros((4, 4))
    rhs = np.zeros(4)
    for row in range(2):
        A[2 * row, 0] = um[row].real
        A[2 * row, 1] = -um[row].imag
        A[2 * row, 2] = -vq[row].real
        A[2 * row, 3] = vq[row].imag
        A[2 * row + 1, 0] = um[row].imag
        A[2 * row + 1, 1] = um[row].real
        A[2 * row + 1, 2] = -vq[row].imag
        A[2 * row + 1, 3] = -vq[row].real
        rhs[2 * row] = -uk[row].real
        rhs[2 * row + 1] = -uk[row].imag
    x = np.linalg.solve(A, rhs)
    return complex(x[0], x[1]), complex(x[2], x[3])


def matching_checks(ks, Vs, kappa: float = 1.0, perturb_r: float = 0.0) -> list[IdentityResult]:
    dr, dt = [], []
    for k, V in zip(ks, Vs):
        p = PhysicalParams(kappa, V)
        _, r, t = step_coefficients(k, p)
        beta, gamma = solve_matching(k, p)
        dr.append(abs(beta - (r + perturb_r)) / max(1.0, abs(r)))
        dt.append(abs(gamma - t) / max(1.0, abs(t)))
    n = len(ks)
    return [IdentityResult("matching oracle: r closed form = linear solve", max(dr), TOLERANCE, n),
            IdentityResult("matching oracle: t closed form = linear solve", max(dt), TOLERANCE, n)]


def run_identity_suite(samples: int = 128, seed: int = 0, kappa: float = 1.0,
                       V: float | None = None, perturb_r: float = 0.0,
                       matching_samples: int = 50) -> list[IdentityResult]:
    """Run all identity groups; ``V`` fixes the step height for step checks."""
    p = PhysicalParams(kappa, 0.0 if V is None else V)
    if V is not None and not p.klein:
        raise NoKleinRegime(f"V > 2*kappa violated: V={V}, kappa={kappa}")
    rng = np.random.default_rng(seed)
    k = rng.uniform(-3 * kappa, 3 * kappa, samples)
    results = inner_product_checks(k, p)
    ks, Vs = sample_klein(samples, rng, kappa, V)
    results += step_checks(ks, Vs, kappa, perturb_r)
    results += matching_checks(ks[:matching_samples], Vs[:matching_samples], kappa, perturb_r)
    return results

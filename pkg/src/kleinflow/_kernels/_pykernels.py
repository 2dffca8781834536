"""Pure numpy plane-wave summation, used when the compiled module is absent."""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 21  # complex entries per temporary block


def plane_wave_sum(x0, x1, p, E, c1, c2):
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    npts = x0.shape[0]
    psi1 = np.empty(npts, dtype=np.complex128)
    psi2 = np.empty(npts, dtype=np.complex128)
    step = max(1, _CHUNK // max(1, len(p)))
    for s in range(0, npts, step):
        sl = slice(s, s + step)
        ph = np.exp(1j * (np.outer(x1[sl], p) - np.outer(x0[sl], E)))
        psi1[sl] = ph @ c1
        psi2[sl] = ph @ c2
    return psi1, psi2


def current_at(x0, x1, p, E, c1, c2):
    ph = np.exp(1j * (p * x1 - E * x0))
    a = ph @ c1
    b = ph @ c2
    a = a.real * a.real + a.imag * a.imag
    b = b.real * b.real + b.imag * b.imag
    return float(a + b), float(a - b)

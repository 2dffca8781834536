import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from kleinflow import _kernels

rng = np.random.default_rng(11)
N = 300
P = rng.uniform(-3, 3, N)
E = rng.uniform(1, 3, N)
C1 = rng.normal(size=N) + 1j * rng.normal(size=N)
C2 = rng.normal(size=N) + 1j * rng.normal(size=N)
X0 = rng.uniform(-200, 200, 500)
X1 = rng.uniform(-200, 200, 500)


def _reference():
    ph = np.exp(1j * (np.outer(X1, P) - np.outer(X0, E)))
    return ph @ C1, ph @ C2


def test_python_backend_matches_reference():
    a, b = _kernels.python_backend.plane_wave_sum(X0, X1, P, E, C1, C2)
    ra, rb = _reference()
    assert np.max(np.abs(a - ra)) < 1e-11
    assert np.max(np.abs(b - rb)) < 1e-11


@pytest.mark.skipif(_kernels.compiled_backend is None, reason="extension not built")
def test_backends_agree():
    py = _kernels.python_backend
    cy = _kernels.compiled_backend
    a, b = py.plane_wave_sum(X0, X1, P, E, C1, C2)
    c, d = cy.plane_wave_sum(X0, X1, P, E, C1, C2)
    assert np.max(np.abs(a - c)) < 1e-11
    assert np.max(np.abs(b - d)) < 1e-11
    for i in range(20):
        j_py = py.current_at(X0[i], X1[i], P, E, C1, C2)
        j_cy = cy.current_at(X0[i], X1[i], P, E, C1, C2)
        assert j_py == pytest.approx(j_cy, rel=1e-10, abs=1e-9)


def test_current_at_consistent_with_sum():
    a, b = _kernels.plane_wave_sum(X0[:5], X1[:5], P, E, C1, C2)
    for i in range(5):
        j0, j1 = _kernels.current_at(X0[i], X1[i], P, E, C1, C2)
        assert j0 == pytest.approx(abs(a[i]) ** 2 + abs(b[i]) ** 2, rel=1e-10)
        assert j1 == pytest.approx(abs(a[i]) ** 2 - abs(b[i]) ** 2, rel=1e-9, abs=1e-9)


def test_empty_inputs():
    a, b = _kernels.plane_wave_sum(np.empty(0), np.empty(0), P, E, C1, C2)
    assert a.shape == (0,) and b.shape == (0,)


def test_fallback_selected_by_environment():
    code = "from kleinflow import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, KLEINFLOW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")
    assert importlib.import_module("kleinflow._kernels._pykernels") is _kernels.python_backend

import math

import numpy as np
import pytest

from kleinflow.quadrature import composite_nodes, gauss_legendre, order_for_phase


def test_polynomial_exactness():
    rule = gauss_legendre(8)
    assert rule.order == 15
    for d in range(16):
        exact = (1 - (-1) ** (d + 1)) / (d + 1)
        assert rule.integrate(lambda x: x ** d) == pytest.approx(exact, abs=1e-14)


def test_mapped_interval():
    rule = gauss_legendre(32)
    assert rule.integrate(np.exp, 0.0, 2.0) == pytest.approx(math.e ** 2 - 1, rel=1e-14)
    assert rule.doubled().size == 64


def test_rule_is_cached_and_readonly():
    a, b = gauss_legendre(128), gauss_legendre(128)
    assert a.nodes is b.nodes
    with pytest.raises(ValueError):
        a.nodes[0] = 0.0
    with pytest.raises(ValueError):
        gauss_legendre(0)


@pytest.mark.parametrize("phi", [10.0, 200.0, 1500.0])
def test_order_for_phase_resolves_oscillation(phi):
    n = order_for_phase(phi, minimum=1)
    assert n % 32 == 0
    # int_{-1}^{1} exp(i phi x / 2) dx
    got = gauss_legendre(n).integrate(lambda x: np.exp(0.5j * phi * x))
    exact = 2 * math.sin(phi / 2) / (phi / 2)
    assert abs(got - exact) < 1e-12


def test_order_minimum():
    assert order_for_phase(0.0) == 256


def test_composite_nodes():
    x, w = composite_nodes([-10.0, 0.0, 25.0], 3.0, 16)
    assert np.sum(w) == pytest.approx(35.0, rel=1e-14)
    assert np.sum(w * np.cos(x)) == pytest.approx(math.sin(25) - math.sin(-10), abs=1e-13)
    x, w = composite_nodes([1.0, 1.0], 1.0)
    assert x.size == 0

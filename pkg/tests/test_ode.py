import numpy as np
import pytest
from hypothesis import given, strategies as st

from halfscat.errors import NonFinite, ZeroK
from halfscat.ode import (integrate_jost, integrate_phi, integrate_phi_dk, integrate_theta, phi_end,
                          phi_end_lambda, prufer_angle, wronskian)
from halfscat.potential import Potential


def test_free_phi_and_theta(zero):
    k = 2.0
    p = integrate_phi(zero, k)
    t = integrate_theta(zero, k)
    assert np.max(np.abs(p.y - np.sin(k * p.x) / k)) < 1e-12
    assert np.max(np.abs(t.y - np.cos(k * t.x))) < 1e-12


@given(st.floats(0.5, 5.0), st.floats(-3, 3), st.floats(-3, 3))
def test_constant_potential_closed_form(c, kr, ki):
    q = Potential.constant(c)
    k = complex(kr, ki)
    kap = np.sqrt(k * k - c)
    p = integrate_phi(q, k)
    y, dy = p.at_end()
    assert abs(y - np.sin(kap) / kap) < 1e-9 * max(1, abs(y))
    assert abs(dy - np.cos(kap)) < 1e-9 * max(1, abs(dy))


@given(st.floats(0.1, 20), st.floats(-2, 2))
def test_wronskian_is_one(kr, ki, ):
    q = Potential.from_function(lambda x: 3 * np.sin(5 * x) - 1)
    k = complex(kr, ki)
    w = wronskian(integrate_theta(q, k), integrate_phi(q, k))
    assert np.max(np.abs(w - 1)) < 1e-8


def test_jost_solution_matches_exponential_at_one(bump):
    k = 3.0 + 0.5j
    f = integrate_jost(bump, k)
    assert f.x[0] == 0.0 and f.x[-1] == 1.0
    assert abs(f.y[-1] - np.exp(1j * k)) < 1e-14
    assert abs(f.dy[-1] - 1j * k * np.exp(1j * k)) < 1e-13


def test_jost_needs_nonzero_k(bump):
    with pytest.raises(ZeroK):
        integrate_jost(bump, 0.0)


def test_k_derivative_matches_finite_difference(bump):
    k, h = 2.3 + 0.2j, 1e-5
    _, dk = integrate_phi_dk(bump, k)
    fd = (integrate_phi(bump, k + h).y[-1] - integrate_phi(bump, k - h).y[-1]) / (2 * h)
    assert abs(dk.y[-1] - fd) < 1e-8


def test_batch_agrees_with_path(bump):
    ks = np.array([0.7, 2.0 + 1j, 5.5])
    y, dy = phi_end(bump, ks)
    for i, k in enumerate(ks):
        w = integrate_phi(bump, k)
        assert abs(y[i] - w.y[-1]) < 1e-14
        assert abs(dy[i] - w.dy[-1]) < 1e-13
    yl, _ = phi_end_lambda(bump, [4.0])
    assert abs(yl[0] - integrate_phi(bump, 2.0).y[-1]) < 1e-14


def test_prufer_angle_counts_zeros(zero):
    # for q = 0 the angle of phi' + i phi at lambda = k^2 and x = 1 is exactly... k=3pi/2 -> between pi and 2 pi
    lam = (1.5 * np.pi) ** 2
    a = prufer_angle(zero, lam)
    assert np.pi < a < 2 * np.pi
    # with scale k the angle is k itself
    assert prufer_angle(zero, 7.3**2, 7.3) == pytest.approx(7.3, abs=1e-10)


def test_overflow_raises():
    q = Potential.constant(1e6)
    with pytest.raises(NonFinite):
        integrate_phi(q, 0.0)

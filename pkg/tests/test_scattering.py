import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from halfscat.errors import NearZeroJost, PoleHit
from halfscat.ode import integrate_jost
from halfscat.potential import Potential, cosine_transform, mean
from halfscat.scattering import (blaschke, bound_states, has_zero_at_origin, jost, jost_values,
                                 negative_eigenvalue_count, norming_constant, phase_function,
                                 phase_shift, psi_first_order, smatrix)


def psi_well(c, k):
    """Jost function of q = c on [0, 1] (closed form)."""
    k = complex(k)
    kap = np.sqrt(k * k - c)
    return np.exp(1j * k) * (np.cos(kap) - 1j * k * np.sin(kap) / kap)


def test_free_theory(zero):
    ks = np.linspace(0.5, 50, 40)
    assert np.max(np.abs(jost_values(zero, ks) - 1)) < 1e-10
    assert np.max(np.abs(smatrix(zero, ks) - 1)) < 1e-10
    assert np.max(np.abs(phase_shift(zero, ks))) < 1e-10


@given(st.floats(-10, 10), st.floats(0.2, 15), st.floats(-2, 2))
def test_jost_of_constant_well(c, kr, ki):
    q = Potential.constant(c)
    k = complex(kr, ki)
    assert abs(jost(q, k).psi - psi_well(c, k)) < 1e-9 * max(1, abs(psi_well(c, k)))


def test_jost_equals_jost_solution_at_zero(bump):
    k = 2.2 + 0.3j
    assert abs(integrate_jost(bump, k).y[0] - jost(bump, k).psi) < 1e-12


def test_dpsi_dk_finite_difference(bump):
    k, h = 1.7 - 0.4j, 1e-5
    d = jost(bump, k, derivative=True).dpsi_dk
    fd = (jost(bump, k + h).psi - jost(bump, k - h).psi) / (2 * h)
    assert abs(d - fd) < 1e-8


@given(st.floats(0.3, 40))
def test_unitarity_and_symmetry(k):
    q = Potential.from_function(lambda x: 4 * np.sin(3 * x) - 2 * x)
    assert abs(abs(smatrix(q, k)) - 1) < 1e-10
    # real potential: psi(-conj k) = conj psi(k)
    z = complex(k, 0.3)
    assert abs(jost(q, -z.conjugate()).psi - jost(q, z).psi.conjugate()) < 1e-10


def test_phase_shift_matches_phase_function(bump):
    ks = np.linspace(0.5, 30, 120)
    xi = phase_shift(bump, ks)
    xi2 = np.array([k - phase_function(bump, k) for k in ks])
    assert np.max(np.abs(xi - xi2)) < 1e-10
    assert np.max(np.abs(np.exp(-2j * xi) - smatrix(bump, ks))) < 1e-10


def test_levinson_count():
    # two bound states for q = -30, so xi(0+) -> -2 pi
    q = Potential.constant(-30.0)
    ks = np.concatenate([np.geomspace(1e-3, 0.5, 40), np.linspace(0.55, 60, 300)])
    xi = phase_shift(q, ks)
    assert xi[0] == pytest.approx(-2 * np.pi, abs=0.05)


def well_bound_states(c):
    # psi(ir) = 0 <=> kappa cot kappa = -r with kappa^2 = c - r^2
    def g(r):
        kap = math.sqrt(c - r * r)
        return kap * math.cos(kap) + r * math.sin(kap)
    rs = np.linspace(1e-9, math.sqrt(c) - 1e-12, 20001)
    v = np.array([g(r) for r in rs])
    idx = np.nonzero(np.signbit(v[1:]) != np.signbit(v[:-1]))[0]
    return sorted((brentq(g, rs[i], rs[i + 1], xtol=1e-15) for i in idx), reverse=True)


@pytest.mark.parametrize("c", [2.0, 20.0, 30.0])
def test_bound_states_of_wells(c):
    q = Potential.constant(-c)
    bs = bound_states(q)
    exact = well_bound_states(c)
    assert bs.m == len(exact) == negative_eigenvalue_count(q)
    assert np.allclose(np.abs(bs.ks), exact, atol=1e-8)


def test_bound_state_count_large_box():
    # finite differences on [0, 30] with Dirichlet ends
    q = Potential.constant(-20.0)
    n = 2**15
    h = 30.0 / (n + 1)
    x = h * np.arange(1, n + 1)
    d = 2 / h**2 + q(x)
    ev = eigh_tridiagonal(d, -np.ones(n - 1) / h**2, select="v", select_range=(-1e3, -1e-3),
                          eigvals_only=True)
    bs = bound_states(q)
    assert bs.m == ev.size
    # the jump of q at x = 1 limits the finite-difference energies to O(h)
    assert np.allclose(np.sort(bs.energies), np.sort(ev), atol=1e-2)


def test_norming_constant_by_quadrature():
    c = 20.0
    q = Potential.constant(-c)
    r = well_bound_states(c)[0]
    kap = math.sqrt(c - r * r)
    # f_+(x) = e^{-r}(cos kap(x-1) - (r/kap) sin kap(x-1)) on [0,1], e^{-rx} beyond
    f = lambda x: mp.e ** (-r) * (mp.cos(kap * (x - 1)) - r / kap * mp.sin(kap * (x - 1)))
    exact = float(mp.quad(lambda x: f(x) ** 2, [0, 1]) + mp.e ** (-2 * r) / (2 * r))
    assert norming_constant(q, 1j * r) == pytest.approx(exact, rel=1e-8)
    assert bound_states(q).norming[0] == pytest.approx(exact, rel=1e-8)


def test_large_k_asymptotics(bump):
    # S - 1 - (q0 - qc(k))/(ik) = O(1/k^2)
    q0 = mean(bump)
    ks = np.array([20.0, 40.0, 80.0])
    err = np.array([abs(smatrix(bump, k) - 1 - (q0 - cosine_transform(bump, k)) / (1j * k)) for k in ks])
    assert np.all(err * ks**2 < 1.0)
    assert abs(jost(bump, 60.0).psi - psi_first_order(bump, 60.0)) < 1e-3 / 60


def test_zero_at_origin():
    # q = -pi^2/4 has a zero-energy resonance: phi'(1, 0) = cos(pi/2) = 0
    assert has_zero_at_origin(Potential.constant(-np.pi**2 / 4))
    assert not has_zero_at_origin(Potential.constant(1.0))


def test_blaschke():
    ks = [2j, 0.5j]
    z = 1.3 + 0.2j
    assert blaschke(ks, z) == pytest.approx((z + 2j) / (z - 2j) * (z + 0.5j) / (z - 0.5j))
    assert abs(abs(blaschke(ks, 3.1)) - 1) < 1e-14
    with pytest.raises(PoleHit):
        blaschke(ks, 2j)


def test_near_zero_jost():
    # bound state at the real threshold is not reachable; check the guard directly
    q = Potential.constant(-np.pi**2 / 4)
    with pytest.raises(NearZeroJost):
        import halfscat.scattering as sc
        old = sc.NEAR_ZERO_JOST
        sc.NEAR_ZERO_JOST = 10.0
        try:
            smatrix(q, 1.0)
        finally:
            sc.NEAR_ZERO_JOST = old

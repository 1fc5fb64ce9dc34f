import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from halfscat.potential import Potential, cosine_transform, fourier_transform, mean

coeffs = st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=5)


def trig(cs, grid_n=513):
    return Potential.from_function(lambda x: sum(c * np.cos(np.pi * j * x) for j, c in enumerate(cs)), grid_n)


def test_zero_and_constant():
    assert Potential.zero().sup_norm() == 0.0
    q = Potential.constant(0.3)
    assert q.sigma0 == pytest.approx(0.3, abs=1e-15)
    assert mean(q) == pytest.approx(0.3, abs=1e-15)


def test_values_read_only():
    q = Potential.constant(1.0, 17)
    with pytest.raises(ValueError):
        q.values[0] = 2.0


def test_evaluation_outside_support_is_zero():
    q = Potential.constant(2.0, 33)
    assert q(-0.1) == 0.0 and q(1.5) == 0.0
    assert q(0.5) == 2.0


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        Potential([1.0])
    with pytest.raises(ValueError):
        Potential([0.0, np.nan, 1.0])


def test_norms_of_linear_potential():
    q = Potential.from_function(lambda x: x, 1025)
    assert q.l1_norm() == pytest.approx(0.5, rel=1e-12)
    assert q.l2_norm() == pytest.approx(1 / math.sqrt(3), rel=1e-6)
    assert q.sup_norm() == 1.0


def test_is_even():
    assert Potential.from_function(lambda x: np.cos(2 * np.pi * x)).is_even()
    assert not Potential.from_function(lambda x: x).is_even()


def test_json_roundtrip():
    q = trig([0.1, -0.4, 0.25])
    assert Potential.from_json(q.to_json()) == q
    with pytest.raises(ValueError):
        Potential.from_dict({"grid_n": 3, "values": [0.0, 1.0]})


def test_grid_mismatch():
    with pytest.raises(ValueError):
        Potential.zero(17) + Potential.zero(33)


def test_cosine_transform_closed_form():
    # int_0^1 cos(pi x) cos(2 k x) dx for k = 1.3
    k = 1.3
    q = Potential.from_function(lambda x: np.cos(np.pi * x), 4097)
    a, b = np.pi + 2 * k, np.pi - 2 * k
    exact = 0.5 * (math.sin(a) / a + math.sin(b) / b)
    # piecewise-linear interpolation limits the match to O(h^2)
    assert cosine_transform(q, k) == pytest.approx(exact, abs=1e-7)


def test_fourier_transform_of_constant():
    k = 2.1
    q = Potential.constant(1.0)
    exact = (np.exp(2j * k) - 1) / (2j * k)
    assert abs(fourier_transform(q, k) - exact) < 1e-7
    assert fourier_transform(q, 0.0) == pytest.approx(1.0)


@given(coeffs, coeffs, st.floats(-3, 3), st.floats(0.1, 30))
def test_cosine_transform_linear(c1, c2, a, k):
    q1, q2 = trig(c1), trig(c2)
    lhs = cosine_transform(q1 + a * q2, k)
    rhs = cosine_transform(q1, k) + a * cosine_transform(q2, k)
    assert abs(lhs - rhs) < 1e-12 * (1 + abs(a)) * 10


@given(coeffs, st.floats(0.0, 50))
def test_cosine_transform_bounded_by_l1(cs, k):
    q = trig(cs)
    assert abs(cosine_transform(q, k)) <= q.l1_norm() + 1e-9


@given(coeffs)
def test_arithmetic(cs):
    q = trig(cs)
    assert (q - q).sup_norm() == 0.0
    assert (2 * q).sigma0 == pytest.approx(2 * q.sigma0)
    assert (-q) == q * -1

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import hermite_e as He

from wigner_moments.errors import DomainError, InvalidArgumentError
from wigner_moments.hermite import (HermiteAccuracyWarning, HermiteBasisParams, basis_eval, gauss_hermite,
                                    hermite_eval, hermite_eval_all, hermite_roots)


def test_small_orders():
    assert hermite_eval(0, 1.7) == 1.0
    for x in (-2.0, 0.0, 3.0):
        assert hermite_eval(1, x) == x
    assert hermite_eval(3, 2.0) == 2.0
    assert hermite_eval(-1, 0.3) == 0.0


@given(st.integers(0, 25), st.floats(-6, 6))
def test_eval_matches_numpy(n, x):
    ref = He.hermeval(x, [0] * n + [1])
    assert hermite_eval(n, x) == pytest.approx(ref, rel=1e-10, abs=1e-10 * math.factorial(n) ** 0.5)


def test_eval_all_stacks_orders():
    x = np.linspace(-3, 3, 7)
    table = hermite_eval_all(8, x)
    for n in range(9):
        np.testing.assert_allclose(table[n], hermite_eval(n, x), rtol=1e-14, atol=1e-12)


def test_overflow_is_clamped_with_warning():
    with pytest.warns(HermiteAccuracyWarning):
        value = hermite_eval(200, 1e3)
    assert abs(value) <= 1e300


def test_roots_known_values():
    np.testing.assert_array_equal(hermite_roots(1), [0.0])
    np.testing.assert_allclose(hermite_roots(2), [-1.0, 1.0], atol=1e-15)
    a, b = math.sqrt(3 + math.sqrt(6)), math.sqrt(3 - math.sqrt(6))
    np.testing.assert_allclose(hermite_roots(4), [-a, -b, b, a], rtol=1e-14)


@pytest.mark.parametrize("n", list(range(1, 65)))
def test_roots_residual_order_symmetry(n):
    r = hermite_roots(n)
    assert len(r) == n
    assert np.all(np.diff(r) > 0)
    np.testing.assert_array_equal(r, -r[::-1])
    # scale: largest monomial term |c_k r^k| at each root (the size of the
    # cancelling terms, which is what limits any floating-point evaluation)
    coeffs = np.abs(He.herme2poly([0] * n + [1]))
    scale = np.array([np.max(coeffs * np.abs(x) ** np.arange(n + 1)) for x in r])
    assert np.all(np.abs(hermite_eval(n, r)) <= 1e-10 * scale)


def test_roots_against_numpy_oracle():
    for n in (3, 7, 20, 40):
        nodes, _ = He.hermegauss(n)
        np.testing.assert_allclose(hermite_roots(n), np.sort(nodes), rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("bad", [0, 65, -1, 2.5])
def test_root_order_range(bad):
    with pytest.raises(InvalidArgumentError):
        hermite_roots(bad)


def test_orthogonality():
    for l in range(11):
        for n in range(11):
            nodes, weights = gauss_hermite(l + n + 2)
            val = np.sum(weights * hermite_eval(l, nodes) * hermite_eval(n, nodes))
            ref = math.factorial(l) * math.sqrt(2 * math.pi) if l == n else 0.0
            assert val == pytest.approx(ref, rel=1e-10, abs=1e-10 * math.factorial(max(l, n)))


def test_gauss_weights_match_numpy():
    for n in (5, 12, 30):
        nodes, weights = gauss_hermite(n)
        ref_nodes, ref_weights = He.hermegauss(n)
        order = np.argsort(ref_nodes)
        np.testing.assert_allclose(weights, ref_weights[order], rtol=1e-10)


def test_differential_relation():
    x = np.linspace(-3.5, 3.5, 20)
    h = 1e-5
    for n in range(8):
        g = lambda y: hermite_eval(n, y) * np.exp(-y * y / 2)  # noqa: E731
        fd = (g(x + h) - g(x - h)) / (2 * h)
        np.testing.assert_allclose(fd, -hermite_eval(n + 1, x) * np.exp(-x * x / 2), atol=1e-6)


def test_basis_values():
    assert basis_eval(HermiteBasisParams(1.0, 0.0), 0, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    p3 = HermiteBasisParams(1.0, (0.0, 0.0, 0.0))
    assert basis_eval(p3, (0, 0, 0), (0.0, 0.0, 0.0)) == pytest.approx((2 * math.pi) ** -1.5)
    assert basis_eval(p3, (1, -1, 0), (0.3, 0.1, 0.2)) == 0.0


def test_basis_rejects_bad_temperature():
    with pytest.raises(DomainError):
        HermiteBasisParams(0.0, (0.0,))


@given(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)), st.integers(0, 2),
       st.floats(0.3, 3.0), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_derivative_shift_relation(alpha, j, T, v):
    params = HermiteBasisParams(T, (0.2, -0.1, 0.4))
    v = np.array(v)
    h = 1e-5 * math.sqrt(T)
    e = np.zeros(3)
    e[j] = h
    fd = (basis_eval(params, alpha, v + e) - basis_eval(params, alpha, v - e)) / (2 * h)
    up = list(alpha)
    up[j] += 1
    exact = -basis_eval(params, up, v)
    scale = max(1.0, abs(exact)) * T ** (-(sum(alpha) + 4) / 2)
    assert fd == pytest.approx(exact, abs=1e-6 * scale)


def test_no_warning_in_normal_range():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hermite_eval(64, np.linspace(-12, 12, 50))

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wigner_moments.assembly import assemble_1d, assemble_3d, convection_matrix_1d
from wigner_moments.errors import InvalidArgumentError
from wigner_moments.hermite import hermite_roots
from wigner_moments.indexing import index_set_size
from wigner_moments.spectral import (ROOT_MULTIPLICITIES, certify, match_multisets, predicted_spectrum_1d,
                                     predicted_spectrum_3d)
from wigner_moments.state import MomentState1D, maxwellian_state, random_admissible_state


def unit_vector(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def system_1d(state, regularized=True):
    return assemble_1d(state.order, state, np.zeros(state.order + 2), 1.0, 1.0, regularized)


def test_predicted_1d_examples():
    a, b = math.sqrt(3 + math.sqrt(6)), math.sqrt(3 - math.sqrt(6))
    np.testing.assert_allclose(predicted_spectrum_1d(3, 0.0, 1.0), [-a, -b, b, a], rtol=1e-14)
    p = predicted_spectrum_1d(6, 0.7, 2.0)
    np.testing.assert_allclose(p - 0.7, -(p - 0.7)[::-1], atol=1e-14)
    with pytest.raises(InvalidArgumentError):
        predicted_spectrum_1d(3, 0.0, 0.0)


def test_predicted_3d_counts_and_values():
    for M in ROOT_MULTIPLICITIES:
        p = predicted_spectrum_3d(M, (0, 0, 0), 1.0, (0, 0, 1))
        assert len(p) == index_set_size(M)
        distinct = set(np.round(p, 12))
        expected = set(np.round(np.concatenate([hermite_roots(m) for m in range(1, M + 2)]), 12))
        assert distinct == expected
    with pytest.raises(InvalidArgumentError):
        predicted_spectrum_3d(9, (0, 0, 0), 1.0, (1, 0, 0))
    with pytest.raises(InvalidArgumentError):
        predicted_spectrum_3d(3, (0, 0, 0), 1.0, (1, 1, 0))


@pytest.mark.parametrize("M", sorted(ROOT_MULTIPLICITIES))
def test_frozen_multiplicities_match_eigensolves(M, rng):
    samples = 3 if M <= 6 else 1
    for _ in range(samples):
        s = random_admissible_state(M, rng, dimension=3)
        sysm = assemble_3d(M, s, lambda lam: 0.0, None, 1.0, 1.0)
        n = unit_vector(rng)
        report = certify(sysm, n)
        assert report.max_abs_deviation <= 1e-8 * (1 + math.sqrt(s.temperature))
        assert report.max_imag < 1e-8


def test_certify_1d_report(rng):
    for M in (3, 5, 8):
        s = random_admissible_state(M, rng)
        r = certify(system_1d(s))
        assert r.hyperbolic
        assert r.max_abs_deviation <= 1e-9 * (abs(s.u) + math.sqrt(s.temperature))
        assert np.all(np.diff(r.eigenvalues) >= 0)
        rec = r.to_json(order=M)
        assert '"hyperbolic": true' in rec


def test_maxwellian_grad_equals_regularized():
    for M in range(3, 8):
        s = maxwellian_state(M, 1.3, 0.2, 0.7)
        g = np.sort(np.linalg.eigvals(convection_matrix_1d(s.as_vector(), False)).real)
        r = np.sort(np.linalg.eigvals(convection_matrix_1d(s.as_vector(), True)).real)
        np.testing.assert_allclose(g, r, atol=1e-12)


def test_grad_system_can_lose_hyperbolicity():
    s = MomentState1D(3, 1.0, 0.0, 0.5, (2.0,))
    assert not certify(system_1d(s, regularized=False)).hyperbolic
    assert certify(system_1d(s)).hyperbolic


def test_certify_needs_state_and_direction(rng):
    s = random_admissible_state(3, rng, dimension=3)
    sysm = assemble_3d(3, s, lambda lam: 0.0, None, 1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        certify(sysm)


@given(st.integers(3, 7), st.integers(0, 2**32 - 1), st.floats(-5, 5))
def test_shift_covariance(M, seed, shift):
    s = random_admissible_state(M, np.random.default_rng(seed))
    t = MomentState1D(M, s.rho, s.u + shift, s.half_pressure, s.coeffs)
    a = np.sort(np.linalg.eigvals(convection_matrix_1d(s.as_vector())).real)
    b = np.sort(np.linalg.eigvals(convection_matrix_1d(t.as_vector())).real)
    np.testing.assert_allclose(b, a + shift, atol=1e-10 * (1 + abs(s.u) + abs(shift)))


@given(st.integers(3, 7), st.integers(0, 2**32 - 1), st.floats(0.2, 5))
def test_temperature_scaling_covariance(M, seed, sigma):
    s = random_admissible_state(M, np.random.default_rng(seed))
    # f_n scales like T^(n/2) so that the reduced state is unchanged
    coeffs = tuple(c * sigma**n for n, c in zip(range(3, M + 1), s.coeffs))
    t = MomentState1D(M, s.rho, s.u, s.half_pressure * sigma**2, coeffs)
    a = np.sort(np.linalg.eigvals(convection_matrix_1d(s.as_vector())).real) - s.u
    b = np.sort(np.linalg.eigvals(convection_matrix_1d(t.as_vector())).real) - s.u
    np.testing.assert_allclose(b, sigma * a, atol=1e-9 * sigma * (1 + np.abs(a).max()))


def test_rotation_invariance_at_rest(rng):
    s = random_admissible_state(4, rng, dimension=3)
    s = type(s)(4, s.rho, (0, 0, 0), s.pressure, s.coeffs)
    sysm = assemble_3d(4, s, lambda lam: 0.0, None, 1.0, 1.0)
    p1 = predicted_spectrum_3d(4, s.u, s.temperature, unit_vector(rng))
    p2 = predicted_spectrum_3d(4, s.u, s.temperature, unit_vector(rng))
    np.testing.assert_allclose(p1, p2)
    assert certify(sysm, unit_vector(rng)).max_abs_deviation < 1e-8


def test_match_multisets():
    assert match_multisets([1.0, 2.0, 2.0], [2.0, 1.0, 2.0]) == 0.0
    assert match_multisets([1.0, 3.0], [1.0, 2.0]) == 1.0

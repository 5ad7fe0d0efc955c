import math

import numpy as np
import pytest

from printed_matrices import errata_A, printed_A, printed_G
from wigner_moments.assembly import (assemble_1d, assemble_3d, convection_matrices_3d, convection_matrix_1d,
                                     wigner_coefficient, wigner_source_column)
from wigner_moments.errors import InadmissibleStateError, UnsupportedOrderError
from wigner_moments.indexing import MultiIndex, enumerate_index_set, unit
from wigner_moments.potential import bump_potential, harmonic_potential
from wigner_moments.spectral import match_multisets, predicted_spectrum_1d
from wigner_moments.state import MomentState1D, MomentState3D, maxwellian_state, random_admissible_state


def ones(_lam):
    return 1.0


def structural_power_is_empty(G, power):
    pattern = (G != 0).astype(int)
    acc = np.eye(len(G), dtype=int)
    for _ in range(power):
        acc = np.minimum(acc @ pattern, 1)
    return not acc.any()


def theorem_deviation(A, state):
    eig = np.linalg.eigvals(A)
    return match_multisets(eig, predicted_spectrum_1d(state.order, state.u, state.temperature))


def random_pot_derivs(rng, M):
    return rng.normal(size=M + 2)


# ---------------------------------------------------------------- 1D vs reference matrices

@pytest.mark.parametrize("M", [3, 4, 5, 6])
def test_reference_matrices(M, rng):
    for _ in range(100):
        s = random_admissible_state(M, rng, spread=0.3)
        f = {n: s.coefficient(n) for n in range(3, M + 1)}
        dV = random_pot_derivs(rng, M)
        tau, hbar = rng.uniform(0.1, 10), rng.uniform(0, 2)
        sysm = assemble_1d(M, s, dV, tau, hbar)
        ref = printed_A(M, s.rho, s.u, s.pressure, f)
        errata = errata_A(M, s.rho, s.u, s.pressure, f)
        mask = np.ones_like(ref, dtype=bool)
        for (i, j), value in errata.items():
            mask[i, j] = False
            assert sysm.A[i, j] == pytest.approx(value, rel=1e-13, abs=1e-13)
        np.testing.assert_allclose(sysm.A[mask], ref[mask], rtol=0, atol=1e-13 * max(1, np.abs(ref).max()))
        G_ref = printed_G(M, s.rho, dV[1], dV[3], dV[5] if M >= 5 else 0.0, tau, hbar)
        np.testing.assert_allclose(sysm.G, G_ref, rtol=0, atol=1e-13 * max(1, np.abs(G_ref).max()))


@pytest.mark.parametrize("M", [3, 4, 5, 6])
def test_each_erratum_is_needed_for_real_spectrum(M, rng):
    """Substituting any single printed value back breaks the Hermite-root spectrum."""
    s = random_admissible_state(M, rng, spread=0.3)
    s = MomentState1D(M, s.rho, s.u, s.half_pressure, tuple(0.2 + abs(c) for c in s.coeffs))
    f = {n: s.coefficient(n) for n in range(3, M + 1)}
    A = convection_matrix_1d(s.as_vector())
    assert theorem_deviation(A, s) < 1e-9
    ref = printed_A(M, s.rho, s.u, s.pressure, f)
    for (i, j) in errata_A(M, s.rho, s.u, s.pressure, f):
        B = A.copy()
        B[i, j] = ref[i, j]
        assert theorem_deviation(B, s) > 1e-3, (i, j)


def test_wigner_coefficients():
    assert wigner_coefficient(3, 1.0, 1.0) == pytest.approx(1 / 24)
    assert wigner_coefficient(5, 1.0, 1.0) == pytest.approx(-1 / 1920)
    assert wigner_coefficient((3, 0, 0), 2.0, 1.0) == pytest.approx(4 / 24)
    col = wigner_source_column((3, 0, 0), 1.0, ones)
    assert col[MultiIndex(0, 0, 0)] == pytest.approx(1 / 24)
    assert all(sum(a) % 2 == 0 for a in col)  # alpha - lambda has even order for odd |lambda|, |alpha| = 3
    with pytest.raises(UnsupportedOrderError):
        assemble_1d(5, maxwellian_state(5, 1, 0, 1), [0.0, 1.0, 0.0, 1.0], 1.0, 1.0)


def test_classical_and_equilibrium_sources():
    s = MomentState1D(5, 1.2, 0.3, 0.7, (0.1, -0.2, 0.05))
    sysm = assemble_1d(5, s, [0.0, 0.4, 0.0, 2.0, 0.0, 3.0], 2.0, 0.0)
    nz = {tuple(ix) for ix in np.argwhere(sysm.G)}
    assert nz == {(1, 0), (3, 3), (4, 4), (5, 5)}
    eq = maxwellian_state(5, 1.2, 0.3, 0.9)
    for M in (3, 6):
        eq = maxwellian_state(M, 1.2, 0.3, 0.9)
        G = assemble_1d(M, eq, np.zeros(M + 2), 2.0, 1.0).G
        np.testing.assert_array_equal(G @ eq.as_vector(), 0.0)
    with pytest.raises(InadmissibleStateError):
        assemble_1d(3, MomentState1D(3, -1.0, 0, 0.5), np.zeros(5), 1.0, 1.0)


def test_semiclassical_limit_m3(rng):
    s = random_admissible_state(3, rng)
    dV = random_pot_derivs(rng, 3)
    sysm = assemble_1d(3, s, dV, math.inf, 0.0)
    quantum = assemble_1d(3, s, dV, math.inf, 1.0)
    diff = quantum.G - sysm.G
    assert set(map(tuple, np.argwhere(diff))) == {(3, 0)}
    assert not sysm.G_relaxation.any()


@pytest.mark.parametrize("M", range(3, 9))
def test_grad_vs_regularized_1d(M, rng):
    s = random_admissible_state(M, rng, spread=0.3)
    diff = convection_matrix_1d(s.as_vector(), False) - convection_matrix_1d(s.as_vector(), True)
    assert not diff[:M].any()
    # erased terms: (M+1) f_M du and (M+1) f_{M-1} in the temperature-gradient factor
    assert diff[M, 1] == pytest.approx((M + 1) * s.coefficient(M))


def test_nilpotent_wigner_part_1d():
    for M in range(3, 7):
        s = maxwellian_state(M, 1.0, 0.0, 1.0)
        G = assemble_1d(M, s, np.ones(M + 2), 1.0, 1.0).G_potential
        assert np.all(np.triu(G) == 0)
        assert structural_power_is_empty(G, M + 1)


# ---------------------------------------------------------------- 3D

def test_dimensions_3d(rng):
    s = random_admissible_state(3, rng, dimension=3)
    sysm = assemble_3d(3, s, bump_potential(), (0.1, 0.2, -0.3), 1.0, 1.0)
    assert all(m.shape == (20, 20) for m in sysm.Mhat)
    assert sysm.G.shape == (20, 20)


@pytest.mark.parametrize("M", range(3, 7))
def test_nilpotent_wigner_part_3d(M):
    s = maxwellian_state(M, 1.0, (0, 0, 0), 1.0)
    G = assemble_3d(M, s, ones, None, 1.0, 1.0).G_potential
    assert np.all(np.triu(G) == 0)
    assert structural_power_is_empty(G, len(G))


def test_source_structure_3d():
    M = 5
    index = enumerate_index_set(M)
    s = maxwellian_state(M, 1.5, (0.1, 0.2, 0.3), 0.8)
    sysm = assemble_3d(M, s, ones, None, 2.0, 1.0)
    pos2 = [index.position(unit(i, 2)) for i in range(3)]
    block = sysm.G_relaxation[np.ix_(pos2, pos2)]
    np.testing.assert_allclose(block, -(np.eye(3) - 1 / 3) / 2.0)
    for i in range(3):
        assert sysm.G[index.position(unit(i)), 0] == pytest.approx(-1 / 1.5)
    # |alpha - lambda| = 1 columns carry nothing
    for i in range(3):
        assert not sysm.G_potential[:, index.position(unit(i))].any()
    # alpha = (4, 1, 0) reaches the 2e_1 column through lambda = (2, 1, 0)
    a = index.position(MultiIndex(4, 1, 0))
    coef = wigner_coefficient((2, 1, 0), 1.0, 1.0)
    for i in range(3):
        expected = ((1.0 if i == 0 else 0.0) - 1 / 3) * coef
        assert sysm.G_potential[a, pos2[i]] == pytest.approx(expected)


def test_equilibrium_3d_has_no_source():
    s = maxwellian_state(4, 1.2, (0.3, -0.1, 0.2), 0.9)
    G = assemble_3d(4, s, harmonic_potential(0.0), np.zeros(3), 1.0, 1.0).G
    np.testing.assert_allclose(G @ s.as_vector(), 0.0, atol=1e-15)


@pytest.mark.parametrize("M", [3, 4, 5])
def test_grad_vs_regularized_3d(M, rng):
    s = random_admissible_state(M, rng, dimension=3, spread=0.3)
    index = enumerate_index_set(M)
    top = np.array([a.order == M for a in index])
    for grad, reg in zip(convection_matrices_3d(s, False), convection_matrices_3d(s, True)):
        diff = grad - reg
        assert not diff[~top].any()
        assert diff[top].any()


def _embedded_blocks(M, f, rng, regularized):
    rho, u, T = rng.uniform(0.5, 2), rng.normal(), rng.uniform(0.5, 2)
    s3 = MomentState3D(M, rho, (u, 0, 0), rho * T * np.eye(3), {unit(0, n): v for n, v in f.items()})
    s1 = MomentState1D(M, rho, u, rho * T / 2, tuple(f[n] for n in range(3, M + 1)))
    index = enumerate_index_set(M)
    rows = [0] + [index.position(unit(0, n)) for n in range(1, M + 1)]
    M1 = convection_matrices_3d(s3, regularized)[0]
    block = M1[np.ix_(rows, rows)]
    # d(P/2) in 1D moves all three diagonal pressures of the isotropic 3D state
    block[:, 2] = M1[np.ix_(rows, [index.position(unit(d, 2)) for d in range(3)])].sum(axis=1)
    return block, convection_matrix_1d(s1.as_vector(), regularized), rho


@pytest.mark.parametrize("M", [3, 4])
@pytest.mark.parametrize("regularized", [True, False])
def test_one_dimensional_embedding(M, regularized, rng):
    """Isotropic 3D state varying along x1 only: the n e1 sub-block of M1 is the 1D matrix."""
    f = {n: 0.1 * rng.normal() for n in range(3, M + 1)}
    block, A, _ = _embedded_blocks(M, f, rng, regularized)
    np.testing.assert_allclose(block, A, atol=1e-13)


@pytest.mark.parametrize("M", [5, 6, 7, 8])
@pytest.mark.parametrize("regularized", [True, False])
def test_embedding_differs_only_through_temperature_equation(M, regularized, rng):
    """From M = 5 on the rows for f_n (n >= 5) see f_{n-2} times dT/dt, and dT/dt
    carries 2/rho * dq in 1D against 2/(3 rho) * dq in 3D.  With f_3..f_{M-2} = 0
    the blocks agree again; otherwise the f3 column differs by exactly 2 f_{n-2}/rho."""
    f = {n: (0.1 * rng.normal() if n > M - 2 else 0.0) for n in range(3, M + 1)}
    block, A, _ = _embedded_blocks(M, f, rng, regularized)
    np.testing.assert_allclose(block, A, atol=1e-13)
    f = {n: 0.1 * rng.normal() for n in range(3, M + 1)}
    block, A, rho = _embedded_blocks(M, f, rng, regularized)
    for n in range(5, M + 1):
        assert block[n, 3] - A[n, 3] == pytest.approx(2 * f[n - 2] / rho, rel=1e-12)

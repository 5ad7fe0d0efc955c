"""Quasi-linear moment systems ``dw/dt + sum_j M_j(w) dw/dx_j = G w``.

The 1D system is coded directly from the one-dimensional Hermite expansion
(vectorized over cells, which is what the solver needs).  The 3D system is
built row by row from the general moment equations: each spatial-derivative
term is expanded into derivatives of the stored unknowns through a small
linear "derivative map" (``_Derivatives3D``).  Closure drops ``d f_{alpha+e_j}``
for ``|alpha| = M``; regularization erases the ``(alpha_j + 1)`` terms of
those same rows.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnsupportedOrderError
from .indexing import ZERO, MultiIndex, enumerate_index_set, unit
from .state import MomentState1D, MomentState3D, validate_state


@dataclass(frozen=True, eq=False)
class QuasiLinearSystem1D:
    order: int
    A: np.ndarray
    G_potential: np.ndarray
    G_relaxation: np.ndarray
    regularized: bool
    state: MomentState1D | None = None

    @property
    def G(self):
        return self.G_potential + self.G_relaxation


@dataclass(frozen=True, eq=False)
class QuasiLinearSystem3D:
    order: int
    Mhat: tuple
    G_potential: np.ndarray
    G_relaxation: np.ndarray
    regularized: bool
    state: MomentState3D | None = None

    @property
    def G(self):
        return self.G_potential + self.G_relaxation

    def directional(self, n):
        """``sum_j n_j Mhat_j``."""
        return sum(n[j] * self.Mhat[j] for j in range(3))


# ---------------------------------------------------------------- Wigner term

def wigner_coefficient(lam, hbar, dV):
    """``-(hbar/2i)^(|lam|-1) / lam! * dV`` for odd ``|lam|`` (real-valued)."""
    lam = (lam,) if np.ndim(lam) == 0 else tuple(lam)
    order = sum(lam)
    if order % 2 == 0:
        raise InvalidArgumentError("Wigner expansion only carries odd |lambda|")
    m = (order - 1) // 2
    denom = math.prod(math.factorial(c) for c in lam)
    return -((-1) ** m) * (0.5 * hbar) ** (2 * m) / denom * dV


def _lookup(pot_derivs, lam):
    try:
        if callable(pot_derivs):
            return pot_derivs(lam)
        if isinstance(pot_derivs, Mapping):
            return pot_derivs[lam]
        return pot_derivs[lam]
    except (KeyError, IndexError) as exc:
        raise UnsupportedOrderError(f"potential derivative of order {lam} not supplied") from exc


def _sub_indices(alpha):
    for l1 in range(alpha[0] + 1):
        for l2 in range(alpha[1] + 1):
            for l3 in range(alpha[2] + 1):
                yield MultiIndex(l1, l2, l3)


def wigner_source_column(alpha, hbar, pot_derivs, min_order=1):
    """Coefficients multiplying ``f_{alpha - lam}`` in the equation for ``f_alpha``.

    Returns ``{alpha - lam: coefficient}`` over odd ``|lam| >= min_order`` with
    ``alpha - lam >= 0``.  ``alpha`` is an int (1D) or a multi-index (3D);
    ``pot_derivs`` maps ``lam`` to the potential derivative (callable, mapping
    or sequence indexed by ``lam``).
    """
    out = {}
    if np.ndim(alpha) == 0:
        for lam in range(max(min_order, 1), int(alpha) + 1):
            if lam % 2 == 1:
                out[int(alpha) - lam] = wigner_coefficient(lam, hbar, _lookup(pot_derivs, lam))
        return out
    alpha = MultiIndex(*alpha)
    for lam in _sub_indices(alpha):
        if lam.order % 2 == 1 and lam.order >= min_order:
            out[alpha - lam] = wigner_coefficient(lam, hbar, _lookup(pot_derivs, lam))
    return out


# ---------------------------------------------------------------- 1D

def convection_matrix_1d(w, regularized=True):
    """Convection matrices ``A(w)`` for 1D states stacked along leading axes.

    ``w[..., :]`` is ``(rho, u, P/2, f_3, ..., f_M)``.
    """
    w = np.asarray(w, dtype=float)
    n_unknowns = w.shape[-1]
    M = n_unknowns - 1
    if M < 3:
        raise InvalidArgumentError(f"order must be >= 3, got {M}")
    rho, u, half_p = w[..., 0], w[..., 1], w[..., 2]
    P = 2.0 * half_p
    T = P / rho
    zero = np.zeros_like(rho)

    def f(k):
        if k == 0:
            return rho
        if k < 3 or k > M:
            return zero
        return w[..., k]

    A = np.zeros(w.shape + (n_unknowns,))
    A[..., 0, 0] = u
    A[..., 0, 1] = rho
    A[..., 1, 1] = u
    A[..., 1, 2] = 2.0 / rho
    A[..., 2, 1] = 1.5 * P
    A[..., 2, 2] = u
    A[..., 2, 3] = 3.0
    for n in range(3, M + 1):
        c = 0.0 if (regularized and n == M) else 1.0
        # (T/2) dT/dx multiplies T f_{n-3} + c (n+1) f_{n-1}; dT/dx = (dP - T drho)/rho
        k = T * f(n - 3) + c * (n + 1) * f(n - 1)
        A[..., n, 0] = -0.5 * T / rho * k
        A[..., n, 1] = c * (n + 1) * f(n)
        A[..., n, 2] = 2.0 * (-f(n - 1) / rho + 0.5 * k / rho)
        A[..., n, 3] += -3.0 * f(n - 2) / rho
        if n - 1 >= 3:
            A[..., n, n - 1] += T
        A[..., n, n] += u
        if n + 1 <= M:
            A[..., n, n + 1] += n + 1
    return A


def relaxation_matrix_1d(M, tau):
    G = np.zeros((M + 1, M + 1))
    if np.isfinite(tau):
        for n in range(3, M + 1):
            G[n, n] = -1.0 / tau
    return G


def wigner_matrix_1d(M, hbar, pot_derivs):
    """Potential part of G without the force entry (constant in w)."""
    G = np.zeros((M + 1, M + 1))
    if hbar == 0:
        return G
    for n in range(3, M + 1):
        for src, coef in wigner_source_column(n, hbar, pot_derivs, min_order=3).items():
            if src in (1, 2):
                # f_1 = 0 and f_2 = P/2 - rho T/2 = 0 identically in 1D
                continue
            G[n, src] += coef
    return G


def assemble_1d(M, state: MomentState1D, pot_derivs, tau, hbar, regularized=True):
    """A and G of the 1D system at one spatial point.

    ``pot_derivs[k]`` is ``V^(k)(x)``; orders 1 and odd 3..M are required.
    ``tau = inf`` switches the relaxation off.
    """
    validate_state(state)
    if state.order != M:
        raise InvalidArgumentError(f"state order {state.order} != M={M}")
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    if hbar < 0:
        raise InvalidArgumentError("hbar must be non-negative")
    w = state.as_vector()
    A = convection_matrix_1d(w, regularized)
    G_pot = wigner_matrix_1d(M, hbar, pot_derivs)
    G_pot[1, 0] = -_lookup(pot_derivs, 1) / state.rho
    return QuasiLinearSystem1D(M, A, G_pot, relaxation_matrix_1d(M, tau), bool(regularized), state)


# ---------------------------------------------------------------- 3D

class _Derivatives3D:
    """Expresses derivatives of derived quantities as rows over ``dw/dx_j``."""

    def __init__(self, state: MomentState3D):
        self.state = state
        self.index = enumerate_index_set(state.order)
        self.size = len(self.index)
        self.rho = state.rho
        self.T = state.temperature

    def e(self, alpha):
        row = np.zeros(self.size)
        row[self.index.position(alpha)] = 1.0
        return row

    def f(self, beta):
        """d f_beta expressed through d w (zero beyond the truncation)."""
        beta = MultiIndex(*beta)
        if not beta.is_valid() or beta.order > self.state.order or beta.order == 1:
            return np.zeros(self.size)
        if beta.order == 2 and max(beta) == 2:
            row = self.e(beta)
            for d in range(3):
                row[self.index.position(unit(d, 2))] -= 1.0 / 3.0
            return row
        return self.e(beta)

    def rho_(self):
        return self.e(ZERO)

    def u(self, d):
        return self.e(unit(d))

    def p(self, a, b):
        return 2.0 * self.e(unit(a, 2)) if a == b else self.e(unit(a) + unit(b))

    def T_(self):
        row = -self.T / self.rho * self.e(ZERO)
        for d in range(3):
            row = row + 2.0 / (3.0 * self.rho) * self.e(unit(d, 2))
        return row

    def q(self, j):
        row = 2.0 * self.f(unit(j, 3))
        for d in range(3):
            row = row + self.f(unit(d, 2) + unit(j))
        return row


def convection_matrices_3d(state: MomentState3D, regularized=True):
    """The three matrices ``M_j`` (or ``Mhat_j`` when regularized)."""
    M = state.order
    D = _Derivatives3D(state)
    rho, T = D.rho, D.T
    u = state.u
    p = state.pressure
    f = state.coefficient
    mats = []
    for j in range(3):
        ej = unit(j)
        Mj = np.zeros((D.size, D.size))
        for row_idx, alpha in enumerate(D.index):
            n = alpha.order
            if n == 0:
                row = u[j] * D.rho_() + rho * D.u(j)
            elif n == 1:
                d = alpha.index(1)
                row = u[j] * D.u(d) + D.p(j, d) / rho
            elif n == 2 and max(alpha) == 2:
                i = alpha.index(2)
                dij = 1.0 if i == j else 0.0
                row = u[j] * D.e(alpha) + (0.5 + dij) * rho * T * D.u(j)
                for d in range(3):
                    row = row + (2 * dij + 1) * f(unit(i, 2) - unit(d) + ej) * D.u(d)
                row = row + (2 * dij + 1) * D.f(unit(i, 2) + ej)
            else:
                r = 0.0 if (regularized and n == M) else 1.0
                aj1 = alpha[j] + 1
                row = T * D.f(alpha - ej) + u[j] * D.f(alpha) + aj1 * D.f(alpha + ej)
                s2 = sum(f(alpha - unit(k, 2)) for k in range(3))
                for d in range(3):
                    ed = unit(d)
                    coef = T * f(alpha - ed - ej) + r * aj1 * f(alpha - ed + ej) - p[j, d] / (3 * rho) * s2
                    row = row + coef * D.u(d)
                    row = row - f(alpha - ed) / rho * D.p(j, d)
                row = row - s2 / (3 * rho) * D.q(j)
                k2 = sum(T * f(alpha - unit(k, 2) - ej) + r * aj1 * f(alpha - unit(k, 2) + ej)
                         for k in range(3))
                if k2:
                    half_dT = -T / (2 * rho) * D.rho_() + sum(D.p(d, d) for d in range(3)) / (6 * rho)
                    row = row + k2 * half_dT
            Mj[row_idx] = row
        mats.append(Mj)
    return tuple(mats)


def relaxation_matrix_3d(M, tau):
    index = enumerate_index_set(M)
    G = np.zeros((len(index), len(index)))
    if not np.isfinite(tau):
        return G
    for k, alpha in enumerate(index):
        if alpha.order < 2:
            continue
        if max(alpha) == 2 and alpha.order == 2:
            i = alpha.index(2)
            for jdx in range(3):
                G[k, index.position(unit(jdx, 2))] = -((1.0 if i == jdx else 0.0) - 1.0 / 3.0) / tau
        else:
            G[k, k] = -1.0 / tau
    return G


def wigner_matrix_3d(M, hbar, pot_derivs):
    index = enumerate_index_set(M)
    G = np.zeros((len(index), len(index)))
    if hbar == 0:
        return G
    for k, alpha in enumerate(index):
        if alpha.order < 3:
            continue
        for beta, coef in wigner_source_column(alpha, hbar, pot_derivs, min_order=3).items():
            if beta.order == 1:
                continue
            if beta.order == 2 and max(beta) == 2:
                # f_{2e_j} = w_{2e_j} - (1/3) sum_i w_{2e_i}
                jdx = beta.index(2)
                for i in range(3):
                    G[k, index.position(unit(i, 2))] += ((1.0 if i == jdx else 0.0) - 1.0 / 3.0) * coef
            else:
                G[k, index.position(beta)] += coef
    return G


def assemble_3d(M, state: MomentState3D, pot, x, tau, hbar, regularized=True):
    """Mhat_j and G of the 3D system at ``x``.

    ``pot`` is a :class:`~wigner_moments.potential.PotentialModel` or a callable
    ``lam -> d^lam V(x)``.
    """
    validate_state(state)
    if state.order != M:
        raise InvalidArgumentError(f"state order {state.order} != M={M}")
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    if hbar < 0:
        raise InvalidArgumentError("hbar must be non-negative")
    if isinstance(pot, Callable) and not hasattr(pot, "derivative_3d"):
        derivs = pot
    else:
        x = np.asarray(x, dtype=float)
        derivs = lambda lam: pot.derivative_3d(lam, x)  # noqa: E731
    mats = convection_matrices_3d(state, regularized)
    index = enumerate_index_set(M)
    G_pot = wigner_matrix_3d(M, hbar, derivs)
    for i in range(3):
        G_pot[index.position(unit(i)), 0] = -derivs(unit(i)) / state.rho
    return QuasiLinearSystem3D(M, mats, G_pot, relaxation_matrix_3d(M, tau), bool(regularized), state)

"""Moment unknown vectors, their admissibility, and distribution reconstruction.

The 1D unknown vector is ``w = (rho, u, P/2, f_3, ..., f_M)``.  The 3D one is
ordered by :func:`indexing.ordinal` with ``w[0] = rho``, ``w[e_i] = u_i``,
``w[2 e_i] = p_ii / 2``, ``w[e_i + e_j] = p_ij`` and ``w[alpha] = f_alpha``
for ``|alpha| >= 3``.  First-order coefficients and the second-order
Hermite coefficients are never stored; they follow from ``u`` and ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InadmissibleStateError, InvalidArgumentError
from .hermite import HermiteBasisParams, basis_eval, hermite_eval_all
from .indexing import ZERO, MultiIndex, enumerate_index_set, unit


@dataclass(frozen=True)
class MomentState1D:
    order: int
    rho: float
    u: float
    half_pressure: float
    coeffs: tuple = ()

    def __post_init__(self):
        if self.order < 3:
            raise InvalidArgumentError(f"order must be >= 3, got {self.order}")
        coeffs = tuple(float(c) for c in self.coeffs) or (0.0,) * (self.order - 2)
        if len(coeffs) != self.order - 2:
            raise InvalidArgumentError(f"expected {self.order - 2} coefficients f_3..f_M, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def pressure(self):
        return 2.0 * self.half_pressure

    @property
    def temperature(self):
        return self.pressure / self.rho

    def coefficient(self, n):
        """Hermite coefficient f_n with f_0 = rho and f_1 = f_2 = 0."""
        if n == 0:
            return self.rho
        if n < 3 or n > self.order:
            return 0.0
        return self.coeffs[n - 3]

    def as_vector(self):
        return np.array([self.rho, self.u, self.half_pressure, *self.coeffs])

    @classmethod
    def from_vector(cls, w):
        w = np.asarray(w, dtype=float)
        return cls(len(w) - 1, float(w[0]), float(w[1]), float(w[2]), tuple(w[3:]))


@dataclass(frozen=True, eq=False)
class MomentState3D:
    order: int
    rho: float
    u: tuple
    pressure: np.ndarray
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 3:
            raise InvalidArgumentError(f"order must be >= 3, got {self.order}")
        u = tuple(float(c) for c in self.u)
        p = np.array(self.pressure, dtype=float)
        if len(u) != 3 or p.shape != (3, 3):
            raise InvalidArgumentError("3D state needs a 3-vector u and a 3x3 pressure tensor")
        if not np.allclose(p, p.T, rtol=0, atol=1e-14 * max(1.0, np.abs(p).max())):
            raise InvalidArgumentError("pressure tensor must be symmetric")
        p = 0.5 * (p + p.T)
        p.setflags(write=False)
        coeffs = {}
        for alpha, value in dict(self.coeffs).items():
            alpha = MultiIndex(*alpha)
            if not alpha.is_valid() or not 3 <= alpha.order <= self.order:
                raise InvalidArgumentError(f"coefficient index {alpha} outside 3 <= |alpha| <= {self.order}")
            coeffs[alpha] = float(value)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "pressure", p)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def temperature(self):
        return float(np.trace(self.pressure)) / (3.0 * self.rho)

    def coefficient(self, alpha):
        """f_alpha in the expansion about (u, T), for any multi-index."""
        alpha = MultiIndex(*alpha)
        if not alpha.is_valid() or alpha.order > self.order:
            return 0.0
        n = alpha.order
        if n == 0:
            return self.rho
        if n == 1:
            return 0.0
        if n == 2:
            i, j = [d for d in range(3) for _ in range(alpha[d])]
            if i != j:
                return float(self.pressure[i, j])
            return 0.5 * (self.pressure[i, i] - self.rho * self.temperature)
        return self.coeffs.get(alpha, 0.0)

    def as_vector(self):
        index = enumerate_index_set(self.order)
        w = np.zeros(len(index))
        for k, alpha in enumerate(index):
            n = alpha.order
            if n == 0:
                w[k] = self.rho
            elif n == 1:
                w[k] = self.u[alpha.index(1)]
            elif n == 2:
                i, j = [d for d in range(3) for _ in range(alpha[d])]
                w[k] = self.pressure[i, i] / 2 if i == j else self.pressure[i, j]
            else:
                w[k] = self.coeffs.get(alpha, 0.0)
        return w

    @classmethod
    def from_vector(cls, order, w):
        index = enumerate_index_set(order)
        w = np.asarray(w, dtype=float)
        if len(w) != len(index):
            raise InvalidArgumentError(f"expected vector of length {len(index)}, got {len(w)}")
        u = [0.0] * 3
        p = np.zeros((3, 3))
        coeffs = {}
        for k, alpha in enumerate(index):
            n = alpha.order
            if n == 1:
                u[alpha.index(1)] = w[k]
            elif n == 2:
                i, j = [d for d in range(3) for _ in range(alpha[d])]
                if i == j:
                    p[i, i] = 2 * w[k]
                else:
                    p[i, j] = p[j, i] = w[k]
            elif n >= 3:
                coeffs[alpha] = w[k]
        return cls(order, float(w[0]), tuple(u), p, coeffs)


MomentState = MomentState1D | MomentState3D


def is_admissible(state):
    rho = state.rho
    T = state.temperature
    return bool(np.isfinite(rho) and np.isfinite(T) and rho > 0 and T > 0)


def validate_state(state):
    """Raise :class:`InadmissibleStateError` unless rho > 0 and T > 0."""
    if not is_admissible(state):
        raise InadmissibleStateError(
            f"inadmissible state: rho={state.rho!r}, temperature={state.temperature!r}")
    return state


def maxwellian_state(order, rho, u, temperature):
    """Local equilibrium: all coefficients of order >= 1 vanish.

    A scalar ``u`` gives a 1D state, a 3-vector a 3D one.
    """
    if not rho > 0 or not temperature > 0:
        raise DomainError(f"rho and temperature must be positive, got rho={rho}, T={temperature}")
    if np.ndim(u) == 0:
        return MomentState1D(order, float(rho), float(u), 0.5 * rho * temperature)
    return MomentState3D(order, float(rho), tuple(u), rho * temperature * np.eye(3), {})


class DerivedQuantities(NamedTuple):
    temperature: float
    heat_flux: object
    deviatoric: object


def derived_quantities(state):
    """Temperature, heat flux and the coefficients f_{e_i+e_j}.

    In 1D the heat flux is ``3 f_3`` and the deviatoric part is identically 0.
    """
    validate_state(state)
    if isinstance(state, MomentState1D):
        return DerivedQuantities(state.temperature, 3.0 * state.coefficient(3), 0.0)
    T = state.temperature
    q = np.array([2 * state.coefficient(unit(i, 3))
                  + sum(state.coefficient(unit(d, 2) + unit(i)) for d in range(3))
                  for i in range(3)])
    dev = (state.pressure - np.eye(3) * state.rho * T) / (1.0 + np.eye(3))
    return DerivedQuantities(T, q, dev)


def pressure_from_deviatoric(rho, temperature, deviatoric):
    """p_ij = delta_ij rho T + (1 + delta_ij) f_{e_i+e_j}."""
    return np.eye(3) * rho * temperature + (1.0 + np.eye(3)) * np.asarray(deviatoric)


def foreign_expansion_moments(fprime_0, fprime_first, fprime_second_diag, u_prime, T_prime):
    """Recover (rho, u, T) from the low coefficients of an expansion about (u', T')."""
    if not fprime_0 > 0 or not T_prime > 0:
        raise DomainError("fprime_0 and T_prime must be positive")
    first = np.atleast_1d(np.asarray(fprime_first, dtype=float))
    second = np.atleast_1d(np.asarray(fprime_second_diag, dtype=float))
    u_prime = np.atleast_1d(np.asarray(u_prime, dtype=float))
    dim = len(u_prime)
    rho = float(fprime_0)
    u = u_prime + first / rho
    energy = sum(T_prime * fprime_0 + 2 * second[d] for d in range(dim))
    T = (energy - rho * float(np.sum((u - u_prime) ** 2))) / (dim * rho)
    if not T > 0:
        raise InadmissibleStateError(f"recovered temperature {T} is not positive")
    return rho, (float(u[0]) if dim == 1 else u), T


def reconstruct_distribution(state, v):
    """Truncated Hermite series of the distribution evaluated at velocity ``v``.

    ``v`` is a scalar/array for 1D states and a (..., 3) array for 3D states.
    """
    T = state.temperature
    if isinstance(state, MomentState1D):
        v = np.asarray(v, dtype=float)
        xi = (v - state.u) / math.sqrt(T)
        he = hermite_eval_all(state.order, xi)
        weight = np.exp(-0.5 * xi**2) / math.sqrt(2 * math.pi)
        total = np.zeros_like(xi)
        for n in range(state.order + 1):
            fn = state.coefficient(n)
            if fn:
                total = total + fn * T ** (-(n + 1) / 2) * he[n]
        out = total * weight
        return float(out) if out.ndim == 0 else out
    params = HermiteBasisParams(T, state.u)
    total = 0.0
    for alpha in enumerate_index_set(state.order):
        fa = state.coefficient(alpha)
        if fa:
            total = total + fa * basis_eval(params, alpha, v)
    return total


def to_record(state):
    """Flat mapping of named fields used by the CSV writers."""
    if isinstance(state, MomentState1D):
        rec = {"rho": state.rho, "u": state.u, "P": state.pressure}
        rec.update({f"f{n}": state.coefficient(n) for n in range(3, state.order + 1)})
        return rec
    rec = {"rho": state.rho}
    rec.update({f"u{i + 1}": state.u[i] for i in range(3)})
    rec.update({f"p{i + 1}{j + 1}": state.pressure[i, j] for i in range(3) for j in range(i, 3)})
    for alpha in enumerate_index_set(state.order):
        if alpha.order >= 3:
            rec["f{}{}{}".format(*alpha)] = state.coefficient(alpha)
    return rec


def random_admissible_state(order, rng, dimension=1, spread=0.1):
    """Random state with rho, T in [0.5, 2] and f_alpha ~ N(0, spread^2) rho T^(|alpha|/2)."""
    rho = rng.uniform(0.5, 2.0)
    T = rng.uniform(0.5, 2.0)
    if dimension == 1:
        coeffs = [spread * rng.standard_normal() * rho * T ** (n / 2) for n in range(3, order + 1)]
        return MomentState1D(order, rho, rng.standard_normal(), 0.5 * rho * T, tuple(coeffs))
    if dimension != 3:
        raise InvalidArgumentError(f"dimension must be 1 or 3, got {dimension}")
    dev = spread * rng.standard_normal((3, 3))
    p = rho * T * (np.eye(3) + 0.5 * (dev + dev.T))
    coeffs = {alpha: spread * rng.standard_normal() * rho * T ** (alpha.order / 2)
              for alpha in enumerate_index_set(order) if alpha.order >= 3}
    return MomentState3D(order, rho, tuple(rng.standard_normal(3)), p, coeffs)


def unknown_names_1d(order):
    return ["rho", "u", "P/2"] + [f"f{n}" for n in range(3, order + 1)]


def unknown_names_3d(order):
    names = []
    for alpha in enumerate_index_set(order):
        n = alpha.order
        if n == 0:
            names.append("rho")
        elif n == 1:
            names.append(f"u{alpha.index(1) + 1}")
        elif n == 2:
            i, j = [d + 1 for d in range(3) for _ in range(alpha[d])]
            names.append(f"p{i}{i}/2" if i == j else f"p{i}{j}")
        else:
            names.append("f{}{}{}".format(*alpha))
    return names


__all__ = [
    "MomentState1D", "MomentState3D", "MomentState", "DerivedQuantities", "ZERO",
    "is_admissible", "validate_state", "maxwellian_state", "derived_quantities",
    "pressure_from_deviatoric", "foreign_expansion_moments", "reconstruct_distribution",
    "to_record", "random_admissible_state", "unknown_names_1d", "unknown_names_3d",
]

"""Probabilists' Hermite polynomials and the scaled Hermite basis functions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgumentError

_CLAMP = 1e300
MAX_ROOT_ORDER = 64


class HermiteAccuracyWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class HermiteBasisParams:
    """Temperature scale and shift of the basis ``H_{T,alpha}((v - u)/sqrt(T))``."""

    temperature_scale: float
    shift: tuple

    def __post_init__(self):
        if not self.temperature_scale > 0:
            raise DomainError(f"temperature_scale must be positive, got {self.temperature_scale}")
        object.__setattr__(self, "shift", tuple(float(s) for s in np.atleast_1d(self.shift)))

    @property
    def dim(self):
        return len(self.shift)


def hermite_eval(n, x):
    """He_n(x) by the three-term recursion; He_n = 0 for n < 0.

    Accepts scalar or array ``x``. Values are clamped at 1e300 in magnitude
    and a :class:`HermiteAccuracyWarning` is issued when that happens.
    """
    x = np.asarray(x, dtype=float)
    if n < 0:
        out = np.zeros_like(x)
    elif n == 0:
        out = np.ones_like(x)
    else:
        prev = np.ones_like(x)
        cur = x.copy()
        clamped = False
        for k in range(1, n):
            nxt = x * cur - k * prev
            if np.any(np.abs(nxt) > _CLAMP) or not np.all(np.isfinite(nxt)):
                clamped = True
                nxt = np.clip(np.nan_to_num(nxt, nan=0.0, posinf=_CLAMP, neginf=-_CLAMP), -_CLAMP, _CLAMP)
            prev, cur = cur, nxt
        if clamped:
            warnings.warn(f"He_{n} overflowed and was clamped; result is inaccurate",
                          HermiteAccuracyWarning, stacklevel=2)
        out = cur
    return float(out) if out.ndim == 0 else out


def hermite_eval_all(n_max, x):
    """Stack of He_0..He_{n_max} evaluated at ``x`` (shape ``(n_max+1,) + x.shape``)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(1, n_max):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def _hermite_and_derivative(n, x):
    h = hermite_eval(n, x)
    return h, n * hermite_eval(n - 1, x)


def hermite_roots(n):
    """The n roots of He_n in strictly increasing order.

    Eigenvalues of the symmetric Jacobi matrix of the recursion, followed by
    one Newton step per root. The result is symmetrized about zero.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_ROOT_ORDER:
        raise InvalidArgumentError(f"root order must be an integer in [1, {MAX_ROOT_ORDER}], got {n!r}")
    off = np.sqrt(np.arange(1, n, dtype=float))
    jacobi = np.diag(off, 1) + np.diag(off, -1)
    roots = np.linalg.eigvalsh(jacobi)
    h, dh = _hermite_and_derivative(n, roots)
    roots = roots - h / dh
    roots = np.sort(roots)
    roots = 0.5 * (roots - roots[::-1])
    if n % 2 == 1:
        roots[n // 2] = 0.0
    return roots


def basis_eval(params: HermiteBasisParams, alpha, v):
    """Evaluate the scaled Hermite basis function of index ``alpha`` at velocity ``v``.

    ``alpha`` has one entry per dimension of ``params.shift``; a negative entry
    gives zero. ``v`` may carry extra leading axes (last axis is the dimension).
    """
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v[None]
    if v.shape[-1] != params.dim or len(alpha) != params.dim:
        raise InvalidArgumentError("dimension of v/alpha does not match the basis shift")
    if any(a < 0 for a in alpha):
        return np.zeros(v.shape[:-1]) if v.ndim > 1 else 0.0
    T = params.temperature_scale
    sqrt_T = math.sqrt(T)
    out = 1.0
    for d, a in enumerate(alpha):
        xi = (v[..., d] - params.shift[d]) / sqrt_T
        out = out * (T ** (-(a + 1) / 2) / math.sqrt(2 * math.pi)) * hermite_eval(a, xi) * np.exp(-0.5 * xi**2)
    return float(out) if np.ndim(out) == 0 else out


def gauss_hermite(n):
    """Nodes and weights for the weight ``exp(-x^2/2)`` (probabilists' form)."""
    nodes = hermite_roots(n)
    # w_k = n! sqrt(2 pi) / (n He_{n-1}(x_k))^2
    log_fact = math.lgamma(n + 1)
    he = hermite_eval(n - 1, nodes)
    weights = np.exp(log_fact - 2 * math.log(n)) * math.sqrt(2 * math.pi) / he**2
    return nodes, weights

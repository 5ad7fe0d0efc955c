"""External potentials with exact spatial derivatives.

Supported kinds: ``zero``, ``linear``, ``harmonic``, ``polynomial`` and
``bump``.  The bump ``exp(-1/(1 - x^2))`` is differentiated through the
recurrence ``V^(n) = P_n(x) / (1 - x^2)^(2n) * V`` with integer polynomials

    P_{n+1} = P_n' (1 - x^2)^2 + 4 n x P_n (1 - x^2) - 2 x P_n,   P_0 = 1.

In 3D the bump is the separable product of 1D bumps, harmonic is
``k |x - x0|^2 / 2`` and linear is ``g . x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, UnsupportedOrderError
from .indexing import MultiIndex

KINDS = ("zero", "linear", "harmonic", "polynomial", "bump")
DEFAULT_MAX_ORDER = {"bump": 16}
_UNBOUNDED = 64


# ---------------------------------------------------------------- polynomials
# Integer coefficient lists, lowest degree first.

def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pderiv(a):
    return [i * a[i] for i in range(1, len(a))] or [0]


def _peval(coeffs, x):
    out = np.zeros_like(x) + float(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        out = out * x + float(c)
    return out


@lru_cache(maxsize=None)
def bump_numerator(n):
    """Integer coefficients of P_n (tuple, lowest degree first)."""
    if n == 0:
        return (1,)
    p = list(bump_numerator(n - 1))
    m = n - 1
    one_minus = [1, 0, -1]
    term1 = _pmul(_pderiv(p), _pmul(one_minus, one_minus))
    term2 = _pmul([0, 4 * m], _pmul(p, one_minus))
    term3 = _pmul([0, -2], p)
    return tuple(_padd(_padd(term1, term2), term3))


def bump_derivative(n, x):
    """n-th derivative of exp(-1/(1 - x^2)) (zero outside (-1, 1))."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    if np.any(inside):
        xi = x[inside]
        s = 1.0 - xi * xi
        log_scale = -1.0 / s - 2 * n * np.log(s)
        out[inside] = _peval(bump_numerator(n), xi) * np.exp(log_scale)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- model

@dataclass(frozen=True)
class PotentialModel:
    """Static potential ``V(x)``; see module docstring for the kinds.

    ``params`` (all optional):
      linear: ``slope`` (1D) or ``gradient`` (3-vector)
      harmonic: ``k`` (default 1), ``center``
      polynomial: ``coefficients`` c_0, c_1, ... of a profile in x (x_1 in 3D)
      bump: ``amplitude`` (1), ``width`` (1), ``center`` (0)
    """

    kind: str
    params: dict = field(default_factory=dict)
    max_derivative_order: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        if self.max_derivative_order is None:
            object.__setattr__(self, "max_derivative_order", DEFAULT_MAX_ORDER.get(self.kind, _UNBOUNDED))
        object.__setattr__(self, "params", dict(self.params))

    time_dependent = False

    def at_time(self, t):
        """Static kinds only; the same model at every time."""
        return self

    def _param(self, name, default):
        return self.params.get(name, default)

    def _check_order(self, order):
        if order > self.max_derivative_order:
            raise UnsupportedOrderError(
                f"derivative order {order} exceeds max_derivative_order={self.max_derivative_order} "
                f"for {self.kind} potential")

    # 1D ------------------------------------------------------------------
    def derivative_1d(self, order, x):
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        kind = self.kind
        if kind == "zero":
            out = np.zeros_like(x)
        elif kind == "linear":
            slope = float(self._param("slope", 1.0))
            out = slope * x if order == 0 else np.full_like(x, slope if order == 1 else 0.0)
        elif kind == "harmonic":
            k = float(self._param("k", 1.0))
            y = x - float(self._param("center", 0.0))
            out = [0.5 * k * y * y, k * y, np.full_like(x, k)][order] if order <= 2 else np.zeros_like(x)
        elif kind == "polynomial":
            coeffs = [float(c) for c in self._param("coefficients", [0.0])]
            for _ in range(order):
                coeffs = [i * coeffs[i] for i in range(1, len(coeffs))] or [0.0]
            out = _peval(coeffs, x)
        else:
            amp = float(self._param("amplitude", 1.0))
            width = float(self._param("width", 1.0))
            y = (x - float(self._param("center", 0.0))) / width
            out = amp * width ** (-order) * bump_derivative(order, y)
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    # 3D ------------------------------------------------------------------
    def derivative_3d(self, lam, x):
        lam = MultiIndex(*lam)
        self._check_order(lam.order)
        x = np.asarray(x, dtype=float)
        kind = self.kind
        n = lam.order
        if kind == "zero":
            return 0.0
        if kind == "linear":
            g = np.asarray(self._param("gradient", (float(self._param("slope", 1.0)), 0.0, 0.0)), float)
            if n == 0:
                return float(g @ x)
            return float(g[lam.index(1)]) if n == 1 else 0.0
        if kind == "harmonic":
            k = float(self._param("k", 1.0))
            y = x - np.asarray(self._param("center", (0.0, 0.0, 0.0)), float)
            if n == 0:
                return 0.5 * k * float(y @ y)
            if n == 1:
                return k * float(y[lam.index(1)])
            if n == 2 and max(lam) == 2:
                return k
            return 0.0
        if kind == "polynomial":
            if lam.a2 or lam.a3:
                return 0.0
            return self.derivative_1d(lam.a1, x[0])
        amp = float(self._param("amplitude", 1.0))
        width = float(self._param("width", 1.0))
        center = np.broadcast_to(np.asarray(self._param("center", 0.0), float), (3,))
        y = (x - center) / width
        out = amp * width ** (-n)
        for d in range(3):
            out *= bump_derivative(lam[d], y[d])
        return float(out)

    def derivative(self, lam, x):
        """Exact ``d^lam V / dx^lam`` at ``x``; ``lam`` is an int (1D) or multi-index (3D)."""
        if np.ndim(lam) == 0:
            return self.derivative_1d(int(lam), x)
        return self.derivative_3d(lam, x)

    def __call__(self, x):
        return self.derivative_1d(0, x)

    def derivatives_1d(self, x, max_order):
        """Array ``D`` with ``D[k] = V^(k)(x)`` for ``k = 0..max_order``."""
        return np.array([self.derivative_1d(k, x) for k in range(max_order + 1)])


def potential_derivative(pot, lam, x):
    return pot.derivative(lam, x)


def bump_potential(max_derivative_order=16):
    return PotentialModel("bump", {}, max_derivative_order)


def zero_potential():
    return PotentialModel("zero")


def harmonic_potential(k=1.0):
    return PotentialModel("harmonic", {"k": k})


def linear_potential(slope=1.0):
    return PotentialModel("linear", {"slope": slope})

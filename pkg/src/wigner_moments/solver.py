"""Finite-volume integrator for the regularized 1D moment system.

Transport uses first-order characteristic upwinding on the quasi-linear form:
at each interface ``A`` is frozen at the arithmetic mean of the neighbours
and the jump ``dw`` is split as ``A^- dw`` (to the left cell) plus
``A^+ dw`` (to the right cell).  Sources are integrated per cell, with the
relaxation diagonal handled exactly, and the two parts are Strang-composed.

Fields are arrays of shape ``(cells, M + 1)`` in the unknown ordering
``(rho, u, P/2, f_3, ..., f_M)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import convection_matrix_1d, wigner_coefficient
from .errors import InadmissibleStateError, InvalidArgumentError, SolverFailureError
from .hermite import hermite_roots
from .potential import PotentialModel
from .state import MomentState1D

BOUNDARIES = ("periodic", "zero-gradient")


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    cells: int
    boundary: str = "periodic"

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise InvalidArgumentError("x_max must exceed x_min")
        if int(self.cells) != self.cells or self.cells < 8:
            raise InvalidArgumentError(f"cells must be an integer >= 8, got {self.cells}")
        if self.boundary not in BOUNDARIES:
            raise InvalidArgumentError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.cells

    @property
    def centers(self):
        return self.x_min + (np.arange(self.cells) + 0.5) * self.dx


@dataclass(frozen=True)
class SolverConfig:
    order: int
    cfl: float
    t_end: float
    hbar: float
    tau: float
    potential: PotentialModel
    output_stride: int = 1

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 3:
            raise InvalidArgumentError(f"order must be an integer >= 3, got {self.order}")
        if not 0 < self.cfl < 1:
            raise InvalidArgumentError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.t_end > 0:
            raise InvalidArgumentError(f"t_end must be positive, got {self.t_end}")
        if not self.hbar >= 0:
            raise InvalidArgumentError(f"hbar must be non-negative, got {self.hbar}")
        if not self.tau > 0:
            raise InvalidArgumentError(f"tau must be positive, got {self.tau}")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise InvalidArgumentError("output_stride must be a positive integer")


@dataclass
class Trajectory:
    """Recorded snapshots plus per-snapshot diagnostics.

    ``diagnostics`` holds arrays aligned with ``times``: ``mass``,
    ``momentum``, ``energy``, the absolute cumulative balance residuals
    ``momentum_residual`` and ``energy_residual``, the cumulative L1 source
    magnitudes ``momentum_forcing`` and ``energy_forcing`` used to normalize
    them, and ``courant`` (largest characteristic displacement over ``dx`` in
    the steps since the previous snapshot).
    """

    x: np.ndarray
    order: int
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def states(self, k):
        return [MomentState1D.from_vector(w) for w in self.fields[k]]

    def diagnostic(self, name):
        return np.asarray(self.diagnostics[name])


def _check_admissible(w, time=None):
    rho, half_p = w[:, 0], w[:, 2]
    bad = ~(np.isfinite(w).all(axis=1) & (rho > 0) & (half_p > 0))
    if np.any(bad):
        cell = int(np.argmax(bad))
        raise SolverFailureError(
            f"positivity lost in cell {cell}: rho={w[cell, 0]!r}, P/2={w[cell, 2]!r}", cell=cell, time=time)


def stable_dt(w, grid, cfl):
    """``cfl * dx / max(|u| + c_max sqrt(T))`` with ``c_max`` the largest root of He_{M+1}."""
    w = np.asarray(w, dtype=float)
    rho, half_p = w[:, 0], w[:, 2]
    bad = ~((rho > 0) & (half_p > 0))
    if np.any(bad):
        cell = int(np.argmax(bad))
        raise InadmissibleStateError(f"cell {cell} is inadmissible: rho={rho[cell]!r}, P/2={half_p[cell]!r}")
    M = w.shape[1] - 1
    c_max = float(hermite_roots(M + 1)[-1])
    speed = np.max(np.abs(w[:, 1]) + c_max * np.sqrt(2 * half_p / rho))
    return cfl * grid.dx / speed


def _with_ghosts(w, boundary):
    if boundary == "periodic":
        return np.concatenate([w[-1:], w, w[:1]])
    return np.concatenate([w[:1], w, w[-1:]])


def _transport(w, grid, dt, time=None):
    ext = _with_ghosts(w, grid.boundary)
    left, right = ext[:-1], ext[1:]
    jump = right - left
    A = convection_matrix_1d(0.5 * (left + right))
    try:
        lam, R = np.linalg.eig(A)
        Rinv = np.linalg.inv(R)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(f"interface eigendecomposition failed: {exc}", time=time) from exc
    scale = np.abs(lam).max(axis=1) + 1e-300
    if np.any(np.abs(lam.imag) > 1e-8 * scale[:, None]):
        face = int(np.argmax(np.abs(lam.imag).max(axis=1)))
        raise SolverFailureError(f"complex wave speeds at interface {face}", cell=face, time=time)
    lam, R, Rinv = lam.real, R.real, Rinv.real
    char = np.einsum("fij,fj->fi", Rinv, jump)
    minus = np.einsum("fij,fj->fi", R, np.minimum(lam, 0.0) * char)
    plus = np.einsum("fij,fj->fi", R, np.maximum(lam, 0.0) * char)
    # interface k sits between ext[k] and ext[k+1]; cell i is ext[i+1]
    out = w - dt / grid.dx * (plus[:-1] + minus[1:])
    return out, float(np.abs(lam).max())


def transport_step(w, grid, dt):
    """One upwind step of ``dw/dt + A(w) dw/dx = 0``."""
    w = np.asarray(w, dtype=float)
    out, _ = _transport(w, grid, dt)
    _check_admissible(out)
    return out


class _SourceOperator:
    """Per-cell source data for a static potential at fixed cell centres."""

    def __init__(self, M, x, potential, hbar, tau):
        self.M, self.tau = M, tau
        odd = [lam for lam in range(3, M + 1, 2)]
        max_order = max([1] + odd)
        D = np.array([potential.derivative_1d(k, x) if k in [1] + odd else np.zeros_like(x)
                      for k in range(max_order + 1)])
        self.force = -D[1]
        cells = len(x)
        # f-block of G (rows/cols 3..M) and its rho column, without relaxation
        self.L = np.zeros((cells, M + 1, M + 1))
        self.b = np.zeros((cells, M + 1))
        if hbar > 0:
            for n in range(3, M + 1):
                for lam in odd:
                    src = n - lam
                    if src == 0:
                        self.b[:, n] += wigner_coefficient(lam, hbar, D[lam])
                    elif src >= 3:
                        self.L[:, n, src] += wigner_coefficient(lam, hbar, D[lam])

    def apply(self, w, dt):
        out = w.copy()
        out[:, 1] += self.force * dt
        g0 = w.copy()
        g0[:, :3] = 0.0
        brho = self.b * w[:, :1]
        lg = np.einsum("cij,cj->ci", self.L, g0)
        g_half = g0 + 0.5 * dt * (lg + brho)
        if np.isfinite(self.tau):
            decay_half = math.exp(-0.5 * dt / self.tau)
            decay = decay_half * decay_half
        else:
            decay_half = decay = 1.0
        g1 = g0 + dt * (np.einsum("cij,cj->ci", self.L, g_half) + brho / decay_half)
        out[:, 3:] = decay * g1[:, 3:]
        return out


def source_step(w, dt, potential, x, hbar, tau):
    """Integrate ``dw/dt = G w`` per cell over ``dt``.

    ``u`` gains ``-V'(x) dt`` exactly.  With ``g = exp(t/tau) f`` the f-block
    becomes ``dg/dt = L g + exp(t/tau) b rho`` (``L`` strictly lower
    triangular), advanced by one explicit midpoint step.
    """
    w = np.asarray(w, dtype=float)
    op = _SourceOperator(w.shape[1] - 1, np.asarray(x, dtype=float), potential, hbar, tau)
    out = op.apply(w, dt)
    _check_admissible(out)
    return out


def _totals(w, x, potential_dV, dx):
    rho, u, half_p = w[:, 0], w[:, 1], w[:, 2]
    mass = rho.sum() * dx
    momentum = (rho * u).sum() * dx
    energy = (0.5 * rho * u * u + half_p).sum() * dx
    m_force = rho * potential_dV
    e_force = rho * u * potential_dV
    return (mass, momentum, energy, -m_force.sum() * dx, np.abs(m_force).sum() * dx,
            -e_force.sum() * dx, np.abs(e_force).sum() * dx)


def _initial_field(initial, grid, order):
    x = grid.centers
    if callable(initial):
        rows = []
        for xi in x:
            s = initial(float(xi))
            rows.append(s.as_vector() if isinstance(s, MomentState1D) else np.asarray(s, float))
        w = np.array(rows)
    else:
        w = np.array(initial, dtype=float)
    if w.shape != (grid.cells, order + 1):
        raise InvalidArgumentError(f"initial field has shape {w.shape}, expected {(grid.cells, order + 1)}")
    return w


def run(config: SolverConfig, grid: Grid1D, initial: Callable | np.ndarray):
    """Strang-split time loop ``source(dt/2) -> transport(dt) -> source(dt/2)``.

    ``initial`` is a callable ``x -> MomentState1D`` (or unknown vector) or a
    ready field array.  The last step is shortened to land on ``t_end``.  On
    failure the :class:`SolverFailureError` carries the trajectory so far.
    """
    M = config.order
    x = grid.centers
    w = _initial_field(initial, grid, M)
    traj = Trajectory(x=x, order=M)
    names = ("mass", "momentum", "energy", "momentum_residual", "energy_residual",
             "momentum_forcing", "energy_forcing", "courant")
    traj.diagnostics = {k: [] for k in names}
    dV = config.potential.derivative_1d(1, x)
    source = _SourceOperator(M, x, config.potential, config.hbar, config.tau)
    t = 0.0
    try:
        _check_admissible(w, time=t)
        tot0 = _totals(w, x, dV, grid.dx)
        prev = tot0
        m_impulse = e_work = m_mag = e_mag = 0.0
        courant = 0.0

        def record():
            mass, mom, en = prev[:3]
            traj.times.append(t)
            traj.fields.append(w.copy())
            d = traj.diagnostics
            d["mass"].append(mass)
            d["momentum"].append(mom)
            d["energy"].append(en)
            d["momentum_residual"].append(abs(mom - tot0[1] - m_impulse))
            d["energy_residual"].append(abs(en - tot0[2] - e_work))
            d["momentum_forcing"].append(m_mag)
            d["energy_forcing"].append(e_mag)
            d["courant"].append(courant)

        record()
        step = 0
        while t < config.t_end:
            dt = stable_dt(w, grid, config.cfl)
            last = t + dt >= config.t_end * (1 - 1e-14)
            if last:
                dt = config.t_end - t
            w = source.apply(w, 0.5 * dt)
            _check_admissible(w, time=t)
            w, speed = _transport(w, grid, dt, time=t)
            _check_admissible(w, time=t)
            w = source.apply(w, 0.5 * dt)
            _check_admissible(w, time=t)
            t = config.t_end if last else t + dt
            step += 1
            cur = _totals(w, x, dV, grid.dx)
            # trapezoid in time for the balance sources
            m_impulse += 0.5 * dt * (prev[3] + cur[3])
            m_mag += 0.5 * dt * (prev[4] + cur[4])
            e_work += 0.5 * dt * (prev[5] + cur[5])
            e_mag += 0.5 * dt * (prev[6] + cur[6])
            prev = cur
            courant = max(courant, speed * dt / grid.dx)
            if last or step % config.output_stride == 0:
                record()
                courant = 0.0
    except (SolverFailureError, InadmissibleStateError) as exc:
        err = exc if isinstance(exc, SolverFailureError) else SolverFailureError(str(exc), time=t)
        if err.time is None:
            err.time = t
        err.trajectory = traj
        raise err from (None if err is exc else exc)
    return traj

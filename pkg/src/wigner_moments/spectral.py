"""Eigenstructure of assembled systems and comparison with the Hermite-root spectrum."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .assembly import QuasiLinearSystem1D, QuasiLinearSystem3D
from .errors import InvalidArgumentError, NumericalFailureError
from .hermite import hermite_roots
from .indexing import index_set_size

CONDITION_LIMIT = 1e8

# Multiplicity of the roots of He_m in the 3D spectrum, bootstrapped from
# eigensolves at random admissible states and re-verified by the test suite.
ROOT_MULTIPLICITIES = {
    3: {1: 4, 2: 3, 3: 2, 4: 1},
    4: {1: 5, 2: 4, 3: 3, 4: 2, 5: 1},
    5: {1: 6, 2: 5, 3: 4, 4: 3, 5: 2, 6: 1},
    6: {1: 7, 2: 6, 3: 5, 4: 4, 5: 3, 6: 2, 7: 1},
    7: {1: 8, 2: 7, 3: 6, 4: 5, 5: 4, 6: 3, 7: 2, 8: 1},
    8: {1: 9, 2: 8, 3: 7, 4: 6, 5: 5, 6: 4, 7: 3, 8: 2, 9: 1},
}


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    predicted: np.ndarray
    max_abs_deviation: float
    max_imag: float
    eigenvector_condition: float
    hyperbolic: bool

    def to_json(self, **extra):
        rec = asdict(self)
        rec["eigenvalues"] = [float(v) for v in np.real(self.eigenvalues)]
        rec["predicted"] = [float(v) for v in self.predicted]
        rec["max_abs_deviation"] = float(self.max_abs_deviation)
        rec["max_imag"] = float(self.max_imag)
        cond = float(self.eigenvector_condition)
        rec["eigenvector_condition"] = cond if math.isfinite(cond) else None
        rec["hyperbolic"] = bool(self.hyperbolic)
        rec.update(extra)
        return json.dumps(rec, sort_keys=True)


def predicted_spectrum_1d(M, u, temperature):
    if not temperature > 0:
        raise InvalidArgumentError("temperature must be positive")
    return np.sort(u + math.sqrt(temperature) * hermite_roots(M + 1))


def predicted_spectrum_3d(M, u, temperature, n):
    n = np.asarray(n, dtype=float)
    if not abs(np.linalg.norm(n) - 1.0) < 1e-12:
        raise InvalidArgumentError("direction must be a unit vector")
    if not temperature > 0:
        raise InvalidArgumentError("temperature must be positive")
    if M not in ROOT_MULTIPLICITIES:
        raise InvalidArgumentError(f"no frozen 3D multiplicities for M={M}")
    c = np.concatenate([np.repeat(hermite_roots(m), k) for m, k in ROOT_MULTIPLICITIES[M].items()])
    assert len(c) == index_set_size(M)
    return np.sort(float(np.dot(u, n)) + math.sqrt(temperature) * c)


def match_multisets(computed, predicted):
    """Greedy nearest pairing; returns the largest pair distance."""
    remaining = list(np.asarray(predicted, dtype=float))
    worst = 0.0
    for value in sorted(np.asarray(computed), key=lambda z: np.real(z)):
        dist = [abs(value - p) for p in remaining]
        k = int(np.argmin(dist))
        worst = max(worst, dist[k])
        remaining.pop(k)
    return worst


def _eigensystem(matrix, state):
    try:
        values, vectors = np.linalg.eig(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver failed: {exc}", state=state) from exc
    return values, vectors


def certify(system, direction=None, imag_tol=1e-9):
    """Eigen-decompose A (1D) or ``sum_j n_j Mhat_j`` (3D) and compare with the prediction."""
    state = system.state
    if state is None:
        raise InvalidArgumentError("system carries no state; assemble it with assemble_1d/assemble_3d")
    if isinstance(system, QuasiLinearSystem1D):
        matrix = system.A
        predicted = predicted_spectrum_1d(system.order, state.u, state.temperature)
        speed = abs(state.u) + math.sqrt(state.temperature)
    elif isinstance(system, QuasiLinearSystem3D):
        if direction is None:
            raise InvalidArgumentError("3D certification needs a direction")
        n = np.asarray(direction, dtype=float)
        matrix = system.directional(n)
        predicted = predicted_spectrum_3d(system.order, state.u, state.temperature, n)
        speed = abs(float(np.dot(state.u, n))) + math.sqrt(state.temperature)
    else:
        raise InvalidArgumentError(f"cannot certify {type(system).__name__}")
    values, vectors = _eigensystem(matrix, state)
    max_imag = float(np.max(np.abs(values.imag)))
    real = max_imag <= imag_tol * speed
    cond = float(np.linalg.cond(vectors)) if real else math.inf
    order = np.argsort(values.real)
    values = values[order]
    deviation = match_multisets(values, predicted)
    hyperbolic = bool(real and np.isfinite(cond) and cond < CONDITION_LIMIT)
    return SpectralReport(values.real if real else values, predicted, deviation, max_imag, cond, hyperbolic)

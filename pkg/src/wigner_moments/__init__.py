"""Hermite moment systems for the 1D and 3D Wigner equation with BGK relaxation."""

from .assembly import (QuasiLinearSystem1D, QuasiLinearSystem3D, assemble_1d, assemble_3d,
                       convection_matrix_1d, wigner_coefficient)
from .asymptotics import AsymptoticPrediction, g_of_x, predict, steady_classical_state
from .errors import (DomainError, InadmissibleStateError, InvalidArgumentError, NumericalFailureError,
                     SolverFailureError, UnsupportedOrderError)
from .hermite import HermiteBasisParams, basis_eval, gauss_hermite, hermite_eval, hermite_roots
from .indexing import MultiIndex, enumerate_index_set, index_set_size, ordinal
from .potential import PotentialModel, bump_potential
from .solver import Grid1D, SolverConfig, Trajectory, run, source_step, stable_dt, transport_step
from .spectral import SpectralReport, certify, predicted_spectrum_1d, predicted_spectrum_3d
from .state import MomentState1D, MomentState3D, maxwellian_state

__version__ = "0.1.0"

"""Quantum Fisher information of SU(1,1) interferometers in a truncated Fock space."""
from .analytic import AnalyticParams
from .config import InterferometerConfig
from .errors import (ConvergenceError, CutoffError, DimensionError, PreconditionError,
                     ResourceError, Su11Error, UnsupportedError)
from .fock import (FockCutoff, NumberDiagonalEnsemble, TwoModePureState, covariance,
                   expectation, generator, variance)
from .metrology import (QFIMatrix, QfiResult, parity_cfi, qfi_ensemble_convexity,
                        qfi_fidelity_fd, qfi_pure, qfi_sld, qfim)
from .opa import OpaParams, PhaseModel, apply_opa, apply_phase, second_opa
from .states import ModeSpec, phase_average, product_state

__version__ = "0.1.0"

"""Certified desk-scale spectral checks for a waveguide-in-an-oscillator model.

The planar operator couples a harmonic confinement in one direction to a
compactly supported channel potential evaluated along the product of the
coordinates.  This package classifies the spectral regime from a 1D
comparison problem, computes eigenvalue ladders on growing boxes, builds
oscillating families whose residuals certify spectral inclusion intervals,
and evaluates both sides of an eigenvalue-moment inequality, with every
reported number carrying an explicit accuracy statement.
"""

from . import errors
from .analysis1d import (
    GroundState1D,
    RegimeClassification,
    classify,
    critical_lambda,
    gamma0,
    kappa,
)
from .certificates import (
    QuasiModeReport,
    TrialFormReport,
    critical_quasimode_residual,
    spectrum_certificate,
    subcritical_quasimode_residual,
    trial_form_value,
)
from .config import (
    Config,
    apply_env,
    config_digest,
    dump_config,
    load_config,
    parse_config,
)
from .eigensolve import SpectralResult, dense_tridiagonal_eigs, extremal_sparse_eigs
from .grids import (
    Grid1D,
    Grid2D,
    SparseSymmetricOperator,
    assemble_H,
    assemble_L,
)
from .model import (
    ModelParams,
    PotentialSpec,
    WindowSpec,
    make_potential,
    make_window,
    oscillator_ground_state,
)
from .momentbound import (
    MomentBoundContext,
    MomentBoundReport,
    alpha1,
    alpha_sequence,
    check_bound,
    default_box_ladder,
    lhs_trace,
    rhs_bound,
)
from .quadrature import integrate, integrate_adaptive
from .reporting import CertificateReport

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "Config",
    "Grid1D",
    "Grid2D",
    "GroundState1D",
    "ModelParams",
    "MomentBoundContext",
    "MomentBoundReport",
    "PotentialSpec",
    "QuasiModeReport",
    "RegimeClassification",
    "SparseSymmetricOperator",
    "SpectralResult",
    "TrialFormReport",
    "WindowSpec",
    "alpha1",
    "alpha_sequence",
    "apply_env",
    "assemble_H",
    "assemble_L",
    "check_bound",
    "classify",
    "config_digest",
    "critical_lambda",
    "critical_quasimode_residual",
    "default_box_ladder",
    "dense_tridiagonal_eigs",
    "dump_config",
    "errors",
    "extremal_sparse_eigs",
    "gamma0",
    "integrate",
    "integrate_adaptive",
    "kappa",
    "lhs_trace",
    "load_config",
    "make_potential",
    "make_window",
    "oscillator_ground_state",
    "parse_config",
    "rhs_bound",
    "spectrum_certificate",
    "subcritical_quasimode_residual",
    "trial_form_value",
    "__version__",
]

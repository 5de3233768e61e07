"""Arc-local Darlington synthesis for rational Schur functions.

Given a rational Schur function ``s`` and an arc of the unit circle, build a
2x2 matrix function with ``s`` in the lower-right corner that is unitary
almost everywhere on the arc, with all entries bounded by one in the disk,
and certify the result numerically.
"""

from .boundary import (
    DEFAULT_QUAD,
    CircleArc,
    LogWeight,
    QuadratureConfig,
    arc_complement,
    localized_outer_eval,
    log_integral,
    schwarz_exponent,
    sigma_arc_eval,
    two_level_outer_eval,
)
from .errors import ArcSynthError
from .pipeline import Outcome, VerifyConfig, reverify, run
from .rational import ComplexPoly, RationalFn, certify_schur, inner_outer, nevanlinna_split, para_conjugate
from .synthesis import (
    AnalyticElement,
    MatrixFn2,
    SynthesisConfig,
    assemble_pair,
    assemble_S,
    assemble_V,
    build_first_column,
    build_g_h,
    build_p,
    build_pseudocontinuation,
    build_r,
    diagonal_embedding,
)
from .verification import Report

__version__ = "0.1.0"

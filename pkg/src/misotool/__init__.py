"""m-isometric operators on finite-dimensional Hilbert spaces.

Defect operators and beta functionals, strict-order search, the
decomposition ``T = A + Q`` into a unitary and a commuting nilpotent,
spectral and volume checks, and the lift of an m-isometry to a strict
(m+1)-isometry on a weighted polynomial space. Matrices are numpy arrays,
either ``complex128`` or object arrays of :class:`GaussianRational` for
exact arithmetic.
"""

from .analysis import (IsometryReport, beta, binomial_alternating_sum, defect_operator,
                       even_collapse_check, is_m_isometry, strict_order)
from .errors import (ClassificationError, ConvergenceError, DomainError, ExactPathError,
                     MisotoolError, ParseError, PreconditionError)
from .exact import GaussianRational
from .generators import (BuilderSpec, counterexample_3x3, nilpotent_r2, paper_example_AQ,
                         reflection, rotation, strict_isometry_builder)
from .jsonio import emit_matrix, emit_vector, parse_matrix, parse_vector
from .lifting import LiftContext, Polynomial, lift_check, lifted_beta, lifted_norm_sq
from .linalg import as_matrix, as_vector, to_exact, to_float
from .spectral import (JordanDecomp, eigenspace_orthogonality, jordan_decompose, k_volume,
                       spectral_summary, volume_preservation_check)

__all__ = [
    "IsometryReport", "beta", "binomial_alternating_sum", "defect_operator",
    "even_collapse_check", "is_m_isometry", "strict_order", "ClassificationError",
    "ConvergenceError", "DomainError", "ExactPathError", "MisotoolError", "ParseError",
    "PreconditionError", "GaussianRational", "BuilderSpec", "counterexample_3x3",
    "nilpotent_r2", "paper_example_AQ", "reflection", "rotation",
    "strict_isometry_builder", "emit_matrix", "emit_vector", "parse_matrix",
    "parse_vector", "LiftContext", "Polynomial", "lift_check", "lifted_beta",
    "lifted_norm_sq", "as_matrix", "as_vector", "to_exact", "to_float", "JordanDecomp",
    "eigenspace_orthogonality", "jordan_decompose", "k_volume", "spectral_summary",
    "volume_preservation_check",
]

__version__ = "0.1.0"

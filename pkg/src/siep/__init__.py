"""Real symmetric matrices with a prescribed graph and spectrum.

Finite graphs are handled by growing the matrix one vertex at a time and
restoring the spectrum through the diagonal after each new row of edges.
Countable graphs are handled through a tower of such finite solutions whose
consecutive differences shrink geometrically.
"""
from ._backend import BACKEND
from .errors import (
    BudgetInfeasible,
    DuplicateEigenvalues,
    EigenvalueCollision,
    JacobianSingular,
    NoConvergence,
    SequenceExhausted,
    SiepError,
    StreamExhausted,
    WspLost,
)
from .finite import SiepSolution, SolveOptions, StepRecord, solve_finite, step_extend
from .graph import FiniteGraph, LowerAdjacencyStream, induced_prefix, validate_pattern
from .infinite import (
    DenseSequenceSpec,
    SpectralCertificate,
    SpectralFingerprint,
    TruncationTower,
    build_tower,
    certify_spectrum,
    compare_fingerprints,
    fingerprint,
    limit_points,
)
from .linalg import (
    EigenDecomposition,
    commutator,
    hausdorff_distance,
    operator_norm,
    power_diagonals,
    sym_eigen,
    sym_matrix,
)
from .newton import g_eval, jac_x, powersum_targets, solve_diagonal_correction
from .wsp import WspCertificate, has_wsp, wsp_constraint_matrix

__version__ = "0.1.0"

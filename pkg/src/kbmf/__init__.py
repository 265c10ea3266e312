"""
Rank-k binary matrix factorisation: exact and heuristic solvers.
"""

__version__ = "0.1.0"

from .matrix import BinaryMatrix, Factorisation, Rank1Pattern, boolean_product  # noqa: E402
from .objective import ObjectiveSpec, frobenius_error, reconstruction_percentage, rho_error  # noqa: E402
from .preprocess import WeightedBinaryMatrix, expand, reduce  # noqa: E402
from .heuristics import k_greedy  # noqa: E402
from .colgen import CgConfig, certify_optimality, integral_stage, run_cg  # noqa: E402
from .pipeline import PipelineConfig, PipelineResult, factorize, solve_compact  # noqa: E402
from .io import read_matrix, write_matrix  # noqa: E402

__all__ = [
    "BinaryMatrix", "Factorisation", "Rank1Pattern", "boolean_product",
    "ObjectiveSpec", "frobenius_error", "rho_error", "reconstruction_percentage",
    "WeightedBinaryMatrix", "reduce", "expand", "k_greedy",
    "CgConfig", "run_cg", "integral_stage", "certify_optimality",
    "PipelineConfig", "PipelineResult", "factorize", "solve_compact",
    "read_matrix", "write_matrix",
]

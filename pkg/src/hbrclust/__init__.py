"""Spectral clustering by contrast-function maximization on the unit sphere."""

from .baselines import AccuracyReport, matched_accuracy, oracle_centroids, spherical_kmeans
from .contrasts import (
    Contrast,
    EmpiricalObjective,
    RobustnessConstants,
    builtin_contrast,
    check_admissibility,
    contrast_from_spec,
    estimate_robustness,
    fg_gradient,
    fg_value,
)
from .embedding import Embedding, embed_graph, embedding_deviation, spectral_embed
from .errors import (
    DegenerateDegreeError,
    ExhaustionError,
    HbrError,
    InputError,
    NumericalError,
    StructuralError,
)
from .graph import (
    CutCosts,
    LaplacianKind,
    Partition,
    SimilarityGraph,
    connected_components,
    cut_costs,
    gaussian_similarity,
    laplacian,
)
from .hbr import (
    HbrEnumConfig,
    HbrOptConfig,
    RecoveredBasis,
    assign_clusters,
    hbr_enum,
    hbr_opt,
)
from .linalg import SymEigResult, operator_norm, procrustes_rotation, project_orthogonal, sym_eig

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "Contrast",
    "CutCosts",
    "DegenerateDegreeError",
    "Embedding",
    "EmpiricalObjective",
    "ExhaustionError",
    "HbrEnumConfig",
    "HbrError",
    "HbrOptConfig",
    "InputError",
    "LaplacianKind",
    "NumericalError",
    "Partition",
    "RecoveredBasis",
    "RobustnessConstants",
    "SimilarityGraph",
    "StructuralError",
    "SymEigResult",
    "assign_clusters",
    "builtin_contrast",
    "check_admissibility",
    "connected_components",
    "contrast_from_spec",
    "cut_costs",
    "embed_graph",
    "embedding_deviation",
    "estimate_robustness",
    "fg_gradient",
    "fg_value",
    "gaussian_similarity",
    "hbr_enum",
    "hbr_opt",
    "laplacian",
    "matched_accuracy",
    "operator_norm",
    "oracle_centroids",
    "procrustes_rotation",
    "project_orthogonal",
    "spectral_embed",
    "spherical_kmeans",
    "sym_eig",
]

"""Spectral clustering zones + conditioned Latin hypercube sampling.

The heavy lifting lives in the C++ extension `speclhs._core`; this package
re-exports its public surface.
"""

from ._core import (
    CLHSDesign,
    ClusterModel,
    PCAProjection,
    SpeclhsError,
    StratifiedDesign,
    TraceEntry,
    ValidityReport,
    allocate,
    calinski_harabasz_score,
    clhs,
    clhs_objective,
    cluster,
    pca,
    quantile_strata,
    select_k,
    silhouette_score,
    spectral_clhs,
)

__version__ = "0.1.0"

__all__ = [
    "CLHSDesign",
    "ClusterModel",
    "PCAProjection",
    "SpeclhsError",
    "StratifiedDesign",
    "TraceEntry",
    "ValidityReport",
    "allocate",
    "calinski_harabasz_score",
    "clhs",
    "clhs_objective",
    "cluster",
    "pca",
    "quantile_strata",
    "select_k",
    "silhouette_score",
    "spectral_clhs",
    "__version__",
]

"""Covariance descriptors for image sets on the SPD manifold.

The main entry points are the scikit-learn style estimators
:class:`CovDsSEncoder`, :class:`CovDsEncoder`, :class:`SPDNearestNeighbor` and
:class:`LogEuclideanSVC`; the functional building blocks live in the
submodules.
"""

from .alignment import (
    KernelWeights,
    alignment,
    binarize_weights,
    build_problem,
    learn_weights,
    solve_weights,
)
from .classifiers import nn_classify, svm_predict, svm_train
from .descriptors import (
    CovDsS,
    ImageSet,
    PipelineConfig,
    build_covds_s,
    extract_subsets,
    finalize_representation,
    gaussian_embed,
    traditional_covds,
)
from .estimators import CovDsEncoder, CovDsSEncoder, LogEuclideanSVC, SPDNearestNeighbor
from .kernels import (
    KernelSpec,
    angular_j,
    arccos_kernel,
    center_gram,
    gram,
    loge_arc_kernel,
    loge_linear_kernel,
    loge_variant_kernel,
)
from .metrics import MetricKind, airm_dist, distance, jeffrey_div, lem_dist, stein_div
from .spd import mean_centralize, spd_log, sym_eig, sym_exp

__version__ = "0.1.0"

__all__ = [
    "KernelWeights",
    "alignment",
    "binarize_weights",
    "build_problem",
    "learn_weights",
    "solve_weights",
    "nn_classify",
    "svm_predict",
    "svm_train",
    "CovDsS",
    "ImageSet",
    "PipelineConfig",
    "build_covds_s",
    "extract_subsets",
    "finalize_representation",
    "gaussian_embed",
    "traditional_covds",
    "CovDsEncoder",
    "CovDsSEncoder",
    "LogEuclideanSVC",
    "SPDNearestNeighbor",
    "KernelSpec",
    "angular_j",
    "arccos_kernel",
    "center_gram",
    "gram",
    "loge_arc_kernel",
    "loge_linear_kernel",
    "loge_variant_kernel",
    "MetricKind",
    "airm_dist",
    "distance",
    "jeffrey_div",
    "lem_dist",
    "stein_div",
    "mean_centralize",
    "spd_log",
    "sym_eig",
    "sym_exp",
]

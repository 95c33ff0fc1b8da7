"""Surrogate-density classification for discretized functional data.

Curves are reduced to principal-component scores, the joint score density
is estimated by a kernel method, and classification proceeds either
unsupervised (modes and upper-level-set regions of the estimated density)
or supervised (a prior-weighted kernel Bayes rule per group).
"""

__version__ = "0.1.0"

from .cluster import ClusterConfig, ClusterResult, assign_new, cluster
from .decay import DecayReport, ball_volume, classify_decay
from .density import (
    Bandwidth,
    DensityEstimate,
    KernelSpec,
    kde_at,
    kde_on_grid,
    silverman_bandwidth,
)
from .discriminant import (
    ClassifierModel,
    CrossValidationResult,
    Prediction,
    cross_validate,
    predict,
    predict_labels,
    train,
)
from .errors import DataError, NumericalError, SurdensError, ValidationError
from .fpca import FpcaModel, fev, fit_fpca, modal_curve, project
from .funcdata import (
    AbscissaGrid,
    FunctionalSample,
    center,
    inner_product,
    second_derivative,
)
from .harness import (
    ExperimentReport,
    grid_search,
    kmeans_baseline,
    run_clustering_experiment,
    run_discriminant_experiment,
)
from .io import read_curves, write_curves
from .modegrid import (
    ModeSet,
    RegionSet,
    RegularGrid,
    build_grid,
    extract_regions,
    find_modes,
    locate_cell,
)
from .simulate import HorseshoeConfig, beta55_scaled, generate
from .validation import ValidationScores, calinski_harabasz, misclassification, purity

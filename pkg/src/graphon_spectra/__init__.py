"""Limiting spectra of graphon-profiled random-matrix Laplacians.

Moment formulas built from rooted planar trees and trace words, the free
additive convolution of semicircle and Gaussian laws, samplers for the
matching random-matrix and random-graph ensembles, and the eigenvalue
statistics used to verify them.
"""

from .errors import CapacityError, ConvergenceError, GraphonSpectraError, ValidationError
from .graphons import (
    ConstantGraphon,
    Graphon,
    Profile,
    ProductGraphon,
    SimpleGraph,
    StepGraphon,
    cut_distance_step,
    cut_norm,
    discretize_kernel,
    empirical_graphon,
    graphon_from_json,
    hom_density,
    l1_distance,
)
from .trees import (
    DecoratedTree,
    RootedPlanarTree,
    TraceWord,
    catalan,
    decorate_tree,
    enumerate_trees,
    enumerate_words,
    gaussian_moment,
    gaussian_weight,
)
from .moments import (
    MomentReport,
    adjacency_moment,
    diagonal_moment,
    laplacian_moment,
    moment_table,
)
from .freeconv import (
    DensityCurve,
    StieltjesGrid,
    convolved_free_cumulants,
    free_convolution_density,
    free_convolution_stieltjes,
    free_cumulants_from_moments,
    gaussian_stieltjes,
    moments_from_free_cumulants,
)
from .ensembles import (
    center_scale,
    constrained_epsilon,
    laplacian_of,
    sample_constrained,
    sample_decoupled_model,
    sample_generalized_wigner,
    sample_inhom_er,
    sample_multiplicative_model,
    sample_sparse_w_random,
    solve_constrained,
    variance_matrix,
)
from .spectra import (
    NormScanResult,
    SpectralSample,
    eigenvalues_sym,
    esd_moments,
    histogram,
    ks_distance,
    levy_distance,
    mean_norm_scan,
    norm_scan,
    spectral_norm,
)

__version__ = "0.1.0"

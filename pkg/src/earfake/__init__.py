"""earfake: ear-biometric fake-media detection toolkit.

A desk-scale, gradient-free detection pipeline: frame preprocessing and
ear descriptors, a Bi-GRU sequence scorer and a DBN scorer whose weights
are tuned by a self-upgraded jellyfish swarm optimizer, improved
score-level fusion, and the statistical evaluation protocol with four
perturbation test cases.
"""

from .activations import (
    ActivationKind,
    bipolar_sigmoid,
    hyper_sig,
    hyper_sig_derivative,
    hyperbolic_activation,
    logistic_sigmoid,
)
from .bigru import BiGruModel, GruWeights, bigru_forward, bigru_score, flatten_w1, unflatten_w1
from .dbn import DbnModel, RbmLayer, dbn_forward, dbn_pretrain, flatten_w2, unflatten_w2
from .errors import ConfigError, DomainError, EarfakeError, FitError
from .features import (
    EarRegion,
    FeatureVector,
    PcaModel,
    build_feature_vector,
    curvature_features,
    ear_size_features,
    fit_ellipse,
    pca_fit,
    pca_project,
    pooled_ear_embedding,
)
from .frames import FrameBuffer, gaussian_blur, min_max_normalize, resize, to_grayscale
from .fusion import (
    FusionResult,
    FusionStats,
    ScoreBatch,
    coefficient_cv,
    error_terms,
    fuse,
    improved_normalize,
    local_factor,
)
from .jellyfish import (
    Swarm,
    SwarmConfig,
    benchmark_objectives,
    boundary_reentry,
    optimize,
    time_control,
)
from .metrics import ConfusionCounts, RunStatistics, confusion, metric_suite, roc_curve, run_statistics
from .pipeline import RunConfig, TrainedArtifact, evaluate, run_report, train
from .synthetic import GeneratorConfig, SyntheticDataset, apply_test_case, generate_synthetic

__version__ = "0.1.0"

"""Shrinkage exemplar networks for few-shot classification.

Support embeddings of each class are shrunk toward the class mean by a
Tikhonov spectral filter of the class scatter. The shrinkage coefficient
``lambda`` interpolates between an exemplar classifier (``lambda = 0``) and
prototype / subspace classifiers (``lambda -> inf``).
"""

from .backbone import Backbone, load_backbone, save_backbone
from .classifier import (
    PROTOTYPE_LAMBDA,
    TaskConfig,
    Variant,
    class_posterior,
    distance_matrix,
    episode_posteriors,
    pairwise_probabilities,
    predict,
    probabilities_from_distances,
    prototype_posterior,
    shrinkage_distance_s1,
    shrinkage_distance_s2,
)
from .data import Dataset, DatasetSpec, add_gaussian_noise, generate_dataset, load_dataset, save_dataset
from .episodes import Episode, augment_episode, augment_single_shot, sample_episode
from .errors import ConfigError, ConvergenceError, DataError, NumericalError, SENetError, TrainingDiverged
from .evaluation import EvalResult, evaluate, evaluate_many
from .linalg import EigenDecomposition, project_residual, scatter_and_mean, sym_eigen
from .loss import LossReport, embedding_gradient, loss_distance_gradient, senet_loss
from .shrinkage import (
    ClassFilter,
    ShrinkageConfig,
    apply_filter,
    build_class_filter,
    build_filters,
    tikhonov_gain,
)
from .training import TrainConfig, train

__version__ = "0.1.0"

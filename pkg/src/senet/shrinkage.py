"""Per-class spectral shrinkage filters built from support embeddings.

A class filter rescales each eigendirection of the class scatter by the
Tikhonov gain ``gamma / (lambda + gamma)``. Directions with (numerically) zero
scatter keep gain 1, so vectors orthogonal to the support span pass through
untouched while the support span is contracted toward the class mean.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .linalg import EigenDecomposition, scatter_and_mean, sym_eigen

DEFAULT_RANK_EPSILON_REL = 1e-10


@dataclass(frozen=True)
class ShrinkageConfig:
    lam: float = 0.0
    rank_epsilon_rel: float = DEFAULT_RANK_EPSILON_REL

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ConfigError(f"lambda must be finite and >= 0, got {self.lam}")
        if not 0 < self.rank_epsilon_rel < 1:
            raise ConfigError(
                f"rank_epsilon_rel must lie in (0, 1), got {self.rank_epsilon_rel}"
            )


@dataclass(frozen=True)
class ClassSpectrum:
    """Mean and scatter eigendecomposition of one class; independent of lambda."""

    class_id: object
    mean: np.ndarray
    eigen: EigenDecomposition
    count: int

    def rank_threshold(self, rank_epsilon_rel=DEFAULT_RANK_EPSILON_REL):
        return rank_epsilon_rel * max(float(self.eigen.eigenvalues[0]), 1e-300)

    def span_basis(self, rank_epsilon_rel=DEFAULT_RANK_EPSILON_REL):
        """Orthonormal rows spanning the centered supports."""
        keep = self.eigen.eigenvalues > self.rank_threshold(rank_epsilon_rel)
        return self.eigen.eigenvectors[:, keep].T


@dataclass(frozen=True)
class ClassFilter:
    class_id: object
    mean: np.ndarray
    eigen: EigenDecomposition
    gains: np.ndarray
    filter_matrix: np.ndarray
    config: ShrinkageConfig = field(default_factory=ShrinkageConfig)

    @property
    def dim(self):
        return self.mean.shape[0]


def tikhonov_gain(gamma, lam, rank_threshold=0.0):
    """Tikhonov filter gain ``gamma / (lam + gamma)``, or 1 on the null branch.

    Works elementwise on arrays. Eigenvalues at or below ``rank_threshold``
    count as zero; tiny negative round-off is clamped.
    """
    if np.any(np.asarray(lam) < 0):
        raise ConfigError(f"lambda must be >= 0, got {lam}")
    gamma = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    null = gamma <= rank_threshold
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(null, 1.0, gamma / (lam + np.where(null, 1.0, gamma)))
    return float(g) if g.ndim == 0 else g


def class_spectrum(supports, class_id=None):
    mean, scatter = scatter_and_mean(supports)
    eigen = sym_eigen(scatter)
    return ClassSpectrum(class_id, mean, eigen, int(np.shape(supports)[0]))


def filter_from_spectrum(spectrum, config):
    """Assemble ``M = W diag(g) W^T`` for one lambda from a precomputed spectrum."""
    eigen = spectrum.eigen
    threshold = spectrum.rank_threshold(config.rank_epsilon_rel)
    gains = np.atleast_1d(tikhonov_gain(eigen.eigenvalues, config.lam, threshold))
    w = eigen.eigenvectors
    if np.all(gains == 1.0):
        matrix = np.eye(w.shape[0])
    else:
        matrix = (w * gains) @ w.T
        matrix = 0.5 * (matrix + matrix.T)
    return ClassFilter(spectrum.class_id, spectrum.mean, eigen, gains, matrix, config)


def build_class_filter(supports, config, class_id=None):
    """Build the shrinkage filter of one class from its support embeddings."""
    return filter_from_spectrum(class_spectrum(supports, class_id), config)


def build_filters(supports, labels, config, num_classes=None):
    """One filter per episode class, indexed by label ``0..C-1``."""
    supports = np.asarray(supports, dtype=float)
    labels = np.asarray(labels)
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    return [
        build_class_filter(supports[labels == c], config, class_id=c)
        for c in range(num_classes)
    ]


def apply_filter(class_filter, v):
    """Return ``M v`` (``v`` may be a single vector or rows of vectors)."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != class_filter.dim:
        raise DataError(
            f"dimension mismatch: filter is {class_filter.dim}-d, vector is {v.shape[-1]}-d"
        )
    return v @ class_filter.filter_matrix

"""Shrinkage distances, match probabilities and the limiting predictors.

Two distances are supported:

``S1``  ``||M_c (q - s)||^2``  filters both the query and the support.
``S2``  ``||q - mu_c - M_c (s - mu_c)||^2``  filters only the support.

Probabilities are a softmax of ``-alpha * d`` over every support of every
class; class posteriors sum those probabilities per class.
"""

import enum
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError, DataError, NumericalError
from .shrinkage import ShrinkageConfig, build_filters

PROTOTYPE_LAMBDA = 1e12


class Variant(enum.Enum):
    S1 = "s1"
    S2 = "s2"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown distance variant {value!r}; use s1 or s2") from None


@dataclass(frozen=True)
class TaskConfig:
    alpha: float = 1.0
    variant: Variant = Variant.S1
    shrinkage: ShrinkageConfig = field(default_factory=ShrinkageConfig)

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError(f"alpha must be finite and > 0, got {self.alpha}")
        object.__setattr__(self, "variant", Variant.parse(self.variant))

    @property
    def lam(self):
        return self.shrinkage.lam

    def with_lambda(self, lam):
        return replace(self, shrinkage=replace(self.shrinkage, lam=float(lam)))

    def with_variant(self, variant):
        return replace(self, variant=Variant.parse(variant))


def _check_dims(*vectors):
    dims = {np.shape(v)[-1] for v in vectors}
    if len(dims) != 1:
        raise DataError(f"dimension mismatch: {sorted(dims)}")


def shrinkage_distance_s1(q, s, class_filter):
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    _check_dims(q, s, class_filter.mean)
    r = class_filter.filter_matrix @ (q - s)
    return float(r @ r)


def shrinkage_distance_s2(q, s, class_filter):
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    _check_dims(q, s, class_filter.mean)
    mu = class_filter.mean
    r = q - mu - class_filter.filter_matrix @ (s - mu)
    return float(r @ r)


def _sqdist(a, b):
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def distance_matrix(queries, supports, support_labels, filters, variant):
    """Shrinkage distances between every query (rows) and support (columns)."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    supports = np.atleast_2d(np.asarray(supports, dtype=float))
    labels = np.asarray(support_labels)
    _check_dims(queries, supports)
    if len(labels) != len(supports):
        raise DataError("support labels do not align with supports")
    variant = Variant.parse(variant)
    out = np.empty((len(queries), len(supports)))
    for c, flt in enumerate(filters):
        cols = np.flatnonzero(labels == c)
        if cols.size == 0:
            continue
        m = flt.filter_matrix
        if variant is Variant.S1:
            out[:, cols] = _sqdist(queries @ m, supports[cols] @ m)
        else:
            # recomputed from the supports so frozen filters still track the mean
            mu = supports[cols].mean(axis=0)
            shrunk = mu + (supports[cols] - mu) @ m
            out[:, cols] = _sqdist(queries, shrunk)
    return out


def log_probabilities(distances, alpha):
    logits = -alpha * np.asarray(distances, dtype=float)
    if not np.any(np.isfinite(logits)):
        raise NumericalError("all distances are non-finite")
    return logits - logsumexp(logits, axis=-1, keepdims=True)


def probabilities_from_distances(distances, alpha):
    """Row-wise softmax of ``-alpha * distances`` over all supports."""
    return np.exp(log_probabilities(distances, alpha))


def pairwise_probabilities(queries, supports, support_labels, filters, config):
    """Query-by-support match probabilities ``p_li``; each row sums to one."""
    d = distance_matrix(queries, supports, support_labels, filters, config.variant)
    return probabilities_from_distances(d, config.alpha)


def class_posterior(p, support_labels, num_classes=None):
    """Sum match probabilities per class: ``posterior[l, c] = sum_{y_i = c} p[l, i]``."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    labels = np.asarray(support_labels)
    if labels.ndim != 1 or len(labels) != p.shape[1]:
        raise DataError(
            f"{len(labels)} support labels for {p.shape[1]} probability columns"
        )
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    onehot = labels[:, None] == np.arange(num_classes)[None, :]
    return p @ onehot


def prototype_posterior(queries, class_means, alpha):
    """Softmax over classes of ``-alpha * ||q - mu_c||^2``."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    means = np.atleast_2d(np.asarray(class_means, dtype=float))
    _check_dims(queries, means)
    return probabilities_from_distances(_sqdist(queries, means), alpha)


def predict(posteriors):
    """Arg-max class per row; ties go to the smallest class index."""
    return np.argmax(np.atleast_2d(posteriors), axis=1)


def episode_posteriors(episode, config, filters=None):
    """Class posteriors for the queries of an (already embedded) episode."""
    if filters is None:
        filters = build_filters(
            episode.supports, episode.support_labels, config.shrinkage, episode.way
        )
    p = pairwise_probabilities(
        episode.queries, episode.supports, episode.support_labels, filters, config
    )
    return class_posterior(p, episode.support_labels, episode.way)

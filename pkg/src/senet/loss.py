"""Shrinkage exemplar loss and its gradients.

The loss is the negative mean log of the summed same-class match
probabilities. Gradients with respect to embeddings treat the filter matrices
as constants of the current step ("detached filters"); the class mean inside
the S2 distance is still differentiated.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .classifier import Variant, distance_matrix, log_probabilities, predict
from .errors import DataError
from .shrinkage import build_filters


@dataclass(frozen=True)
class LossReport:
    loss: float
    per_query_log_posterior: np.ndarray
    posteriors: np.ndarray
    predicted_labels: np.ndarray
    accuracy: float


def _same_class_mask(support_labels, query_labels):
    support_labels = np.asarray(support_labels)
    query_labels = np.asarray(query_labels)
    missing = np.setdiff1d(query_labels, support_labels)
    if missing.size:
        raise DataError(f"label not in episode: {missing.tolist()}")
    return query_labels[:, None] == support_labels[None, :]


def loss_from_distances(distances, support_labels, query_labels, alpha, num_classes=None):
    """Loss report computed in log space from a query-by-support distance matrix."""
    distances = np.atleast_2d(np.asarray(distances, dtype=float))
    same = _same_class_mask(support_labels, query_labels)
    logp = log_probabilities(distances, alpha)
    log_post = logsumexp(np.where(same, logp, -np.inf), axis=1)
    labels = np.asarray(support_labels)
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    onehot = labels[:, None] == np.arange(num_classes)[None, :]
    posteriors = np.exp(logp) @ onehot
    pred = predict(posteriors)
    return LossReport(
        loss=float(-np.mean(log_post)),
        per_query_log_posterior=log_post,
        posteriors=posteriors,
        predicted_labels=pred,
        accuracy=float(np.mean(pred == np.asarray(query_labels))),
    )


def senet_loss(episode, config, filters=None):
    """Shrinkage exemplar loss of an embedded episode.

    ``filters`` may be supplied to evaluate the loss with frozen filter
    matrices; by default they are rebuilt from the episode supports.
    """
    if filters is None:
        filters = build_filters(
            episode.supports, episode.support_labels, config.shrinkage, episode.way
        )
    d = distance_matrix(
        episode.queries, episode.supports, episode.support_labels, filters, config.variant
    )
    return loss_from_distances(
        d, episode.support_labels, episode.query_labels, config.alpha, episode.way
    )


def loss_distance_gradient(distances, support_labels, query_labels, alpha):
    """Analytic ``dL/dd_li``.

    With ``P_l`` the summed same-class probability of query ``l``::

        dL/dd_li = (alpha / M) * (p_li / P_l - p_li)   if y_i == y'_l
        dL/dd_li = -(alpha / M) * p_li                 otherwise

    Same-class entries are therefore non-negative and other-class entries
    non-positive.
    """
    distances = np.atleast_2d(np.asarray(distances, dtype=float))
    same = _same_class_mask(support_labels, query_labels)
    m = distances.shape[0]
    logp = log_probabilities(distances, alpha)
    log_post = logsumexp(np.where(same, logp, -np.inf), axis=1, keepdims=True)
    p = np.exp(logp)
    ratio = np.where(same, np.exp(logp - log_post), 0.0)
    return (alpha / m) * (ratio - p)


def embedding_gradient(episode, config, filters=None):
    """Gradients of the loss w.r.t. every support and query embedding.

    Returns
    -------
    grad_supports : ndarray, same shape as ``episode.supports``
    grad_queries : ndarray, same shape as ``episode.queries``
    report : LossReport
    """
    supports = np.asarray(episode.supports, dtype=float)
    queries = np.asarray(episode.queries, dtype=float)
    labels = np.asarray(episode.support_labels)
    if filters is None:
        filters = build_filters(supports, labels, config.shrinkage, episode.way)
    variant = Variant.parse(config.variant)
    d = distance_matrix(queries, supports, labels, filters, variant)
    report = loss_from_distances(
        d, labels, episode.query_labels, config.alpha, episode.way
    )
    g = loss_distance_gradient(d, labels, episode.query_labels, config.alpha)

    grad_s = np.zeros_like(supports)
    grad_q = np.zeros_like(queries)
    eye = np.eye(supports.shape[1])
    for c, flt in enumerate(filters):
        cols = np.flatnonzero(labels == c)
        if cols.size == 0:
            continue
        m = flt.filter_matrix
        gc = g[:, cols, None]
        if variant is Variant.S1:
            diff = queries[:, None, :] - supports[None, cols, :]
            w = gc * (diff @ (m @ m))
            grad_q += 2.0 * w.sum(axis=1)
            grad_s[cols] -= 2.0 * w.sum(axis=0)
        else:
            mu = supports[cols].mean(axis=0)
            shrunk = mu + (supports[cols] - mu) @ m
            w = gc * (queries[:, None, :] - shrunk[None, :, :])
            grad_q += 2.0 * w.sum(axis=1)
            grad_s[cols] -= 2.0 * w.sum(axis=0) @ m
            grad_s[cols] -= 2.0 * (w.sum(axis=(0, 1)) @ (eye - m)) / cols.size
    return grad_s, grad_q, report

"""Episodic evaluation with paired episodes and 95% confidence intervals.

Episode ``e`` is always drawn from ``default_rng(seed + e)``, so every method
evaluated with the same seed sees identical episodes. When several task
configurations are evaluated together, each episode's embeddings and class
spectra are computed once and shared across all of them.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classifier import (
    class_posterior,
    distance_matrix,
    predict,
    probabilities_from_distances,
    prototype_posterior,
)
from .episodes import augment_episode, sample_episode
from .errors import ConfigError
from .shrinkage import class_spectrum, filter_from_spectrum

PREDICTORS = ("senet", "exemplar", "prototype")


@dataclass(frozen=True)
class EvalResult:
    mean_accuracy: float
    ci95_halfwidth: float
    episodes: int
    per_episode_accuracies: np.ndarray

    @classmethod
    def from_accuracies(cls, accuracies):
        acc = np.asarray(accuracies, dtype=float)
        return cls(
            mean_accuracy=float(acc.mean()),
            ci95_halfwidth=float(1.96 * acc.std() / np.sqrt(len(acc))),
            episodes=len(acc),
            per_episode_accuracies=acc,
        )


def thread_count():
    value = os.environ.get("SENET_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ConfigError(f"SENET_THREADS must be an integer, got {value!r}") from None
    return os.cpu_count() or 1


def _map_ordered(fn, items):
    threads = thread_count()
    if threads == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _exemplar_posterior(queries, supports, support_labels, way, alpha):
    # raw squared euclidean through the expanded-norm identity
    d = (
        np.sum(queries**2, axis=1)[:, None]
        - 2.0 * queries @ supports.T
        + np.sum(supports**2, axis=1)[None, :]
    )
    p = probabilities_from_distances(np.maximum(d, 0.0), alpha)
    return class_posterior(p, support_labels, way)


def _prototype_posterior(queries, supports, support_labels, way, alpha):
    means = np.stack([supports[support_labels == c].mean(axis=0) for c in range(way)])
    return prototype_posterior(queries, means, alpha)


def episode_accuracies(episode, configs, predictor="senet"):
    """Accuracy of one embedded episode under each task config."""
    if predictor not in PREDICTORS:
        raise ConfigError(f"unknown predictor {predictor!r}; use one of {PREDICTORS}")
    s, q = episode.supports, episode.queries
    labels, way = episode.support_labels, episode.way
    out = []
    if predictor == "senet":
        spectra = [class_spectrum(s[labels == c], c) for c in range(way)]
        for cfg in configs:
            filters = [filter_from_spectrum(sp, cfg.shrinkage) for sp in spectra]
            d = distance_matrix(q, s, labels, filters, cfg.variant)
            post = class_posterior(probabilities_from_distances(d, cfg.alpha), labels, way)
            out.append(np.mean(predict(post) == episode.query_labels))
    else:
        fn = _exemplar_posterior if predictor == "exemplar" else _prototype_posterior
        for cfg in configs:
            post = fn(q, s, labels, way, cfg.alpha)
            out.append(np.mean(predict(post) == episode.query_labels))
    return out


def evaluate_many(dataset, backbone, configs, episodes, seed, way=5, shot=5, query=10,
                  augment="flip", predictor="senet"):
    """Paired evaluation of several task configs on the same episodes."""
    configs = list(configs)
    episodes = int(episodes)

    def run(e):
        rng = np.random.default_rng(int(seed) + e)
        ep = augment_episode(sample_episode(dataset, way, shot, query, rng), augment)
        if backbone is not None:
            ep = ep.map(backbone)
        return episode_accuracies(ep, configs, predictor)

    table = np.array(_map_ordered(run, range(episodes)), dtype=float).reshape(episodes, -1)
    return [EvalResult.from_accuracies(table[:, k]) for k in range(len(configs))]


def evaluate(dataset, backbone, config, episodes, seed, way=5, shot=5, query=10,
             augment="flip", predictor="senet"):
    """Mean episode accuracy of one task config with its 95% CI half-width.

    ``backbone=None`` means identity embeddings.
    """
    return evaluate_many(
        dataset, backbone, [config], episodes, seed, way, shot, query, augment, predictor
    )[0]

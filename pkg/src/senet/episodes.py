"""N-way K-shot episode sampling and single-shot augmentation."""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError

AUGMENT_MODES = ("flip", "jitter", "none")


@dataclass(frozen=True)
class Episode:
    """One few-shot task.

    Labels are episode-local (``0..way-1``); ``classes[c]`` maps them back to
    dataset labels. Supports are stored class-major. Vectors may be raw inputs
    or embeddings, see :meth:`map`.
    """

    supports: np.ndarray
    support_labels: np.ndarray
    queries: np.ndarray
    query_labels: np.ndarray
    classes: np.ndarray
    support_index: np.ndarray | None = None
    query_index: np.ndarray | None = None

    @property
    def way(self):
        return len(self.classes)

    @property
    def shot(self):
        return int(np.min(np.bincount(self.support_labels, minlength=self.way)))

    @property
    def num_queries(self):
        return len(self.query_labels)

    def map(self, fn):
        """Apply ``fn`` (rows -> rows) to supports and queries, e.g. a backbone."""
        return replace(self, supports=fn(self.supports), queries=fn(self.queries))


def queries_per_class(way, query):
    """Spread ``query`` queries over ``way`` classes, remainder to the first classes."""
    base, extra = divmod(int(query), int(way))
    return [base + (c < extra) for c in range(int(way))]


def sample_episode(dataset, way, shot, query, rng):
    """Sample a ``way``-way ``shot``-shot episode with ``query`` queries in total.

    Classes are drawn without replacement; supports and queries of a class
    come from one permutation so they never share a sample.
    """
    way, shot, query = int(way), int(shot), int(query)
    if way < 1 or shot < 1 or query < 0:
        raise ConfigError(f"invalid episode shape way={way} shot={shot} query={query}")
    index = dataset.class_indices()
    if way > len(index):
        raise DataError(f"{way}-way episode requested from a {len(index)}-class dataset")
    per_class = queries_per_class(way, query)
    need = shot + per_class[0]
    short = [c for c, idx in index.items() if len(idx) < need]
    if short:
        raise DataError(
            f"classes {short} have fewer than shot + queries per class = {need} samples"
        )
    labels = np.array(sorted(index))
    chosen = rng.choice(labels, size=way, replace=False)
    s_idx, q_idx, q_lab = [], [], []
    for c, label in enumerate(chosen):
        perm = rng.permutation(index[int(label)])
        s_idx.append(perm[:shot])
        q_idx.append(perm[shot:shot + per_class[c]])
        q_lab.append(np.full(per_class[c], c))
    s_idx = np.concatenate(s_idx)
    q_idx = np.concatenate(q_idx).astype(int)
    return Episode(
        supports=dataset.x[s_idx],
        support_labels=np.repeat(np.arange(way), shot),
        queries=dataset.x[q_idx],
        query_labels=np.concatenate(q_lab).astype(int),
        classes=chosen,
        support_index=s_idx,
        query_index=q_idx,
    )


def jitter(x):
    """Deterministic alternating +/- eps perturbation with ``eps = 1e-2 * ||x||``."""
    x = np.asarray(x, dtype=float)
    eps = 1e-2 * np.linalg.norm(x)
    signs = np.where(np.arange(x.shape[-1]) % 2 == 0, 1.0, -1.0)
    return x + eps * signs


def augment_single_shot(support, mode="flip"):
    """Pseudo-support for a one-shot class.

    ``flip`` reverses the coordinate order and falls back to ``jitter`` when
    the vector is a palindrome (the flip would add no scatter).
    """
    support = np.asarray(support, dtype=float)
    if mode == "flip":
        flipped = support[..., ::-1].copy()
        if np.array_equal(flipped, support):
            return jitter(support)
        return flipped
    if mode == "jitter":
        return jitter(support)
    raise ConfigError(f"unknown augmentation mode {mode!r}; use one of {AUGMENT_MODES}")


def augment_episode(episode, mode="flip"):
    """Append one pseudo-support per class when every class has a single shot.

    Queries and their labels are never touched. Episodes with more shots, or
    ``mode='none'``, are returned unchanged.
    """
    if mode == "none" or episode.shot != 1 or len(episode.support_labels) != episode.way:
        return episode
    extra = np.stack([augment_single_shot(s, mode) for s in episode.supports])
    order = np.argsort(np.concatenate([episode.support_labels] * 2), kind="stable")
    supports = np.concatenate([episode.supports, extra])[order]
    labels = np.concatenate([episode.support_labels] * 2)[order]
    return replace(episode, supports=supports, support_labels=labels)

"""Episodic SGD training of a backbone on the shrinkage exemplar loss."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .classifier import TaskConfig
from .episodes import augment_episode, sample_episode
from .errors import ConfigError, NumericalError, TrainingDiverged
from .loss import embedding_gradient

log = logging.getLogger(__name__)

# reference schedule: 80 epochs, rate changes at these epochs
REFERENCE_EPOCHS = 80
REFERENCE_MILESTONES = (12, 30, 45, 57)
REFERENCE_RATES = (0.1, 0.0025, 0.00032, 0.00014, 0.000052)

PROBE_SEED_OFFSET = 1_000_003


@dataclass(frozen=True)
class TrainConfig:
    task: TaskConfig = field(default_factory=TaskConfig)
    way: int = 5
    shot: int = 5
    query: int = 10
    train_shot: int | None = None
    episodes_per_batch: int = 4
    epochs: int = 1
    batches_per_epoch: int = 50
    lr: float = 0.01
    augment: str = "flip"

    def __post_init__(self):
        for name in ("way", "shot", "episodes_per_batch", "epochs", "batches_per_epoch"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not (np.isfinite(self.lr) and self.lr >= 0):
            raise ConfigError(f"lr must be finite and >= 0, got {self.lr}")

    @property
    def effective_shot(self):
        return self.shot if self.train_shot is None else int(self.train_shot)


def milestone_epochs(epochs):
    """Reference milestones rescaled to ``epochs``; a milestone never lands on epoch 0."""
    return [max(1, round(m * epochs / REFERENCE_EPOCHS)) for m in REFERENCE_MILESTONES]


def learning_rate(epoch, epochs, base_lr):
    """Piecewise-constant rate: the reference rate sequence scaled by ``base_lr / 0.1``."""
    k = sum(epoch >= m for m in milestone_epochs(epochs))
    return base_lr * REFERENCE_RATES[k] / REFERENCE_RATES[0]


def _batch_step(backbone, config, episodes):
    """Mean loss and mean parameter gradient over a batch of raw episodes."""
    total = [np.zeros_like(p) for p in backbone.parameters()]
    losses = []
    for ep in episodes:
        n_s = len(ep.supports)
        x = np.concatenate([ep.supports, ep.queries])
        z, cache = backbone.forward(x, cache=True)
        embedded = replace(ep, supports=z[:n_s], queries=z[n_s:])
        gs, gq, report = embedding_gradient(embedded, config.task)
        grads = backbone.backward(cache, np.concatenate([gs, gq]))
        for acc, g in zip(total, grads):
            acc += g
        losses.append(report.loss)
    n = len(episodes)
    return float(np.mean(losses)), [g / n for g in total]


def _probe_loss(backbone, config, episodes):
    return _batch_step(backbone, config, episodes)[0]


def _draw(dataset, config, rng, count):
    return [
        augment_episode(
            sample_episode(dataset, config.way, config.effective_shot, config.query, rng),
            config.augment,
        )
        for _ in range(count)
    ]


def train(dataset, backbone, config, seed=0):
    """Train a copy of ``backbone``; the input is left untouched.

    Returns
    -------
    trained : Backbone
    history : list of dict
        One row per batch: ``batch``, ``epoch``, ``lr``, ``loss`` (training
        batch loss before the update) and ``probe_loss`` (loss on a fixed set
        of probe episodes drawn once before training, also before the update).

    Raises
    ------
    TrainingDiverged
        If a batch loss or gradient becomes non-finite.
    """
    net = backbone.copy()
    rng = np.random.default_rng(int(seed))
    probe = _draw(dataset, config, np.random.default_rng(int(seed) + PROBE_SEED_OFFSET),
                  config.episodes_per_batch)
    history = []
    batch = 0
    for epoch in range(int(config.epochs)):
        lr = learning_rate(epoch, int(config.epochs), config.lr)
        for _ in range(int(config.batches_per_epoch)):
            batch += 1
            episodes = _draw(dataset, config, rng, config.episodes_per_batch)
            try:
                loss, grads = _batch_step(net, config, episodes)
            except NumericalError:
                # non-finite embeddings reach the eigensolver first
                raise TrainingDiverged(batch, float("nan")) from None
            if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads):
                raise TrainingDiverged(batch, loss)
            probe_loss = _probe_loss(net, config, probe)
            history.append(
                {"batch": batch, "epoch": epoch, "lr": lr, "loss": loss, "probe_loss": probe_loss}
            )
            if lr:
                net.apply_update(grads, lr)
        log.info("epoch %d lr=%.3g loss=%.4f", epoch + 1, lr, history[-1]["loss"])
    return net, history

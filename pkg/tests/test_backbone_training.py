from dataclasses import replace

import numpy as np
import pytest

from senet.backbone import Backbone, load_backbone, save_backbone
from senet.classifier import TaskConfig
from senet.data import DatasetSpec, generate_dataset
from senet.episodes import sample_episode
from senet.errors import DataError, TrainingDiverged
from senet.loss import embedding_gradient, senet_loss
from senet.shrinkage import ShrinkageConfig, build_filters
from senet.training import (
    REFERENCE_MILESTONES,
    TrainConfig,
    learning_rate,
    milestone_epochs,
    train,
)


@pytest.fixture(scope="module")
def iso():
    return generate_dataset(DatasetSpec(num_classes=8, samples_per_class=30, input_dim=6,
                                        noise_sigma=0.8, seed=1))


def test_identity_backbone():
    x = np.random.default_rng(0).standard_normal((4, 3))
    np.testing.assert_array_equal(Backbone.identity(3)(x), x)


@pytest.mark.parametrize("variant,lam", [("s1", 0.0), ("s1", 3.0), ("s2", 3.0)])
def test_parameter_gradient_matches_finite_differences(iso, variant, lam):
    net = Backbone.mlp(6, hidden_dim=7, embed_dim=5, seed=2)
    for b in net.biases:
        b += 0.1
    ep = sample_episode(iso, 3, 3, 6, np.random.default_rng(4))
    task = TaskConfig(0.8, variant, ShrinkageConfig(lam))
    x = np.concatenate([ep.supports, ep.queries])
    n_s = len(ep.supports)
    z, cache = net.forward(x, cache=True)
    embedded = replace(ep, supports=z[:n_s], queries=z[n_s:])
    frozen = build_filters(embedded.supports, embedded.support_labels, task.shrinkage)
    gs, gq, _ = embedding_gradient(embedded, task)
    grads = net.backward(cache, np.concatenate([gs, gq]))

    def loss():
        return senet_loss(ep.map(net), task, frozen).loss

    h = 1e-6
    scale = max(np.max(np.abs(g)) for g in grads)
    for p, g in zip(net.parameters(), grads):
        fd = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up = loss()
            p[idx] = old - h
            dn = loss()
            p[idx] = old
            fd[idx] = (up - dn) / (2 * h)
        assert np.max(np.abs(fd - g)) <= 1e-5 * scale


def test_backbone_file_round_trip(tmp_path):
    net = Backbone.mlp(5, 4, 3, seed=7)
    path = tmp_path / "m.txt"
    save_backbone(net, path)
    back = load_backbone(path)
    assert back.equals(net)
    save_backbone(back, tmp_path / "m2.txt")
    assert path.read_bytes() == (tmp_path / "m2.txt").read_bytes()
    lines = path.read_text().splitlines()
    assert lines[1] == "layer 0 weight 4 5"
    assert lines[3] == "layer 0 bias 4"


def test_backbone_load_errors(tmp_path):
    with pytest.raises(DataError):
        load_backbone(tmp_path / "nope.txt")
    bad = tmp_path / "bad.txt"
    bad.write_text("# senet-backbone v1\nlayer 0 weight 2 2\n1.0,2.0,3.0\nlayer 0 bias 2\n0,0\n")
    with pytest.raises(DataError):
        load_backbone(bad)


def test_schedule_scaling():
    assert milestone_epochs(80) == list(REFERENCE_MILESTONES)
    rates = [learning_rate(e, 80, 0.1) for e in (0, 11, 12, 30, 45, 57, 79)]
    np.testing.assert_allclose(rates, [0.1, 0.1, 0.0025, 0.00032, 0.00014, 0.000052, 0.000052])
    assert all(learning_rate(0, 1, 0.01) == 0.01 for _ in range(3))
    assert learning_rate(7, 8, 0.02) == pytest.approx(0.02 * 0.000052 / 0.1)


def test_zero_learning_rate_changes_nothing(iso):
    net = Backbone.mlp(6, 8, 4, seed=0)
    cfg = TrainConfig(lr=0.0, batches_per_epoch=6, episodes_per_batch=2, way=3, shot=2, query=6)
    out, history = train(iso, net, cfg, seed=3)
    assert out.equals(net)
    probe = np.array([h["probe_loss"] for h in history])
    assert np.ptp(probe) <= 1e-12
    assert len(history) == 6


def test_identity_linear_backbone_learns(iso):
    net = Backbone.identity(6)
    cfg = TrainConfig(task=TaskConfig(1.0, "s1", ShrinkageConfig(1.0)), lr=0.01,
                      batches_per_epoch=50, episodes_per_batch=4)
    _, history = train(iso, net, cfg, seed=0)
    loss = np.array([h["loss"] for h in history])
    moving = np.convolve(loss, np.ones(10) / 10, mode="valid")
    assert moving[-1] < moving[0]


def test_training_is_deterministic(iso):
    cfg = TrainConfig(batches_per_epoch=5, episodes_per_batch=2, lr=0.05)
    a, ha = train(iso, Backbone.mlp(6, 8, 4), cfg, seed=11)
    b, hb = train(iso, Backbone.mlp(6, 8, 4), cfg, seed=11)
    assert a.equals(b)
    assert ha == hb


def test_divergence_names_the_batch(iso):
    cfg = TrainConfig(batches_per_epoch=30, episodes_per_batch=1, lr=1e200,
                      task=TaskConfig(1.0, "s2", ShrinkageConfig(0.0)))
    with pytest.raises(TrainingDiverged) as info:
        with np.errstate(all="ignore"):
            train(iso, Backbone.mlp(6, 8, 4), cfg, seed=0)
    assert info.value.batch >= 1
    assert f"batch {info.value.batch}" in str(info.value)


def test_one_shot_training_uses_augmentation(iso):
    cfg = TrainConfig(shot=1, batches_per_epoch=3, episodes_per_batch=2, lr=0.01)
    _, history = train(iso, Backbone.mlp(6, 8, 4), cfg, seed=0)
    assert all(np.isfinite(h["loss"]) for h in history)


def test_train_shot_override(iso):
    cfg = TrainConfig(shot=1, train_shot=4, batches_per_epoch=2, episodes_per_batch=1)
    assert cfg.effective_shot == 4
    train(iso, Backbone.mlp(6, 8, 4), cfg, seed=0)

"""
Episodic training of a small backbone
=====================================

A one-hidden-layer network is trained for 50 batches on the shrinkage
exemplar loss. Accuracy is measured on the same held-out episodes before and
after training.
"""

import numpy as np

from senet import Backbone, DatasetSpec, TaskConfig, ShrinkageConfig, TrainConfig, evaluate, generate_dataset, train

ds = generate_dataset(DatasetSpec(geometry="anisotropic_gaussian", noise_sigma=0.3, seed=11))
task = TaskConfig(1.0, "s1", ShrinkageConfig(10.0))
init = Backbone.mlp(16, 32, 16, seed=0)

net, history = train(ds, init, TrainConfig(task=task, batches_per_epoch=50, lr=0.01), seed=3)

loss = np.array([h["loss"] for h in history])
moving = np.convolve(loss, np.ones(10) / 10, mode="valid")
print("10-batch moving average:", np.round(moving[::10], 3))

before = evaluate(ds, init, task, 300, seed=99)
after = evaluate(ds, net, task, 300, seed=99)
print(f"accuracy before {100 * before.mean_accuracy:.2f}%  after {100 * after.mean_accuracy:.2f}%")

"""
Exemplars, prototypes and everything in between
================================================

A single episode, scored at three shrinkage strengths. At ``lambda = 0`` each
support is its own exemplar; as ``lambda`` grows the supports collapse onto
their class mean and the classifier becomes a prototype classifier.
"""

import numpy as np

from senet import DatasetSpec, TaskConfig, ShrinkageConfig, generate_dataset, sample_episode
from senet.classifier import episode_posteriors, prototype_posterior
from senet.shrinkage import build_class_filter

ds = generate_dataset(DatasetSpec(num_classes=5, samples_per_class=30, input_dim=4,
                                  geometry="mixed", noise_sigma=0.3, seed=1))
episode = sample_episode(ds, way=3, shot=4, query=6, rng=np.random.default_rng(0))

###############################################################################
# The filter for one class: eigenvalues of the class scatter set the gains

supports = episode.supports[episode.support_labels == 0]
for lam in (0.0, 1.0, 1e12):
    f = build_class_filter(supports, ShrinkageConfig(lam))
    print(f"lambda={lam:g}  gains={np.round(f.gains, 4)}")

###############################################################################
# Posteriors of the first query under both distance variants

for lam in (0.0, 1.0, 1e12):
    for variant in ("s1", "s2"):
        post = episode_posteriors(episode, TaskConfig(1.0, variant, ShrinkageConfig(lam)))
        print(f"lambda={lam:<6g} {variant}: {np.round(post[0], 4)}")

###############################################################################
# The large-lambda S2 posterior is the prototype classifier

means = np.stack([episode.supports[episode.support_labels == c].mean(axis=0) for c in range(3)])
print("prototype     :", np.round(prototype_posterior(episode.queries, means, 1.0)[0], 4))

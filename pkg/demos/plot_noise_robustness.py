"""
Robustness to feature noise
===========================

Gaussian noise of growing variance is added to every sample. All three arms
see the same episodes, so only the method differs between columns.
"""

from senet import DatasetSpec, TaskConfig, ShrinkageConfig, generate_dataset
from senet.experiments import EvalSettings, robustness

ds = generate_dataset(DatasetSpec(noise_sigma=0.5, seed=0))
rows = robustness(ds, None, TaskConfig(1.0, "s2", ShrinkageConfig(0.0)),
                  variances=(0.0, 1.0, 4.0, 16.0), senet_lambda=10.0, noise_seed=0,
                  settings=EvalSettings(episodes=200, record_time=False))

print(f"{'variance':>8} {'exemplar':>9} {'prototype':>9} {'senet':>9}")
for v in sorted({r["variance"] for r in rows}, key=float):
    acc = {r["arm"]: r["acc_pct"] for r in rows if r["variance"] == v}
    print(f"{v:>8} {acc['exemplar']:>9} {acc['prototype']:>9} {acc['senet']:>9}")

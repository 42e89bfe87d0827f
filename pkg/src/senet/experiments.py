"""Experiment families producing CSV-ready result rows.

All arms of one experiment share episode seeds, so the method is the only
thing that varies between rows.
"""

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .classifier import PROTOTYPE_LAMBDA, TaskConfig, Variant
from .data import add_gaussian_noise
from .episodes import queries_per_class
from .errors import DataError
from .evaluation import evaluate_many

DEFAULT_LAMBDAS = (0.0, 1.0, 10.0, 1e2, 1e3, 1e4, 1e5, PROTOTYPE_LAMBDA)

RESULT_FIELDS = (
    "experiment", "variant", "lambda", "way", "shot", "episodes",
    "acc_pct", "ci95_pct", "seconds", "seed",
)
ROBUSTNESS_FIELDS = RESULT_FIELDS[:1] + ("arm", "variance") + RESULT_FIELDS[1:]
SCALING_FIELDS = RESULT_FIELDS[:1] + ("arm",) + RESULT_FIELDS[1:]


@dataclass(frozen=True)
class EvalSettings:
    """Episode shape and count shared by every arm of an experiment."""

    way: int = 5
    shot: int = 5
    query: int = 10
    episodes: int = 1000
    seed: int = 0
    augment: str = "flip"
    record_time: bool = True


def format_lambda(lam):
    return f"{lam:g}"


def result_row(experiment, variant, lam, settings, result, seconds, **extra):
    row = {
        "experiment": experiment,
        "variant": variant,
        "lambda": format_lambda(lam),
        "way": settings.way,
        "shot": settings.shot,
        "episodes": result.episodes,
        "acc_pct": f"{100 * result.mean_accuracy:.2f}",
        "ci95_pct": f"{100 * result.ci95_halfwidth:.2f}",
        "seconds": f"{seconds if settings.record_time else 0.0:.2f}",
        "seed": settings.seed,
    }
    row.update(extra)
    return row


def _timed_eval(dataset, backbone, configs, settings, predictor="senet"):
    start = time.perf_counter()
    results = evaluate_many(
        dataset, backbone, configs, settings.episodes, settings.seed,
        settings.way, settings.shot, settings.query, settings.augment, predictor,
    )
    return results, (time.perf_counter() - start) / max(len(configs), 1)


def sweep_lambda(dataset, backbone, task, lambdas=DEFAULT_LAMBDAS, variants=("s1", "s2"),
                 settings=EvalSettings(), experiment="sweep-lambda"):
    """Rows for every (variant, lambda) pair, sorted by variant then lambda."""
    cells = sorted(
        {(Variant.parse(v).value, float(lam)) for v in variants for lam in lambdas}
    )
    configs = [task.with_variant(v).with_lambda(lam) for v, lam in cells]
    results, per = _timed_eval(dataset, backbone, configs, settings)
    return [
        result_row(experiment, v, lam, settings, r, per)
        for (v, lam), r in zip(cells, results)
    ]


def standalone(dataset, backbone, task, predictor, settings=EvalSettings(), experiment="eval"):
    """A single row from the independent exemplar or prototype predictor."""
    results, per = _timed_eval(dataset, backbone, [task], settings, predictor)
    lam = 0.0 if predictor == "exemplar" else float("inf")
    return result_row(experiment, predictor, lam, settings, results[0], per)


def three_arms(task, senet_lambda):
    return [
        ("exemplar", task.with_lambda(0.0)),
        ("prototype", task.with_lambda(PROTOTYPE_LAMBDA)),
        ("senet", task.with_lambda(senet_lambda)),
    ]


def robustness(dataset, backbone, task, variances, senet_lambda, noise_seed,
               settings=EvalSettings(), experiment="robustness"):
    """Exemplar, prototype and SENet arms on noise-corrupted copies of the data."""
    arms = three_arms(task, senet_lambda)
    rows = []
    for variance in variances:
        noisy = add_gaussian_noise(dataset, float(variance), noise_seed)
        results, per = _timed_eval(noisy, backbone, [cfg for _, cfg in arms], settings)
        for (arm, cfg), r in zip(arms, results):
            rows.append(result_row(
                experiment, cfg.variant.value, cfg.lam, settings, r, per,
                arm=arm, variance=f"{float(variance):g}",
            ))
    return rows


def check_episode_shape(dataset, way, shot, query):
    counts = np.bincount(np.unique(dataset.y, return_inverse=True)[1])
    if way > len(counts):
        raise DataError(
            f"way={way} exceeds the {len(counts)} classes available in the dataset"
        )
    need = shot + queries_per_class(way, query)[0]
    if counts.min() < need:
        raise DataError(
            f"shot={shot} with {query} queries needs {need} samples per class, "
            f"dataset has {counts.min()}"
        )


def scaling(dataset, backbone, task, ways, shots, senet_lambda,
            settings=EvalSettings(), experiment="scaling"):
    """Three arms over every (way, shot) combination."""
    for way in ways:
        for shot in shots:
            check_episode_shape(dataset, int(way), int(shot), settings.query)
    arms = three_arms(task, senet_lambda)
    rows = []
    for way in ways:
        for shot in shots:
            s = EvalSettings(int(way), int(shot), settings.query, settings.episodes,
                             settings.seed, settings.augment, settings.record_time)
            results, per = _timed_eval(dataset, backbone, [cfg for _, cfg in arms], s)
            for (arm, cfg), r in zip(arms, results):
                rows.append(result_row(experiment, cfg.variant.value, cfg.lam, s, r, per, arm=arm))
    return rows


def rows_to_csv(rows, fieldnames=RESULT_FIELDS):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()

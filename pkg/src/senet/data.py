"""Synthetic labelled datasets and their plain-text file format.

File layout: one header line ``# senet-dataset key=value ...`` holding the
generating spec, then one ``label,v1,...,vd`` line per sample with
round-trip-exact decimal floats.
"""

from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigError, DataError

GEOMETRIES = ("isotropic_gaussian", "anisotropic_gaussian", "ring", "mixed")

MEAN_SCALE = 2.0
ANISO_RANK = 2
ANISO_SCALE = 1.5
RING_CENTER_SPREAD = 0.5
RING_RADIUS = (1.0, 2.5)

_HEADER = "# senet-dataset"


@dataclass(frozen=True)
class DatasetSpec:
    num_classes: int = 10
    samples_per_class: int = 60
    input_dim: int = 16
    geometry: str = "isotropic_gaussian"
    noise_sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if int(self.num_classes) < 2:
            raise ConfigError("num_classes must be >= 2")
        if int(self.samples_per_class) < 1:
            raise ConfigError("samples_per_class must be >= 1")
        if int(self.input_dim) < 1:
            raise ConfigError("input_dim must be >= 1")
        if self.geometry not in GEOMETRIES:
            raise ConfigError(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        if self.geometry in ("ring", "mixed") and int(self.input_dim) < 2:
            raise ConfigError("ring geometry requires input_dim >= 2")
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise ConfigError("noise_sigma must be finite and >= 0")


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    spec: DatasetSpec | None = None
    noise_variance: float = 0.0
    # generator-side ground truth (ring centres and radii); not persisted
    class_params: dict | None = field(default=None, compare=False, repr=False)

    @property
    def num_classes(self):
        return len(self.classes)

    @property
    def classes(self):
        return np.unique(self.y)

    @property
    def dim(self):
        return self.x.shape[1]

    def class_indices(self):
        return {int(c): np.flatnonzero(self.y == c) for c in self.classes}

    def equals(self, other):
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and self.spec == other.spec
        )


def _class_means(rng, num_classes, dim):
    if num_classes <= dim:
        return MEAN_SCALE * np.eye(dim)[:num_classes]
    dirs = rng.standard_normal((num_classes, dim))
    return MEAN_SCALE * dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def _gaussian_class(rng, mean, n, sigma):
    return mean + sigma * rng.standard_normal((n, mean.shape[0]))


def _anisotropic_class(rng, mean, n, sigma):
    dim = mean.shape[0]
    factor = ANISO_SCALE * rng.standard_normal((dim, ANISO_RANK)) / np.sqrt(ANISO_RANK)
    z = rng.standard_normal((n, ANISO_RANK))
    return mean + z @ factor.T + sigma * rng.standard_normal((n, dim))


def ring_parameters(rng):
    center = RING_CENTER_SPREAD * rng.uniform(-1.0, 1.0, size=2)
    radius = rng.uniform(*RING_RADIUS)
    return center, radius


def _ring_class(rng, dim, n, sigma):
    center, radius = ring_parameters(rng)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    x = np.zeros((n, dim))
    x[:, 0] = center[0] + radius * np.cos(angle)
    x[:, 1] = center[1] + radius * np.sin(angle)
    return x + sigma * rng.standard_normal((n, dim)), {"center": center, "radius": radius}


def generate_dataset(spec):
    """Draw a labelled dataset; bit-identical for a given spec (seed included).

    Geometries
    ----------
    isotropic_gaussian
        Class means at scaled simplex vertices plus isotropic noise.
    anisotropic_gaussian
        Same means, each class with its own random rank-2 covariance.
    ring
        Samples on a circle (random centre and radius per class) in the first
        two coordinates plus ambient noise; the class mean sits far from
        every sample.
    mixed
        First half of the classes isotropic gaussian, the rest rings.
    """
    rng = np.random.default_rng(int(spec.seed))
    n, dim, sigma = int(spec.samples_per_class), int(spec.input_dim), float(spec.noise_sigma)
    means = _class_means(rng, int(spec.num_classes), dim)
    n_gauss = (int(spec.num_classes) + 1) // 2
    blocks, params = [], {}
    for c in range(int(spec.num_classes)):
        if spec.geometry == "isotropic_gaussian" or (spec.geometry == "mixed" and c < n_gauss):
            blocks.append(_gaussian_class(rng, means[c], n, sigma))
            params[c] = {"mean": means[c]}
        elif spec.geometry == "anisotropic_gaussian":
            blocks.append(_anisotropic_class(rng, means[c], n, sigma))
            params[c] = {"mean": means[c]}
        else:
            block, params[c] = _ring_class(rng, dim, n, sigma)
            blocks.append(block)
    x = np.concatenate(blocks)
    y = np.repeat(np.arange(int(spec.num_classes)), n)
    return Dataset(x, y, spec, class_params=params)


def add_gaussian_noise(dataset, variance, seed):
    """Return a copy with i.i.d. zero-mean gaussian noise of the given variance added."""
    if not variance >= 0:
        raise ConfigError(f"variance must be >= 0, got {variance}")
    if variance == 0:
        return dataset
    rng = np.random.default_rng(int(seed))
    noisy = dataset.x + np.sqrt(variance) * rng.standard_normal(dataset.x.shape)
    return replace(dataset, x=noisy, noise_variance=dataset.noise_variance + variance)


def save_dataset(dataset, path):
    spec = dataset.spec
    header = [_HEADER]
    if spec is not None:
        header += [f"{f.name}={getattr(spec, f.name)}" for f in fields(spec)]
    if dataset.noise_variance:
        header.append(f"noise_variance={dataset.noise_variance!r}")
    lines = [" ".join(header)]
    for label, row in zip(dataset.y, dataset.x):
        lines.append(",".join([str(int(label))] + [repr(float(v)) for v in row]))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write dataset to {path}: {exc}") from exc


def load_dataset(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    if not lines or not lines[0].startswith(_HEADER):
        raise DataError(f"{path}: missing '{_HEADER}' header line")
    meta = dict(tok.split("=", 1) for tok in lines[0][len(_HEADER):].split())
    noise_variance = float(meta.pop("noise_variance", 0.0))
    spec = None
    if meta:
        types = {f.name: f.type for f in fields(DatasetSpec)}
        unknown = set(meta) - set(types)
        if unknown:
            raise DataError(f"{path}: unknown header fields {sorted(unknown)}")
        spec = DatasetSpec(**{k: types[k](v) for k, v in meta.items()})
    try:
        rows = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:] if ln])
    except ValueError as exc:
        raise DataError(f"{path}: malformed sample line: {exc}") from exc
    if rows.ndim != 2 or rows.shape[1] < 2:
        raise DataError(f"{path}: no samples")
    return Dataset(rows[:, 1:], rows[:, 0].astype(int), spec, noise_variance)

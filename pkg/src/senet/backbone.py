"""Small fully connected embedding network with hand-written backprop.

Layers are affine maps with ``max(x, 0)`` between consecutive layers (never
after the last). Model files are plain text: ``layer <i> weight <rows> <cols>``
or ``layer <i> bias <n>`` lines, each followed by one line of comma-separated
row-major values.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError

_HEADER = "# senet-backbone v1"


@dataclass
class Backbone:
    weights: list
    biases: list

    @classmethod
    def identity(cls, dim):
        return cls([np.eye(dim)], [np.zeros(dim)])

    @classmethod
    def linear(cls, in_dim, out_dim, seed=0, scale=None):
        rng = np.random.default_rng(seed)
        scale = 1.0 / np.sqrt(in_dim) if scale is None else scale
        return cls([scale * rng.standard_normal((out_dim, in_dim))], [np.zeros(out_dim)])

    @classmethod
    def mlp(cls, in_dim, hidden_dim=32, embed_dim=16, seed=0):
        """One hidden layer, He-initialised first layer, Glorot-style second."""
        rng = np.random.default_rng(seed)
        w1 = rng.standard_normal((hidden_dim, in_dim)) * np.sqrt(2.0 / in_dim)
        w2 = rng.standard_normal((embed_dim, hidden_dim)) * np.sqrt(1.0 / hidden_dim)
        return cls([w1, w2], [np.zeros(hidden_dim), np.zeros(embed_dim)])

    @property
    def in_dim(self):
        return self.weights[0].shape[1]

    @property
    def embed_dim(self):
        return self.weights[-1].shape[0]

    def copy(self):
        return Backbone([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def parameters(self):
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def forward(self, x, cache=False):
        h = np.asarray(x, dtype=float)
        inputs = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            h = h @ w.T + b
            if i < last:
                h = np.maximum(h, 0.0)
        return (h, inputs) if cache else h

    __call__ = forward

    def backward(self, inputs, grad_out):
        """Parameter gradients given cached layer inputs and ``dL/d(output)``.

        Returns a list aligned with :meth:`parameters`.
        """
        grads = [None] * (2 * len(self.weights))
        g = grad_out
        for i in reversed(range(len(self.weights))):
            h = inputs[i]
            grads[2 * i] = g.T @ h
            grads[2 * i + 1] = g.sum(axis=0)
            if i > 0:
                g = (g @ self.weights[i]) * (h > 0)
        return grads

    def apply_update(self, grads, lr):
        for p, g in zip(self.parameters(), grads):
            p -= lr * g

    def equals(self, other):
        return len(self.weights) == len(other.weights) and all(
            np.array_equal(a, b) for a, b in zip(self.parameters(), other.parameters())
        )


def _values(arr):
    return ",".join(repr(float(v)) for v in np.ravel(arr))


def save_backbone(backbone, path):
    lines = [_HEADER]
    for i, (w, b) in enumerate(zip(backbone.weights, backbone.biases)):
        lines += [f"layer {i} weight {w.shape[0]} {w.shape[1]}", _values(w)]
        lines += [f"layer {i} bias {b.shape[0]}", _values(b)]
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write model to {path}: {exc}") from exc


def load_backbone(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    if not lines or lines[0] != _HEADER:
        raise DataError(f"{path}: not a backbone file")
    weights, biases = [], []
    for head, body in zip(lines[1::2], lines[2::2]):
        parts = head.split()
        values = np.array([float(v) for v in body.split(",")])
        shape = tuple(int(s) for s in parts[3:])
        if values.size != int(np.prod(shape)):
            raise DataError(f"{path}: {head!r} expects {np.prod(shape)} values, got {values.size}")
        (weights if parts[2] == "weight" else biases).append(values.reshape(shape))
    if not weights or len(weights) != len(biases):
        raise DataError(f"{path}: inconsistent layer list")
    return Backbone(weights, biases)

"""A small dense-network GAN with hand-written backpropagation and plain SGD.

Every layer, the output layers included, is affine followed by a sigmoid, so
generator samples land in (0, 1)^2 and discriminator outputs are probabilities.
Losses are binary cross-entropies evaluated from the discriminator logit; the
generator uses the non-saturating form ``-log D(G(z))``.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, TrainingError
from .metrics import Histogram2D, hellinger, histogram

log_ = logging.getLogger(__name__)


def sigmoid(z):
    # tanh form does not overflow for large |z|
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def softplus(z):
    z = np.asarray(z, dtype=float)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def count_params_for(widths) -> int:
    widths = list(widths)
    return sum(a * b + b for a, b in zip(widths, widths[1:]))


class DenseNet:
    """Fully connected sigmoid network; weights are ``(in, out)`` matrices."""

    def __init__(self, weights, biases):
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias vector per weight matrix and at least one layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} do not match")
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ValueError(f"layer {i}: input width {w.shape[0]} != previous output {self.weights[i - 1].shape[1]}")

    @classmethod
    def init(cls, widths, rng: np.random.Generator, scale: float = 1.0) -> "DenseNet":
        """Glorot-uniform weights times ``scale`` (0 gives an all-zero net), zero biases."""
        widths = [int(w) for w in widths]
        if len(widths) < 2 or any(w < 1 for w in widths):
            raise ValueError(f"invalid layer widths {widths}")
        weights = []
        for a, b in zip(widths, widths[1:]):
            limit = scale * np.sqrt(6.0 / (a + b))
            weights.append(rng.uniform(-limit, limit, (a, b)) if scale else np.zeros((a, b)))
        return cls(weights, [np.zeros(b) for b in widths[1:]])

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0], *(w.shape[1] for w in self.weights))

    def count_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> "DenseNet":
        return DenseNet(self.weights, self.biases)

    def flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for pair in zip(self.weights, self.biases) for p in pair])

    def set_flat(self, v) -> None:
        v = np.asarray(v, dtype=float)
        if v.size != self.count_params():
            raise ValueError(f"expected {self.count_params()} values, got {v.size}")
        i = 0
        for p in (p for pair in zip(self.weights, self.biases) for p in pair):
            p[...] = v[i:i + p.size].reshape(p.shape)
            i += p.size

    def forward(self, x) -> tuple[list[np.ndarray], np.ndarray]:
        """Activations of every layer (input first) and the last pre-activation."""
        acts = [np.atleast_2d(np.asarray(x, dtype=float))]
        z = None
        for w, b in zip(self.weights, self.biases):
            z = acts[-1] @ w + b
            acts.append(sigmoid(z))
        return acts, z

    def __call__(self, x) -> np.ndarray:
        return self.forward(x)[0][-1]

    def backward(self, acts, d_logit) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """Gradients given dL/d(last pre-activation); returns per-layer (dW, db) and dL/dinput."""
        grads = []
        dz = np.asarray(d_logit, dtype=float)
        for i in range(len(self.weights) - 1, -1, -1):
            grads.append((acts[i].T @ dz, dz.sum(axis=0)))
            d_in = dz @ self.weights[i].T
            if i:
                a = acts[i]
                dz = d_in * a * (1.0 - a)
        return grads[::-1], d_in

    def sgd(self, grads, lr: float) -> None:
        for (dw, db), w, b in zip(grads, self.weights, self.biases):
            w -= lr * dw
            b -= lr * db


def bce_from_logit(z, label: float) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy of ``sigmoid(z)`` against ``label`` and its logit gradient."""
    z = np.asarray(z, dtype=float)
    loss = float(np.mean(label * softplus(-z) + (1.0 - label) * softplus(z)))
    return loss, (sigmoid(z) - label) / z.shape[0]


def bce_loss_and_grads(net: DenseNet, x, label: float):
    """BCE of ``net(x)`` and its gradients w.r.t. parameters and input."""
    acts, z = net.forward(x)
    loss, dz = bce_from_logit(z, label)
    grads, dx = net.backward(acts, dz)
    return loss, grads, dx


@dataclass
class CGanConfig:
    gen_widths: tuple[int, ...] = (2, 22, 8, 2)
    disc_widths: tuple[int, ...] = (2, 22, 8, 1)
    gen_learning_rate: float = 0.005
    disc_learning_rate: float = 0.2
    epochs: int = 50
    batch_size: int = 2
    seed: int = 0
    gen_init_scale: float = 4.0
    disc_init_scale: float = 1.0
    standardize_input: bool = True
    eval_interval: int = 1
    eval_sample_count: int = 500
    bins: int = 16

    def __post_init__(self):
        self.gen_widths = tuple(self.gen_widths)
        self.disc_widths = tuple(self.disc_widths)

    @property
    def latent_dim(self) -> int:
        return self.gen_widths[0]

    def validate(self) -> "CGanConfig":
        checks = [
            (len(self.gen_widths) >= 2 and all(w >= 1 for w in self.gen_widths), "gen_widths need >= 2 positive entries"),
            (len(self.disc_widths) >= 2 and all(w >= 1 for w in self.disc_widths), "disc_widths need >= 2 positive entries"),
            (self.gen_widths[-1] == 2, "generator output width must be 2"),
            (self.disc_widths[0] == 2, "discriminator input width must be 2"),
            (self.disc_widths[-1] == 1, "discriminator output width must be 1"),
            (self.gen_learning_rate > 0 and self.disc_learning_rate > 0, "learning rates must be > 0"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (self.batch_size >= 1, "batch_size must be >= 1"),
            (self.gen_init_scale >= 0 and self.disc_init_scale >= 0, "init scales must be >= 0"),
            (self.eval_interval >= 1, "eval_interval must be >= 1"),
            (self.eval_sample_count >= 1, "eval_sample_count must be >= 1"),
            (self.bins >= 2, "bins must be >= 2"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigurationError(msg)
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["gen_widths"] = list(self.gen_widths)
        d["disc_widths"] = list(self.disc_widths)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CGanConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown classical option(s): {sorted(unknown)}")
        return cls(**d).validate()


@dataclass
class CGanEpoch:
    epoch: int
    disc_loss: float
    gen_loss: float
    hellinger: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False)


@dataclass
class CGanTrace:
    generator: DenseNet
    discriminator: DenseNet
    initial_hellinger: float | None
    initial_samples: np.ndarray | None = field(default=None, repr=False)
    records: list[CGanEpoch] = field(default_factory=list)

    @property
    def hellinger_series(self) -> list[float]:
        return [r.hellinger for r in self.records if r.hellinger is not None]

    @property
    def final(self) -> CGanEpoch:
        return self.records[-1]


def train_cgan(
    config: CGanConfig,
    dataset,
    target: Histogram2D | None = None,
    on_epoch: Callable[[CGanEpoch], None] | None = None,
) -> CGanTrace:
    """Alternating minibatch SGD; one discriminator then one generator step per batch.

    ``dataset`` holds points in [0,1]^2, visited in order.  With
    ``standardize_input`` the discriminator sees ``(x - mean) / std`` of the
    dataset, a fixed non-trainable input transform.
    """
    config.validate()
    data = np.asarray(dataset, dtype=float).reshape(-1, 2)
    if len(data) == 0:
        raise ConfigurationError("dataset is empty")
    if config.standardize_input:
        mu, sd = data.mean(axis=0), data.std(axis=0)
        sd = np.where(sd > 0, sd, 1.0)
    else:
        mu, sd = np.zeros(2), np.ones(2)

    init_ss, noise_ss = np.random.SeedSequence([int(config.seed), 2]).spawn(2)
    init_rng = np.random.default_rng(init_ss)
    gen = DenseNet.init(config.gen_widths, init_rng, config.gen_init_scale)
    disc = DenseNet.init(config.disc_widths, init_rng, config.disc_init_scale)
    noise = np.random.default_rng(noise_ss)
    latent = config.latent_dim

    def evaluate(epoch):
        rng = np.random.default_rng(np.random.SeedSequence([int(config.seed), 3, epoch]))
        pts = gen(rng.normal(size=(config.eval_sample_count, latent)))
        return hellinger(histogram(pts, config.bins), target), pts

    trace = CGanTrace(gen, disc, None)
    if target is not None:
        trace.initial_hellinger, trace.initial_samples = evaluate(0)

    for epoch in range(1, config.epochs + 1):
        d_losses, g_losses = [], []
        for start in range(0, len(data), config.batch_size):
            real = data[start:start + config.batch_size]
            m = len(real)
            fake = gen(noise.normal(size=(m, latent)))
            loss_r, grads_r, _ = bce_loss_and_grads(disc, (real - mu) / sd, 1.0)
            loss_f, grads_f, _ = bce_loss_and_grads(disc, (fake - mu) / sd, 0.0)
            disc.sgd([(a[0] + b[0], a[1] + b[1]) for a, b in zip(grads_r, grads_f)], config.disc_learning_rate)

            g_acts, _ = gen.forward(noise.normal(size=(m, latent)))
            loss_g, _, dx = bce_loss_and_grads(disc, (g_acts[-1] - mu) / sd, 1.0)
            out = g_acts[-1]
            grads_g, _ = gen.backward(g_acts, dx / sd * out * (1.0 - out))
            gen.sgd(grads_g, config.gen_learning_rate)
            d_losses.append(loss_r + loss_f)
            g_losses.append(loss_g)

        record = CGanEpoch(epoch, float(np.mean(d_losses)), float(np.mean(g_losses)))
        if not (np.isfinite(record.disc_loss) and np.isfinite(record.gen_loss)):
            raise TrainingError(f"non-finite loss at epoch {epoch}")
        if target is not None and (epoch % config.eval_interval == 0 or epoch == config.epochs):
            record.hellinger, record.samples = evaluate(epoch)
        trace.records.append(record)
        log_.debug("epoch %d: d=%.4f g=%.4f hellinger=%s", epoch, record.disc_loss, record.gen_loss, record.hellinger)
        if on_epoch is not None:
            on_epoch(record)
    return trace

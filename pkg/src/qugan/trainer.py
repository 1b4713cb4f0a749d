"""Adversarial training of a quantum discriminator/generator pair.

Both networks are identical layered circuits.  The discriminator lives on one
register, the generator (or a loaded data point) on another, and a SWAP test
between them gives the probability-like score that the costs are built from:

    cost_d_real = -log p_real          (discriminator should match the data)
    cost_d_fake = -log(1 - p_fake)     (... and move away from the generator)
    cost_g      = -log p_fake          (generator should match the discriminator)

Gradients use a shifted difference whose shift shrinks with the epoch number,
``0.5 * (f(t + s) - f(t - s))`` with ``s = pi / (2 sqrt(epoch))``.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from math import log, pi, sin, sqrt
from typing import Callable

import numpy as np

from .circuit import build_network, standard_layers, run_amplitudes
from .encoding import Scaler, decode_measurements, encode_point, loading_circuit
from .errors import ConfigurationError, TrainingError
from .metrics import Histogram2D, hellinger, histogram
from .statevector import StateVector, sample, zero_state
from .swaptest import QubitLayout, p_value_exact, p_value_shots

log_ = logging.getLogger(__name__)

GENERATOR_UPDATES = ("from_discriminator", "from_generator")


@dataclass
class TrainConfig:
    """Hyperparameters of the training schedule.

    ``generator_update`` selects the base of the generator step:
    ``"from_discriminator"`` sets theta_g <- theta_d - lr * grad, as the
    schedule is printed; ``"from_generator"`` is the conventional
    theta_g <- theta_g - lr * grad.
    """

    dim: int = 2
    learning_rate: float = 0.01
    epochs: int = 25
    disc_on_gen_count: int = 5
    gen_on_disc_count: int = 1
    shots: int = 30
    seed: int = 0
    eval_interval: int = 1
    eval_sample_count: int = 500
    bins: int = 16
    normalized_shift: bool = False
    shuffle: bool = False
    gradient_shots: int | None = None
    generator_update: str = "from_discriminator"
    clamp: float = 1e-6

    def validate(self) -> "TrainConfig":
        checks = [
            (self.dim >= 1, "dim must be >= 1"),
            (1 + 2 * self.dim <= 24, "dim too large for the simulator"),
            (self.learning_rate > 0, "learning_rate must be > 0"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (self.disc_on_gen_count >= 1, "disc_on_gen_count must be >= 1"),
            (self.gen_on_disc_count >= 1, "gen_on_disc_count must be >= 1"),
            (self.shots >= 1, "shots must be >= 1"),
            (self.eval_interval >= 1, "eval_interval must be >= 1"),
            (self.eval_sample_count >= 1, "eval_sample_count must be >= 1"),
            (self.bins >= 2, "bins must be >= 2"),
            (self.gradient_shots is None or self.gradient_shots >= 1, "gradient_shots must be >= 1"),
            (self.generator_update in GENERATOR_UPDATES, f"generator_update must be one of {GENERATOR_UPDATES}"),
            (0 < self.clamp < 1, "clamp must be in (0, 1)"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigurationError(msg)
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown train option(s): {sorted(unknown)}")
        return cls(**d).validate()


@dataclass
class NetworkParams:
    theta_d: np.ndarray
    theta_g: np.ndarray

    def to_dict(self) -> dict:
        return {"theta_d": self.theta_d.tolist(), "theta_g": self.theta_g.tolist()}


@dataclass(frozen=True)
class LossReport:
    p_real: float
    p_fake: float
    cost_d_real: float
    cost_d_fake: float
    cost_g: float


@dataclass
class EpochRecord:
    epoch: int
    theta_d: np.ndarray
    theta_g: np.ndarray
    losses: LossReport
    hellinger: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False)


@dataclass
class TrainingTrace:
    initial: NetworkParams
    initial_hellinger: float | None
    initial_samples: np.ndarray | None = field(default=None, repr=False)
    records: list[EpochRecord] = field(default_factory=list)
    cost_evaluations: int = 0

    @property
    def hellinger_series(self) -> list[float]:
        return [r.hellinger for r in self.records if r.hellinger is not None]

    @property
    def final(self) -> EpochRecord:
        return self.records[-1]


def shift_size(epoch: int) -> float:
    if epoch < 1:
        raise ValueError(f"epoch index is 1-based, got {epoch}")
    return pi / (2.0 * sqrt(epoch))


def shift_gradient(
    cost: Callable[[np.ndarray], float], params, k: int, epoch: int, normalized: bool = False
) -> float:
    """Half the symmetric difference of ``cost`` around slot ``k``.

    No division by the shift: at epoch 1 (shift pi/2) this is the exact
    derivative of a sinusoidal cost, and later it scales like derivative * shift.
    ``normalized`` divides the difference by ``2 sin(shift)`` instead.
    """
    s = shift_size(epoch)
    plus = np.array(params, dtype=float)
    minus = plus.copy()
    plus[k] += s
    minus[k] -= s
    diff = cost(plus) - cost(minus)
    if normalized:
        return diff / (2.0 * sin(s))
    return 0.5 * diff


def gradient(cost, params, epoch: int, normalized: bool = False) -> np.ndarray:
    return np.array([shift_gradient(cost, params, k, epoch, normalized) for k in range(len(params))])


class QuGAN:
    """Circuits, costs and sampling for one data dimensionality."""

    def __init__(self, dim: int, clamp: float = 1e-6):
        self.dim = dim
        self.clamp = clamp
        self.layout = QubitLayout.for_dim(dim)
        n = self.layout.num_qubits
        self.disc_circuit = build_network(self.layout.disc_qubits, standard_layers(self.layout.disc_qubits), n)
        self.gen_circuit = build_network(self.layout.other_qubits, standard_layers(self.layout.other_qubits), n)
        self.loader = loading_circuit(self.layout.other_qubits, n)
        self.evaluations = 0

    @property
    def num_disc_params(self) -> int:
        return self.disc_circuit.num_params

    @property
    def num_gen_params(self) -> int:
        return self.gen_circuit.num_params

    # p-values ------------------------------------------------------------

    def _p(self, other_circuit, other_params, theta_d, shots=None, rng=None) -> float:
        if shots is None:
            out = p_value_exact(self.disc_circuit, theta_d, other_circuit, other_params, self.layout)
        else:
            out = p_value_shots(self.disc_circuit, theta_d, other_circuit, other_params, self.layout, shots, rng)
        return out.p_value

    def p_real(self, theta_d, x, shots=None, rng=None) -> float:
        return self._p(self.loader, encode_point(x), theta_d, shots, rng)

    def p_fake(self, theta_d, theta_g, shots=None, rng=None) -> float:
        return self._p(self.gen_circuit, theta_g, theta_d, shots, rng)

    # costs ---------------------------------------------------------------

    def _neglog(self, p: float) -> float:
        self.evaluations += 1
        return -log(min(max(p, self.clamp), 1.0))

    def cost_d_real(self, theta_d, x, shots=None, rng=None) -> float:
        return self._neglog(self.p_real(theta_d, x, shots, rng))

    def cost_d_fake(self, theta_d, theta_g, shots=None, rng=None) -> float:
        return self._neglog(1.0 - self.p_fake(theta_d, theta_g, shots, rng))

    def cost_g(self, theta_d, theta_g, shots=None, rng=None) -> float:
        return self._neglog(self.p_fake(theta_d, theta_g, shots, rng))

    def loss_report(self, theta_d, theta_g, data) -> LossReport:
        """Epoch-level averages; these evaluations are not counted."""
        before = self.evaluations
        p_real = np.array([self.p_real(theta_d, x) for x in data])
        p_fake = self.p_fake(theta_d, theta_g)
        c = self.clamp
        report = LossReport(
            p_real=float(p_real.mean()),
            p_fake=float(p_fake),
            cost_d_real=float(np.mean(-np.log(np.clip(p_real, c, 1.0)))),
            cost_d_fake=-log(min(max(1.0 - p_fake, c), 1.0)),
            cost_g=-log(min(max(p_fake, c), 1.0)),
        )
        self.evaluations = before
        return report

    # sampling ------------------------------------------------------------

    def generator_state(self, theta_g) -> StateVector:
        n = self.layout.num_qubits
        return StateVector(n, run_amplitudes(self.gen_circuit, theta_g, zero_state(n).amplitudes))

    def generate_normalized(self, theta_g, count: int, shots: int, seed) -> np.ndarray:
        """``count`` points in [0,1]^d, each the per-qubit mean of ``shots`` shots."""
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        result = sample(self.generator_state(theta_g), self.layout.other_qubits, count * shots, seed)
        return result.bits.reshape(count, shots, self.dim).mean(axis=1)

    def generate_samples(self, theta_g, count: int, shots: int, seed, scaler: Scaler) -> np.ndarray:
        return decode_measurements(self.generate_normalized(theta_g, count, shots, seed), scaler)

    def init_params(self, rng: np.random.Generator) -> NetworkParams:
        theta_d = rng.random(self.num_disc_params) * pi
        theta_g = rng.random(self.num_gen_params) * pi
        return NetworkParams(theta_d, theta_g)


def _eval_seed(seed: int, epoch: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), 1, epoch])


def train(
    config: TrainConfig,
    dataset,
    target: Histogram2D | None = None,
    on_epoch: Callable[[EpochRecord], None] | None = None,
) -> TrainingTrace:
    """Run the full schedule on ``dataset`` (points already scaled to [0,1]^d).

    Per epoch: one discriminator step per data point against ``cost_d_real``,
    ``disc_on_gen_count`` discriminator steps against ``cost_d_fake``, then
    ``gen_on_disc_count`` generator steps against ``cost_g``.  When ``target``
    is given (d = 2), the Hellinger distance of freshly generated samples is
    recorded every ``eval_interval`` epochs and at epoch 0.
    """
    config.validate()
    data = np.asarray(dataset, dtype=float).reshape(-1, config.dim)
    if len(data) == 0:
        raise ConfigurationError("dataset is empty")
    if np.any(data < 0) or np.any(data > 1):
        raise ConfigurationError("dataset must be scaled to [0, 1]")
    if target is not None and config.dim != 2:
        raise ConfigurationError("Hellinger evaluation needs dim = 2")

    model = QuGAN(config.dim, config.clamp)
    init_ss, order_ss, grad_ss = np.random.SeedSequence([int(config.seed), 0]).spawn(3)
    params = model.init_params(np.random.default_rng(init_ss))
    order_rng = np.random.default_rng(order_ss)
    grad_rng = np.random.default_rng(grad_ss) if config.gradient_shots else None
    theta_d, theta_g = params.theta_d.copy(), params.theta_g.copy()

    def evaluate(epoch):
        pts = model.generate_normalized(theta_g, config.eval_sample_count, config.shots, _eval_seed(config.seed, epoch))
        return hellinger(histogram(pts, config.bins), target), pts

    trace = TrainingTrace(initial=NetworkParams(theta_d.copy(), theta_g.copy()), initial_hellinger=None)
    if target is not None:
        trace.initial_hellinger, trace.initial_samples = evaluate(0)

    lr = config.learning_rate
    norm = config.normalized_shift
    shots = config.gradient_shots

    def step(cost, theta, epoch, where):
        g = gradient(cost, theta, epoch, norm)
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient at epoch {epoch}, {where}")
        return g

    for epoch in range(1, config.epochs + 1):
        order = order_rng.permutation(len(data)) if config.shuffle else range(len(data))
        for i in order:
            x = data[i]
            g = step(lambda t: model.cost_d_real(t, x, shots, grad_rng), theta_d, epoch, f"real-data step {i}")
            theta_d = theta_d - lr * g
        for i in range(config.disc_on_gen_count):
            g = step(lambda t: model.cost_d_fake(t, theta_g, shots, grad_rng), theta_d, epoch, f"fake step {i}")
            theta_d = theta_d - lr * g
        for i in range(config.gen_on_disc_count):
            g = step(lambda t: model.cost_g(theta_d, t, shots, grad_rng), theta_g, epoch, f"generator step {i}")
            base = theta_d if config.generator_update == "from_discriminator" else theta_g
            theta_g = base - lr * g

        losses = model.loss_report(theta_d, theta_g, data)
        for name in ("cost_d_real", "cost_d_fake", "cost_g"):
            if not np.isfinite(getattr(losses, name)):
                raise TrainingError(f"non-finite {name} at epoch {epoch}")
        record = EpochRecord(epoch, theta_d.copy(), theta_g.copy(), losses)
        if target is not None and (epoch % config.eval_interval == 0 or epoch == config.epochs):
            record.hellinger, record.samples = evaluate(epoch)
        trace.records.append(record)
        log_.debug("epoch %d: %s hellinger=%s", epoch, losses, record.hellinger)
        if on_epoch is not None:
            on_epoch(record)

    trace.cost_evaluations = model.evaluations
    return trace

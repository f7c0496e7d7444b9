"""Full-batch Adam training on the toy identity task.

For inputs ``x = 0..n_inputs-1`` and frequencies ``omega = 0..omega_max``
the cosine-coefficient matrix ``A[x, omega]`` is pushed toward the identity
under mean squared error. Sine coefficients are left free.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, ShapeError, TrainingDiverged
from .fourier import FrequencySet, coefficient_matrix
from .model import ModelParams, init_params, one_hot
from .sampler import GRID_CONVENTIONS, SampleGrid

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    n_inputs: int = 16
    omega_max: int = 15
    grid_n: int = 256
    layer_sizes: List[int] = field(default_factory=lambda: [18, 128, 128, 1])
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    steps: int = 5000
    seed: int = 42
    grid_convention: str = "open"

    def validate(self) -> "TrainConfig":
        if self.n_inputs < 1:
            raise ConfigError(f"n_inputs must be >= 1, got {self.n_inputs}")
        if self.omega_max < 0:
            raise ConfigError(f"omega_max must be >= 0, got {self.omega_max}")
        if self.grid_n < 2:
            raise ConfigError(f"grid_n must be >= 2, got {self.grid_n}")
        if not self.omega_max < self.grid_n / 2:
            raise ConfigError(
                f"omega_max < grid_n / 2 violated: omega_max = {self.omega_max}, "
                f"grid_n / 2 = {self.grid_n / 2:g}"
            )
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        for name in ("adam_beta1", "adam_beta2"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(f"0 < {name} < 1 violated: {name} = {getattr(self, name)}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.adam_epsilon > 0:
            raise ConfigError(f"adam_epsilon must be > 0, got {self.adam_epsilon}")
        if self.grid_convention not in GRID_CONVENTIONS:
            raise ConfigError(f"grid_convention must be one of {GRID_CONVENTIONS}, got {self.grid_convention!r}")
        sizes = self.layer_sizes
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ConfigError(f"layer_sizes needs >= 2 positive entries, got {sizes}")
        if sizes[0] != self.n_inputs + 2:
            raise ConfigError(
                f"layer_sizes[0] must equal n_inputs + 2 = {self.n_inputs + 2} "
                f"(one-hot input plus sin t, cos t), got {sizes[0]}"
            )
        if sizes[-1] != 1:
            raise ConfigError(f"layer_sizes must end in 1, got {sizes[-1]}")
        return self

    def grid(self) -> SampleGrid:
        return SampleGrid(self.grid_n, self.grid_convention)

    def frequencies(self) -> FrequencySet:
        return FrequencySet.up_to(self.omega_max)

    def encodings(self) -> List[np.ndarray]:
        return [one_hot(x, self.n_inputs) for x in range(self.n_inputs)]

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ",".join(str(s) for s in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(TrainConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "str":
            return raw
        return [int(s) for s in raw.replace(" ", "").split(",") if s]
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {kind}") from None


def parse_config_text(text: str, base: Optional[TrainConfig] = None) -> TrainConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment, dashes equal underscores."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return replace(base or TrainConfig(), **values)


def load_config(path) -> TrainConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from None
    return parse_config_text(text)


def identity_target(n_inputs: int, n_freqs: int) -> np.ndarray:
    return np.eye(n_inputs, n_freqs)


def toy_loss(a: ad.Tensor, target: np.ndarray) -> ad.Tensor:
    """Mean over all cells of ``(A - target)^2``."""
    target = np.asarray(target, dtype=np.float64)
    if a.shape != target.shape:
        raise ShapeError(f"toy_loss: coefficient matrix {a.shape} vs target {target.shape}")
    return ad.mean(ad.square(ad.sub(a, a.tape.constant(target))))


@dataclass
class AdamState:
    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, arrays: Sequence[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays], 0)


def adam_step(params: Sequence[np.ndarray], grads: Sequence[np.ndarray], state: AdamState,
              step: int, config: TrainConfig):
    """One bias-corrected Adam update; ``step`` counts from 1.

    Returns new ``(params, state)``; inputs are not modified.
    """
    if not (len(params) == len(grads) == len(state.m) == len(state.v)):
        raise ShapeError("adam_step: params, grads and moments differ in length")
    b1, b2, eps, lr = config.adam_beta1, config.adam_beta2, config.adam_epsilon, config.learning_rate
    c1 = 1.0 - b1**step
    c2 = 1.0 - b2**step
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if not (p.shape == g.shape == m.shape == v.shape):
            raise ShapeError(f"adam_step: shapes differ, param {p.shape} grad {g.shape}")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        new_p.append(p - lr * (m / c1) / (np.sqrt(v / c2) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_p, AdamState(new_m, new_v, step)


@dataclass
class TrainReport:
    losses: List[float]
    a: np.ndarray
    b: np.ndarray
    final_loss: float
    params: ModelParams
    config: TrainConfig
    wall_time: float

    @property
    def max_identity_error(self) -> float:
        return float(np.max(np.abs(self.a - identity_target(*self.a.shape))))

    def config_echo(self) -> Dict:
        return asdict(self.config)


def evaluate(params, config: TrainConfig):
    """Final ``(A, B, loss)`` for ``params`` on the config's task, as arrays."""
    a, b = coefficient_matrix(params, config.encodings(), config.grid(), config.frequencies())
    loss = toy_loss(a, identity_target(config.n_inputs, config.omega_max + 1)).item()
    return a.value.copy(), b.value.copy(), loss


def train(config: TrainConfig, *, log_every: int = 0) -> TrainReport:
    config.validate()
    grid = config.grid()
    freqs = config.frequencies()
    encodings = config.encodings()
    target = identity_target(config.n_inputs, len(freqs))

    params = init_params(config.layer_sizes, config.seed)
    arrays = params.arrays()
    state = AdamState.zeros_like(arrays)
    losses: List[float] = []
    start = time.perf_counter()

    for step in range(1, config.steps + 1):
        tape = ad.Tape()
        taped = ModelParams.from_arrays(arrays).bind(tape)
        a, _ = coefficient_matrix(taped, encodings, grid, freqs, sine=False)
        loss = toy_loss(a, target)
        value = loss.item()
        if not math.isfinite(value):
            raise TrainingDiverged(step, "loss")
        grads = tape.backward(loss)
        grad_list = [grads[leaf] for leaf in taped.leaves()]
        if not all(np.isfinite(g).all() for g in grad_list):
            raise TrainingDiverged(step, "gradient")
        arrays, state = adam_step(arrays, grad_list, state, step, config)
        losses.append(value)
        if log_every and step % log_every == 0:
            log.info("step %d loss %.3e", step, value)

    final = ModelParams.from_arrays(arrays, config.seed)
    a_final, b_final, final_loss = evaluate(final, config)
    if not math.isfinite(final_loss):
        raise TrainingDiverged(config.steps, "loss")
    return TrainReport(losses, a_final, b_final, final_loss, final, config,
                       time.perf_counter() - start)


def write_loss_csv(path, losses: Sequence[float]) -> None:
    with open(path, "w", newline="") as f:
        f.write("step,loss\n")
        for k, v in enumerate(losses, 1):
            f.write(f"{k},{format(v, '.17g')}\n")


def read_loss_csv(path) -> List[float]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "step,loss":
        raise ValueError(f"{path}: expected header 'step,loss'")
    return [float(line.split(",")[1]) for line in lines[1:]]

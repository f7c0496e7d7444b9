"""The waveform network: an MLP from ``[encoding, sin t, cos t]`` to a scalar.

Hidden layers use tanh, the output layer is linear. Time only reaches the
network through ``embed_time``, so the output is periodic in ``t`` by
construction.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import autodiff as ad
from .errors import MalformedStreamError, ShapeError

TWO_PI = 2.0 * math.pi
TOY_INPUTS = 16


@dataclass
class ModelParams:
    """Weights ``[fan_in x fan_out]`` and biases ``[1 x fan_out]`` per layer."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    seed: Optional[int] = None

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("need one bias per weight matrix and at least one layer")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (1, w.shape[1]):
                raise ShapeError(f"layer {k}: weight {w.shape} and bias {b.shape} do not conform")
            if k and self.weights[k - 1].shape[1] != w.shape[0]:
                raise ShapeError(
                    f"layer {k}: fan-in {w.shape[0]} != previous fan-out {self.weights[k - 1].shape[1]}"
                )

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def encoding_dim(self) -> int:
        return self.layer_sizes[0] - 2

    def arrays(self) -> List[np.ndarray]:
        """Flat ``[W0, b0, W1, b1, ...]`` view, the order the optimizer uses."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray], seed=None) -> "ModelParams":
        return cls(list(arrays[0::2]), list(arrays[1::2]), seed)

    def bind(self, tape: ad.Tape) -> "TapedParams":
        return TapedParams(tape, [(tape.leaf(w), tape.leaf(b)) for w, b in zip(self.weights, self.biases)])

    def equals(self, other: "ModelParams") -> bool:
        """Bitwise equality of every weight, bias and the seed."""
        if self.seed != other.seed or self.layer_sizes != other.layer_sizes:
            return False
        return all(
            a.tobytes() == b.tobytes() for a, b in zip(self.arrays(), other.arrays())
        )


@dataclass
class TapedParams:
    """Parameters recorded as differentiable leaves on a tape."""

    tape: ad.Tape
    layers: List[Tuple[ad.Tensor, ad.Tensor]] = field(default_factory=list)

    @property
    def layer_sizes(self) -> List[int]:
        return [self.layers[0][0].rows] + [w.cols for w, _ in self.layers]

    @property
    def encoding_dim(self) -> int:
        return self.layer_sizes[0] - 2

    def leaves(self) -> List[ad.Tensor]:
        out = []
        for w, b in self.layers:
            out.extend((w, b))
        return out


def as_taped(params) -> TapedParams:
    if isinstance(params, TapedParams):
        return params
    return params.bind(ad.Tape())


def init_params(layer_sizes: Sequence[int], seed: int) -> ModelParams:
    """Xavier-uniform weights, zero biases, fully determined by ``seed``."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError(f"need at least an input and an output size, got {sizes}")
    if any(s <= 0 for s in sizes):
        raise ValueError(f"layer sizes must be positive, got {sizes}")
    if sizes[-1] != 1:
        raise ValueError(f"the waveform is scalar, so the last layer size must be 1, got {sizes[-1]}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros((1, fan_out)))
    return ModelParams(weights, biases, seed)


def one_hot(x: int, size: int = TOY_INPUTS) -> np.ndarray:
    if not 0 <= x < size:
        raise ValueError(f"input {x} is outside 0..{size - 1}")
    e = np.zeros(size)
    e[x] = 1.0
    return e


def reduce_angle(t):
    """Map ``t`` to the exact representative of ``t mod 2pi`` in ``[-pi, pi)``.

    Every step is exact in IEEE arithmetic (fmod, then Sterbenz-exact
    subtractions), so inputs differing by an exact multiple of the float
    ``2*pi`` reduce to the same bits.
    """
    r = np.fmod(np.asarray(t, dtype=np.float64), TWO_PI)
    r = np.where(r >= math.pi, r - TWO_PI, r)
    return np.where(r < -math.pi, r + TWO_PI, r)


def embed_time(t) -> np.ndarray:
    """``(sin t, cos t)`` along a trailing axis of length 2."""
    r = reduce_angle(t)
    return np.stack([np.sin(r), np.cos(r)], axis=-1)


def features(encoded: np.ndarray, embeddings: np.ndarray) -> np.ndarray:
    """Rows ``[encoded, sin t_n, cos t_n]``, one per time embedding."""
    encoded = np.asarray(encoded, dtype=np.float64).ravel()
    embeddings = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    tiled = np.broadcast_to(encoded, (embeddings.shape[0], encoded.size))
    return np.hstack([tiled, embeddings])


def network(params, inputs) -> ad.Tensor:
    """Evaluate the MLP on a batch of feature rows; returns an ``M x 1`` tensor."""
    taped = as_taped(params)
    h = inputs if isinstance(inputs, ad.Tensor) else taped.tape.constant(inputs)
    if h.cols != taped.layer_sizes[0]:
        raise ShapeError(
            f"network: input width {h.cols} does not match first fan-in {taped.layer_sizes[0]}"
        )
    last = len(taped.layers) - 1
    for k, (w, b) in enumerate(taped.layers):
        h = ad.add_row(ad.matmul(h, w), b)
        if k != last:
            h = ad.tanh(h)
    return h


def forward_model(params, encoded, embedding) -> ad.Tensor:
    """S(theta; x, t) for a single time point, as a 1 x 1 tensor."""
    encoded = np.asarray(encoded, dtype=np.float64).ravel()
    embedding = np.asarray(embedding, dtype=np.float64).ravel()
    taped = as_taped(params)
    if embedding.size != 2:
        raise ShapeError(f"time embedding must be (sin t, cos t), got {embedding.size} values")
    if encoded.size + 2 != taped.layer_sizes[0]:
        raise ShapeError(
            f"encoding of length {encoded.size} needs first fan-in {encoded.size + 2}, "
            f"network has {taped.layer_sizes[0]}"
        )
    return network(taped, features(encoded, embedding))


# Checkpoint layout, all little-endian:
#   8s   magic b"NWAVPRM\0"
#   u32  format version (1)
#   u32  has_seed (0/1), i64 seed
#   u32  grid N the params were trained on (0 = unknown)
#   u32  grid convention (0 = open, 1 = paper)
#   u32  number of layer sizes L, then L x u32 sizes
#   u64  payload length in float64 values
#   f64  payload: per layer, weight row-major then bias
MAGIC = b"NWAVPRM\0"
FORMAT_VERSION = 1
CONVENTIONS = ("open", "paper")


def save_params(params: ModelParams, grid_n: int = 0, grid_convention: str = "open") -> bytes:
    sizes = params.layer_sizes
    payload = np.concatenate([a.ravel() for a in params.arrays()]).astype("<f8")
    header = [
        MAGIC,
        struct.pack("<I", FORMAT_VERSION),
        struct.pack("<Iq", params.seed is not None, params.seed or 0),
        struct.pack("<II", grid_n, CONVENTIONS.index(grid_convention)),
        struct.pack(f"<I{len(sizes)}I", len(sizes), *sizes),
        struct.pack("<Q", payload.size),
    ]
    return b"".join(header) + payload.tobytes()


def load_checkpoint(data: bytes) -> Tuple[ModelParams, int, str]:
    """Decode a checkpoint into ``(params, grid_n, grid_convention)``."""
    pos = 0

    def take(fmt):
        nonlocal pos
        size = struct.calcsize(fmt)
        if pos + size > len(data):
            raise MalformedStreamError(f"stream truncated: needed {size} more bytes", pos)
        out = struct.unpack_from(fmt, data, pos)
        pos += size
        return out

    (magic,) = take("<8s")
    if magic != MAGIC:
        raise MalformedStreamError("bad magic bytes", 0)
    (version,) = take("<I")
    if version != FORMAT_VERSION:
        raise MalformedStreamError(f"unsupported format version {version}", pos - 4)
    has_seed, seed = take("<Iq")
    grid_n, conv = take("<II")
    if conv >= len(CONVENTIONS):
        raise MalformedStreamError(f"unknown grid convention code {conv}", pos - 4)
    (n_sizes,) = take("<I")
    if n_sizes < 2:
        raise MalformedStreamError(f"need at least 2 layer sizes, got {n_sizes}", pos - 4)
    sizes = take(f"<{n_sizes}I")
    if any(s == 0 for s in sizes):
        raise MalformedStreamError("zero layer size", pos - 4 * n_sizes)
    (declared,) = take("<Q")
    expected = sum(i * o + o for i, o in zip(sizes[:-1], sizes[1:]))
    if declared != expected:
        raise MalformedStreamError(
            f"declared payload of {declared} values, layer sizes imply {expected}", pos - 8
        )
    actual = (len(data) - pos) // 8
    if len(data) - pos != 8 * declared:
        raise MalformedStreamError(
            f"declared payload of {declared} values but stream holds {actual}"
            f"{' plus a partial value' if (len(data) - pos) % 8 else ''}",
            pos,
        )
    flat = np.frombuffer(data, dtype="<f8", offset=pos).astype(np.float64)
    arrays, k = [], 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        arrays.append(flat[k : k + fan_in * fan_out].reshape(fan_in, fan_out))
        k += fan_in * fan_out
        arrays.append(flat[k : k + fan_out].reshape(1, fan_out))
        k += fan_out
    params = ModelParams.from_arrays(arrays, seed if has_seed else None)
    return params, grid_n, CONVENTIONS[conv]


def load_params(data: bytes) -> ModelParams:
    return load_checkpoint(data)[0]

"""Uniform sampling grids over [-pi, pi) and sampled neural waveforms."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from . import autodiff as ad
from .model import TWO_PI, as_taped, embed_time, features, network

GRID_CONVENTIONS = ("open", "paper")


@dataclass(frozen=True)
class SampleGrid:
    """``N`` intervals of width ``2pi/N`` starting at ``-pi``.

    The ``open`` convention samples ``t_0 .. t_{N-1}`` and never touches
    ``+pi``, which is the same point as ``-pi`` for a periodic waveform.
    The ``paper`` convention also samples ``t_N = pi``, so that point is
    counted twice by the quadrature. Both use weight ``2/N`` per sample.
    """

    n: int
    convention: str = "open"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs N >= 2 samples, got {self.n}")
        if self.convention not in GRID_CONVENTIONS:
            raise ValueError(f"grid convention must be one of {GRID_CONVENTIONS}, got {self.convention!r}")

    @property
    def delta_t(self) -> float:
        return TWO_PI / self.n

    @property
    def size(self) -> int:
        """Number of sample points (N, or N + 1 for the paper convention)."""
        return self.n + 1 if self.convention == "paper" else self.n

    @property
    def weight(self) -> float:
        return 2.0 / self.n

    @property
    def nyquist(self) -> float:
        return self.n / 2

    @cached_property
    def times(self) -> np.ndarray:
        t = -math.pi + np.arange(self.size) * self.delta_t
        t.flags.writeable = False
        return t

    @cached_property
    def embeddings(self) -> np.ndarray:
        e = embed_time(self.times)
        e.flags.writeable = False
        return e


def build_grid(n: int, convention: str = "open") -> SampleGrid:
    return SampleGrid(n, convention)


@dataclass
class Waveform:
    """Time-value pairs ``(t_n, s_x(t_n))``; ``values`` is a ``size x 1`` tensor."""

    grid: SampleGrid
    values: ad.Tensor
    input_id: Optional[object] = None

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def array(self) -> np.ndarray:
        return self.values.value[:, 0].copy()


def waveform_from_values(values, grid: SampleGrid, tape: Optional[ad.Tape] = None, input_id=None) -> Waveform:
    """Wrap given samples as a differentiable waveform (a leaf on ``tape``)."""
    values = np.asarray(values, dtype=np.float64).reshape(-1, 1)
    if values.shape[0] != grid.size:
        raise ValueError(f"grid has {grid.size} points but {values.shape[0]} values were given")
    tape = tape or ad.Tape()
    return Waveform(grid, tape.leaf(values), input_id)


def sample_waveform(params, encoded, grid: SampleGrid, input_id=None) -> Waveform:
    """Evaluate the network at every grid time for one encoded input."""
    x = features(encoded, grid.embeddings)
    return Waveform(grid, network(as_taped(params), x), input_id)


def _thread_cap() -> int:
    raw = os.environ.get("FOURIER_HEAD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sample_values(params, encodings: Sequence, grid: SampleGrid, threads: Optional[int] = None):
    """Waveform samples as plain arrays, one per encoding, off any shared tape.

    Each input gets its own tape, so evaluation can fan out over up to
    ``threads`` workers (default: ``FOURIER_HEAD_THREADS``, else 1).
    """
    threads = threads or _thread_cap()

    def one(e):
        return sample_waveform(params, e, grid).array()

    if threads == 1 or len(encodings) < 2:
        return [one(e) for e in encodings]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, encodings))


def write_waveform_csv(path, times, values) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(times, values):
            w.writerow([format(float(t), ".17g"), format(float(v), ".17g")])


def read_waveform_csv(path) -> Tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["t", "value"]:
        raise ValueError(f"{path}: expected header 't,value'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]]).reshape(-1, 2)
    return data[:, 0], data[:, 1]

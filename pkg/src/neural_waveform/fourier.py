"""Fourier cosine/sine coefficients of sampled waveforms, on the tape.

Each coefficient is a weighted Riemann sum over the grid,

    a_w = (2/N) * sum_n s(t_n) cos(w t_n)
    b_w = (2/N) * sum_n s(t_n) sin(w t_n)

which is ``(1/pi) * integral`` approximated by mean value times width. On the
open grid this is exact for integer frequencies below N/2. ``w = 0`` uses the
same formula, so ``a_0`` is twice the mean of the waveform.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import autodiff as ad
from .errors import AliasingError
from .model import as_taped, features, network
from .sampler import SampleGrid, Waveform


def check_frequency(omega, grid: SampleGrid) -> int:
    if isinstance(omega, (bool, np.bool_)) or int(omega) != omega:
        raise ValueError(f"frequencies must be integers, got {omega!r}")
    omega = int(omega)
    if omega < 0:
        raise ValueError(f"frequencies must be non-negative, got {omega}")
    if omega >= grid.nyquist:
        raise AliasingError(
            f"frequency {omega} is at or above the Nyquist limit N/2 = {grid.n / 2:g} "
            f"of a {grid.n}-interval grid; resample with a larger N"
        )
    return omega


@dataclass(frozen=True)
class FrequencySet:
    omegas: Tuple[int, ...]

    def __post_init__(self):
        omegas = tuple(int(w) for w in self.omegas)
        if any(w != o for w, o in zip(omegas, self.omegas)):
            raise ValueError(f"frequencies must be integers, got {self.omegas}")
        if len(set(omegas)) != len(omegas):
            raise ValueError(f"frequencies must be distinct, got {omegas}")
        if any(w < 0 for w in omegas):
            raise ValueError(f"frequencies must be non-negative, got {omegas}")
        object.__setattr__(self, "omegas", omegas)

    @classmethod
    def up_to(cls, omega_max: int) -> "FrequencySet":
        return cls(tuple(range(omega_max + 1)))

    def check(self, grid: SampleGrid) -> "FrequencySet":
        for w in self.omegas:
            check_frequency(w, grid)
        return self

    def __len__(self):
        return len(self.omegas)

    def __iter__(self):
        return iter(self.omegas)


def _as_freqs(freqs) -> FrequencySet:
    return freqs if isinstance(freqs, FrequencySet) else FrequencySet(tuple(freqs))


@dataclass
class CoefficientSet:
    a: Dict[int, float]
    b: Dict[int, float]
    input_id: Optional[object] = None

    def rows(self) -> List[Tuple[object, int, float, float]]:
        return [(self.input_id, w, self.a[w], self.b[w]) for w in self.a]


@lru_cache(maxsize=64)
def _basis(grid: SampleGrid, omegas: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
    """cos/sin of ``omega * t_n``, shape ``grid.size x len(omegas)``."""
    phase = np.outer(grid.times, np.asarray(omegas, dtype=np.float64))
    cos_b, sin_b = np.cos(phase), np.sin(phase)
    cos_b.flags.writeable = False
    sin_b.flags.writeable = False
    return cos_b, sin_b


def _coefficient(waveform: Waveform, omega, kind: int) -> ad.Tensor:
    omega = check_frequency(omega, waveform.grid)
    row = _basis(waveform.grid, (omega,))[kind].T
    tape = waveform.values.tape
    return ad.scale(ad.matmul(tape.constant(row), waveform.values), waveform.grid.weight)


def cosine_coefficient(waveform: Waveform, omega: int) -> ad.Tensor:
    """``a_omega`` of ``waveform`` as a 1 x 1 tensor."""
    return _coefficient(waveform, omega, 0)


def sine_coefficient(waveform: Waveform, omega: int) -> ad.Tensor:
    """``b_omega`` of ``waveform`` as a 1 x 1 tensor (identically 0 at omega = 0)."""
    return _coefficient(waveform, omega, 1)


def coefficients(waveform: Waveform, freqs) -> CoefficientSet:
    """Plain-float cosine and sine coefficients for every requested frequency."""
    freqs = _as_freqs(freqs).check(waveform.grid)
    cos_b, sin_b = _basis(waveform.grid, freqs.omegas)
    v = waveform.values.value[:, 0]
    w = waveform.grid.weight
    a = w * (v @ cos_b)
    b = w * (v @ sin_b)
    return CoefficientSet(
        {o: float(x) for o, x in zip(freqs, a)},
        {o: float(x) for o, x in zip(freqs, b)},
        waveform.input_id,
    )


@lru_cache(maxsize=16)
def _batched_basis(grid: SampleGrid, omegas: Tuple[int, ...], n_inputs: int):
    cos_b, sin_b = _basis(grid, omegas)
    select = np.kron(np.eye(n_inputs), np.full((1, grid.size), grid.weight))
    return np.tile(cos_b, (n_inputs, 1)), np.tile(sin_b, (n_inputs, 1)), select


def coefficient_matrix(
    params, encodings: Sequence, grid: SampleGrid, freqs, *, sine: bool = True
) -> Tuple[ad.Tensor, Optional[ad.Tensor]]:
    """Coefficients for every (input, frequency) pair from one batched forward pass.

    Returns ``(A, B)`` with ``A[i, j] = a_{x_i, omega_j}``; ``B`` is ``None``
    when ``sine`` is false. Both are differentiable w.r.t. the parameters.
    """
    freqs = _as_freqs(freqs).check(grid)
    taped = as_taped(params)
    tape = taped.tape
    x = np.vstack([features(e, grid.embeddings) for e in encodings])
    values = network(taped, x)

    cos_t, sin_t, select = _batched_basis(grid, freqs.omegas, len(encodings))
    spread = ad.matmul(values, tape.constant(np.ones((1, len(freqs)))))
    sel = tape.constant(select)
    a = ad.matmul(sel, ad.mul(spread, tape.constant(cos_t)))
    b = ad.matmul(sel, ad.mul(spread, tape.constant(sin_t))) if sine else None
    return a, b


def write_coefficient_csv(path, rows: Iterable[Tuple[object, int, float, float]]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["x", "omega", "a", "b"])
        for x, omega, a, b in rows:
            w.writerow([x, int(omega), format(float(a), ".17g"), format(float(b), ".17g")])


def matrix_rows(inputs: Sequence, freqs, a: np.ndarray, b: np.ndarray):
    freqs = _as_freqs(freqs)
    for i, x in enumerate(inputs):
        for j, omega in enumerate(freqs):
            yield x, omega, a[i, j], b[i, j]


def read_coefficient_csv(path) -> List[Tuple[int, int, float, float]]:
    path = Path(path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["x", "omega", "a", "b"]:
        raise ValueError(f"{path}: expected header 'x,omega,a,b'")
    return [(int(x), int(o), float(a), float(b)) for x, o, a, b in rows[1:]]

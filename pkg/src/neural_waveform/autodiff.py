"""Reverse-mode automatic differentiation over dense 2-D float64 arrays.

A :class:`Tape` records every operation in execution order, so the node list
is already a topological order of the computation graph. ``Tape.backward``
walks it in reverse and accumulates adjoints.

Leaves created with :meth:`Tape.leaf` are differentiable; arrays passed in via
:meth:`Tape.constant` are data and never receive gradients. A node is
differentiable when any of its parents is.

Example::

    tape = Tape()
    w = tape.leaf([[3.0]])
    loss = ad.sum(ad.square(w))
    grads = tape.backward(loss)
    grads[w]  # array([[6.]])
"""

from __future__ import annotations

from typing import Callable, Dict, List, Sequence

import numpy as np

from .errors import ShapeError

OP_KINDS = (
    "matmul",
    "add",
    "sub",
    "elementwise-mul",
    "scalar-mul",
    "tanh",
    "sin",
    "cos",
    "sum",
    "mean",
    "square",
    "broadcast-add-row",
)


def _as_matrix(data) -> np.ndarray:
    arr = np.array(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise ShapeError(f"tensors are 2-D; got an array of shape {arr.shape}")
    return arr


class Tensor:
    """A node on a tape: a 2-D float64 value plus how it was produced."""

    __slots__ = ("value", "tape", "index", "op", "parents", "cache", "requires_grad")

    def __init__(self, value, tape, op, parents=(), cache=None, requires_grad=False):
        self.value = value
        self.tape = tape
        self.op = op
        self.parents = tuple(parents)
        self.cache = cache
        self.requires_grad = requires_grad
        self.index = len(tape.nodes)
        tape.nodes.append(self)

    @property
    def shape(self):
        return self.value.shape

    @property
    def rows(self) -> int:
        return self.value.shape[0]

    @property
    def cols(self) -> int:
        return self.value.shape[1]

    def item(self) -> float:
        if self.value.shape != (1, 1):
            raise ShapeError(f"item() needs a 1x1 tensor, got {self.value.shape}")
        return float(self.value[0, 0])

    def numpy(self) -> np.ndarray:
        return self.value.copy()

    def __repr__(self):
        return f"Tensor(op={self.op}, shape={self.value.shape}, index={self.index})"

    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)


class Tape:
    """Ordered record of a single forward computation."""

    def __init__(self):
        self.nodes: List[Tensor] = []

    def __len__(self):
        return len(self.nodes)

    def leaf(self, data) -> Tensor:
        return Tensor(_as_matrix(data), self, "leaf", requires_grad=True)

    def constant(self, data) -> Tensor:
        return Tensor(_as_matrix(data), self, "constant")

    def backward(self, loss: Tensor) -> Dict[Tensor, np.ndarray]:
        """Return d(loss)/d(node) for every differentiable node on the tape.

        Nodes that do not influence ``loss`` map to zero arrays.
        """
        if loss.tape is not self:
            raise ValueError("loss node was recorded on a different tape")
        if loss.shape != (1, 1):
            raise ShapeError(f"backward needs a scalar (1x1) loss, got shape {loss.shape}")

        adjoint: Dict[int, np.ndarray] = {loss.index: np.ones((1, 1))}
        for node in reversed(self.nodes[: loss.index + 1]):
            g = adjoint.get(node.index)
            if g is None or not node.parents:
                continue
            for parent, pg in zip(node.parents, _BACKWARD[node.op](node, g)):
                if pg is None or not parent.requires_grad:
                    continue
                if parent.index in adjoint:
                    adjoint[parent.index] = adjoint[parent.index] + pg
                else:
                    adjoint[parent.index] = pg

        grads: Dict[Tensor, np.ndarray] = {}
        for node in self.nodes:
            if node.requires_grad:
                g = adjoint.get(node.index)
                grads[node] = g if g is not None else np.zeros_like(node.value)
        return grads


def _record(op, value, parents, cache=None) -> Tensor:
    tape = parents[0].tape
    for p in parents[1:]:
        if p.tape is not tape:
            raise ValueError(f"{op}: operands live on different tapes")
    return Tensor(value, tape, op, parents, cache, any(p.requires_grad for p in parents))


def _same_shape(op, a: Tensor, b: Tensor):
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.cols != b.rows:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")
    return _record("matmul", a.value @ b.value, (a, b))


def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("add", a, b)
    return _record("add", a.value + b.value, (a, b))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("sub", a, b)
    return _record("sub", a.value - b.value, (a, b))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("elementwise-mul", a, b)
    return _record("elementwise-mul", a.value * b.value, (a, b))


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _record("scalar-mul", c * a.value, (a,), c)


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.value)
    return _record("tanh", y, (a,), y)


def sin(a: Tensor) -> Tensor:
    return _record("sin", np.sin(a.value), (a,))


def cos(a: Tensor) -> Tensor:
    return _record("cos", np.cos(a.value), (a,))


def sum(a: Tensor) -> Tensor:  # noqa: A001 - mirrors the op-kind name
    return _record("sum", np.array([[a.value.sum()]]), (a,))


def mean(a: Tensor) -> Tensor:
    return _record("mean", np.array([[a.value.mean()]]), (a,))


def square(a: Tensor) -> Tensor:
    return _record("square", a.value * a.value, (a,))


def add_row(a: Tensor, row: Tensor) -> Tensor:
    """Add a 1 x cols row to every row of ``a``."""
    if row.rows != 1 or row.cols != a.cols:
        raise ShapeError(f"broadcast-add-row: cannot add {row.shape} to each row of {a.shape}")
    return _record("broadcast-add-row", a.value + row.value, (a, row))


_FORWARD: Dict[str, Callable[..., Tensor]] = {
    "matmul": matmul,
    "add": add,
    "sub": sub,
    "elementwise-mul": mul,
    "scalar-mul": scale,
    "tanh": tanh,
    "sin": sin,
    "cos": cos,
    "sum": sum,
    "mean": mean,
    "square": square,
    "broadcast-add-row": add_row,
}


def forward(op_kind: str, inputs: Sequence, *args) -> Tensor:
    """Apply ``op_kind`` to ``inputs`` by name; ``scalar-mul`` takes the scalar in ``args``."""
    try:
        fn = _FORWARD[op_kind]
    except KeyError:
        raise ValueError(f"unknown op kind {op_kind!r}; expected one of {OP_KINDS}") from None
    return fn(*inputs, *args)


def _bw_matmul(node, g):
    a, b = node.parents
    ga = g @ b.value.T if a.requires_grad else None
    gb = a.value.T @ g if b.requires_grad else None
    return ga, gb


def _bw_sum(node, g):
    (a,) = node.parents
    return (np.full(a.shape, g[0, 0]),)


def _bw_mean(node, g):
    (a,) = node.parents
    return (np.full(a.shape, g[0, 0] / a.value.size),)


_BACKWARD = {
    "matmul": _bw_matmul,
    "add": lambda node, g: (g, g),
    "sub": lambda node, g: (g, -g),
    "elementwise-mul": lambda node, g: (g * node.parents[1].value, g * node.parents[0].value),
    "scalar-mul": lambda node, g: (node.cache * g,),
    "tanh": lambda node, g: (g * (1.0 - node.cache * node.cache),),
    "sin": lambda node, g: (g * np.cos(node.parents[0].value),),
    "cos": lambda node, g: (-g * np.sin(node.parents[0].value),),
    "sum": _bw_sum,
    "mean": _bw_mean,
    "square": lambda node, g: (2.0 * node.parents[0].value * g,),
    "broadcast-add-row": lambda node, g: (g, g.sum(axis=0, keepdims=True)),
}

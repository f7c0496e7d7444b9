import math
import zlib

import numpy as np
import pytest

from neural_waveform import autodiff as ad
from neural_waveform.errors import ShapeError

from oracles import central_difference, gradient_mismatch


def test_matmul_identity():
    tape = ad.Tape()
    out = ad.matmul(tape.constant([[1, 2], [3, 4]]), tape.constant(np.eye(2)))
    assert out.value.tolist() == [[1, 2], [3, 4]]


def test_tanh_origin_and_sin_half_pi():
    tape = ad.Tape()
    assert ad.tanh(tape.constant([[0.0]])).item() == 0.0
    assert abs(ad.sin(tape.constant([[math.pi / 2]])).item() - 1.0) < 1e-12


def test_forward_by_name_records_node():
    tape = ad.Tape()
    x = tape.leaf([[1.0, -2.0]])
    y = ad.forward("square", [x])
    assert y.op == "square" and y.parents == (x,)
    assert tape.nodes[-1] is y
    assert ad.forward("scalar-mul", [x], 3.0).value.tolist() == [[3.0, -6.0]]
    with pytest.raises(ValueError, match="unknown op"):
        ad.forward("relu", [x])


@pytest.mark.parametrize(
    "op, a, b",
    [
        ("matmul", (2, 3), (2, 3)),
        ("add", (2, 3), (3, 2)),
        ("sub", (1, 3), (2, 3)),
        ("elementwise-mul", (2, 2), (2, 1)),
        ("broadcast-add-row", (2, 3), (1, 2)),
    ],
)
def test_shape_mismatch_names_op_and_shapes(op, a, b):
    tape = ad.Tape()
    with pytest.raises(ShapeError) as exc:
        ad.forward(op, [tape.leaf(np.zeros(a)), tape.leaf(np.zeros(b))])
    msg = str(exc.value)
    assert op in msg and str(a) in msg and str(b) in msg


def test_backward_square():
    tape = ad.Tape()
    w = tape.leaf([[3.0]])
    grads = tape.backward(ad.sum(ad.square(w)))
    assert grads[w].tolist() == [[6.0]]


def test_backward_sin_at_zero():
    tape = ad.Tape()
    w = tape.leaf([[0.0]])
    assert tape.backward(ad.sum(ad.sin(w)))[w].tolist() == [[1.0]]


def test_loss_gradient_wrt_itself_is_one():
    tape = ad.Tape()
    w = tape.leaf([[1.5, 2.0]])
    loss = ad.mean(ad.square(w))
    assert tape.backward(loss)[loss].tolist() == [[1.0]]


def test_backward_requires_scalar():
    tape = ad.Tape()
    w = tape.leaf(np.ones((2, 2)))
    with pytest.raises(ShapeError, match="scalar"):
        tape.backward(ad.square(w))


def test_unreached_nodes_get_zero_gradient_and_constants_none():
    tape = ad.Tape()
    w = tape.leaf([[1.0, 2.0]])
    unused = tape.leaf([[5.0]])
    c = tape.constant([[2.0, 2.0]])
    grads = tape.backward(ad.sum(ad.mul(w, c)))
    assert grads[unused].tolist() == [[0.0]]
    assert c not in grads
    assert grads[w].tolist() == [[2.0, 2.0]]


def test_mean_matmul_matches_finite_differences():
    rng = np.random.default_rng(0)
    x = rng.uniform(-2, 2, (4, 3))
    w0 = rng.uniform(-2, 2, (3, 2))

    def f(arrays):
        tape = ad.Tape()
        return ad.mean(ad.matmul(tape.constant(x), tape.leaf(arrays[0]))).item()

    tape = ad.Tape()
    w = tape.leaf(w0)
    g = tape.backward(ad.mean(ad.matmul(tape.constant(x), w)))[w]
    assert not gradient_mismatch([g], central_difference(f, [w0]))


# Each op is reduced to a scalar through a fixed random projection, so the
# whole vector-Jacobian product is checked rather than a plain sum.
UNARY = ["tanh", "sin", "cos", "square", "sum", "mean"]
BINARY = {
    "matmul": ((3, 4), (4, 2)),
    "add": ((3, 4), (3, 4)),
    "sub": ((3, 4), (3, 4)),
    "elementwise-mul": ((3, 4), (3, 4)),
    "broadcast-add-row": ((3, 4), (1, 4)),
}


def _projected(op, arrays, proj_seed=99, extra=()):
    tape = ad.Tape()
    leaves = [tape.leaf(a) for a in arrays]
    out = ad.forward(op, leaves, *extra)
    proj = np.random.default_rng(proj_seed).uniform(-1, 1, out.shape)
    return tape, leaves, ad.sum(ad.mul(out, tape.constant(proj)))


@pytest.mark.parametrize("op", UNARY + list(BINARY) + ["scalar-mul"])
def test_gradient_matches_finite_differences(op):
    rng = np.random.default_rng(zlib.crc32(op.encode()))
    if op in BINARY:
        arrays = [rng.uniform(-2, 2, s) for s in BINARY[op]]
    else:
        arrays = [rng.uniform(-2, 2, (3, 4))]
    extra = (-1.7,) if op == "scalar-mul" else ()

    tape, leaves, loss = _projected(op, arrays, extra=extra)
    grads = tape.backward(loss)
    analytic = [grads[leaf] for leaf in leaves]
    numeric = central_difference(lambda arrs: _projected(op, arrs, extra=extra)[2].item(), arrays)
    assert not gradient_mismatch(analytic, numeric)


def test_backward_is_linear():
    rng = np.random.default_rng(3)
    w0 = rng.uniform(-2, 2, (3, 3))
    x = rng.uniform(-2, 2, (5, 3))
    alpha, beta = 0.7, -2.3

    def grads_of(combine):
        tape = ad.Tape()
        w = tape.leaf(w0)
        h = ad.matmul(tape.constant(x), w)
        f = ad.mean(ad.square(ad.tanh(h)))
        g = ad.sum(ad.sin(h))
        return tape.backward(combine(f, g))[w]

    gf = grads_of(lambda f, g: f)
    gg = grads_of(lambda f, g: g)
    gc = grads_of(lambda f, g: ad.add(ad.scale(f, alpha), ad.scale(g, beta)))
    np.testing.assert_allclose(gc, alpha * gf + beta * gg, rtol=0, atol=1e-10)


def test_backward_is_deterministic():
    rng = np.random.default_rng(4)
    arrays = [rng.uniform(-2, 2, (6, 5)), rng.uniform(-2, 2, (5, 4))]

    def run():
        tape = ad.Tape()
        a, b = (tape.leaf(v) for v in arrays)
        loss = ad.mean(ad.square(ad.cos(ad.tanh(ad.matmul(a, b)))))
        g = tape.backward(loss)
        return g[a].tobytes() + g[b].tobytes()

    assert run() == run()


def test_operands_must_share_a_tape():
    x = ad.Tape().leaf([[1.0]])
    y = ad.Tape().leaf([[1.0]])
    with pytest.raises(ValueError, match="different tapes"):
        ad.add(x, y)


def test_operator_sugar():
    tape = ad.Tape()
    x = tape.leaf([[1.0, 2.0]])
    y = tape.leaf([[3.0], [4.0]])
    assert (x @ y).item() == 11.0
    assert (2 * x - x * x).value.tolist() == [[1.0, 0.0]]
    assert (-x).value.tolist() == [[-1.0, -2.0]]

import math
import struct
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neural_waveform.errors import MalformedStreamError, ShapeError
from neural_waveform.model import (
    TWO_PI,
    ModelParams,
    embed_time,
    forward_model,
    init_params,
    load_checkpoint,
    load_params,
    network,
    one_hot,
    reduce_angle,
    save_params,
)
from neural_waveform.sampler import build_grid, sample_waveform

TOY_SIZES = [18, 128, 128, 1]


@pytest.fixture(scope="module")
def toy_params():
    return init_params(TOY_SIZES, 42)


def test_init_is_deterministic(toy_params):
    assert toy_params.equals(init_params(TOY_SIZES, 42))
    assert not toy_params.equals(init_params(TOY_SIZES, 43))


def test_init_xavier_bound_and_shapes(toy_params):
    w0 = toy_params.weights[0]
    assert w0.shape == (18, 128)
    # sqrt(6 / (18 + 128)) = sqrt(6/146)
    assert np.abs(w0).max() <= math.sqrt(6 / 146)
    assert np.abs(w0).max() > 0.9 * math.sqrt(6 / 146)
    for b in toy_params.biases:
        assert not b.any()
    assert toy_params.layer_sizes == TOY_SIZES


@pytest.mark.parametrize("sizes", [[4], [18, 0, 1], [18, 8, 2], []])
def test_init_rejects_bad_sizes(sizes):
    with pytest.raises(ValueError):
        init_params(sizes, 0)


def test_zero_network_outputs_zero():
    zero = ModelParams([np.zeros((18, 8)), np.zeros((8, 1))], [np.zeros((1, 8)), np.zeros((1, 1))])
    out = forward_model(zero, one_hot(3), embed_time(1.234))
    assert out.shape == (1, 1) and out.item() == 0.0


def test_forward_rejects_wrong_encoding_length(toy_params):
    with pytest.raises(ShapeError, match="fan-in"):
        forward_model(toy_params, np.zeros(15), embed_time(0.0))


def test_one_hot():
    assert one_hot(5).tolist() == [1.0 if i == 5 else 0.0 for i in range(16)]
    with pytest.raises(ValueError):
        one_hot(16)


def test_shift_by_two_pi(toy_params):
    e = one_hot(7)
    for t in (-math.pi, -1.0, 0.0, 0.3, 2.5):
        base = forward_model(toy_params, e, embed_time(t)).item()
        t2 = t + TWO_PI
        shifted = forward_model(toy_params, e, embed_time(t2)).item()
        if Fraction(t2) == Fraction(t) + Fraction(TWO_PI):
            assert shifted == base
        else:
            # the addition itself rounded, so the input moved by an ulp
            assert abs(shifted - base) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(t2=st.floats(-1e3, 1e3, allow_nan=False))
def test_reduce_angle_is_exact(t2):
    # exact rational arithmetic decides what t2 mod 2pi is
    k = round(t2 / TWO_PI)
    exact = Fraction(t2) - k * Fraction(TWO_PI)
    r = float(reduce_angle(t2))
    assert -math.pi <= r < math.pi
    if -math.pi <= exact < math.pi:
        assert Fraction(r) == exact


@settings(max_examples=60, deadline=None)
@given(t2=st.floats(-200, 200, allow_nan=False), x=st.integers(0, 15))
def test_periodicity_is_exact(toy_params, t2, x):
    # t = t2 - k*2pi computed exactly; the model must give identical bits at both
    k = round(t2 / TWO_PI)
    t_exact = Fraction(t2) - k * Fraction(TWO_PI)
    t = float(t_exact)
    assert Fraction(t) == t_exact
    e = one_hot(x)
    a = forward_model(toy_params, e, embed_time(t)).item()
    b = forward_model(toy_params, e, embed_time(t2)).item()
    assert a == b


def test_batched_equals_looped():
    params = init_params([18, 16, 16, 1], 5)
    grid = build_grid(64)
    e = one_hot(4)
    batched = sample_waveform(params, e, grid).array()
    looped = np.array([forward_model(params, e, emb).item() for emb in grid.embeddings])
    np.testing.assert_allclose(batched, looped, rtol=0, atol=1e-12)


def test_network_checks_width(toy_params):
    with pytest.raises(ShapeError):
        network(toy_params, np.zeros((3, 17)))


def test_save_load_roundtrip():
    params = init_params(TOY_SIZES, 7)
    data = save_params(params)
    back = load_params(data)
    assert back.equals(params)
    assert back.seed == 7 and back.layer_sizes == TOY_SIZES
    assert save_params(back) == data


def test_checkpoint_keeps_grid_and_unknown_seed():
    params = ModelParams([np.ones((4, 1))], [np.zeros((1, 1))])
    back, n, conv = load_checkpoint(save_params(params, 512, "paper"))
    assert back.seed is None and (n, conv) == (512, "paper")
    assert back.equals(params)


def test_negative_seed_roundtrip():
    params = init_params([3, 1], 5)
    params.seed = -12
    assert load_params(save_params(params)).seed == -12


@pytest.mark.parametrize("cut", [0, 5, 8, 20, 40, 100])
def test_truncated_stream_is_malformed(cut):
    data = save_params(init_params([18, 4, 1], 1))
    with pytest.raises(MalformedStreamError) as exc:
        load_params(data[:cut])
    assert "byte offset" in str(exc.value)


def test_trailing_bytes_are_malformed():
    data = save_params(init_params([18, 4, 1], 1))
    with pytest.raises(MalformedStreamError, match="declared payload"):
        load_params(data + b"\0" * 8)


def test_declared_length_mismatch_is_malformed():
    data = bytearray(save_params(init_params([18, 4, 1], 1)))
    # payload count sits right before the float64 payload: 18*4+4 + 4*1+1 = 81 values
    pos = len(data) - 81 * 8 - 8
    assert struct.unpack_from("<Q", data, pos)[0] == 81
    struct.pack_into("<Q", data, pos, 80)
    with pytest.raises(MalformedStreamError) as exc:
        load_params(bytes(data))
    assert exc.value.offset == pos


def test_bad_magic():
    data = save_params(init_params([3, 1], 1))
    with pytest.raises(MalformedStreamError, match="magic"):
        load_params(b"X" + data[1:])

# %% [markdown]
# # The tape, and checking it against finite differences

# %%
import numpy as np

from neural_waveform import autodiff as ad
from neural_waveform.fourier import cosine_coefficient
from neural_waveform.model import init_params, one_hot
from neural_waveform.sampler import build_grid, sample_waveform

tape = ad.Tape()
w = tape.leaf([[0.3, -1.2]])
x = tape.constant([[2.0], [0.5]])
loss = ad.mean(ad.square(ad.tanh(w @ x)))
print(loss.item(), tape.backward(loss)[w])

# %% [markdown]
# Gradient of one Fourier coefficient with respect to the first-layer
# weights of a small waveform network, against a central difference.

# %%
params = init_params([18, 16, 1], 0)
grid = build_grid(64)


def a3(p):
    tape = ad.Tape()
    taped = p.bind(tape)
    a = cosine_coefficient(sample_waveform(taped, one_hot(2), grid), 3)
    return tape, taped, a


tape, taped, a = a3(params)
g = tape.backward(a)[taped.layers[0][0]]

h = 1e-5
i, j = 16, 4  # the sin t input feeding hidden unit 4
plus, minus = init_params([18, 16, 1], 0), init_params([18, 16, 1], 0)
plus.weights[0][i, j] += h
minus.weights[0][i, j] -= h
fd = (a3(plus)[2].item() - a3(minus)[2].item()) / (2 * h)
print(f"tape {g[i, j]:.10e}   finite difference {fd:.10e}")

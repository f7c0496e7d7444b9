# %% [markdown]
# # Reading Fourier coefficients off a sampled waveform
#
# A waveform is sampled on a uniform grid over [-pi, pi). Its cosine and sine
# coefficients are weighted sums with weight 2/N per sample. For integer
# frequencies below N/2 the sums are exact for band-limited signals.

# %%
import numpy as np

from neural_waveform.errors import AliasingError
from neural_waveform.fourier import coefficients
from neural_waveform.sampler import build_grid, waveform_from_values

grid = build_grid(256)
print(grid.n, grid.size, grid.delta_t, grid.times[:3])

# %% [markdown]
# Build a signal with known amplitudes and recover them.

# %%
t = grid.times
signal = 0.25 + 0.7 * np.cos(3 * t) - 0.4 * np.sin(5 * t) + 0.1 * np.cos(15 * t)
c = coefficients(waveform_from_values(signal, grid), range(16))
for w in (0, 3, 5, 15):
    print(f"omega={w:2d}  a={c.a[w]: .15f}  b={c.b[w]: .15f}")

# %% [markdown]
# `a_0` comes out as twice the mean (0.5 here): omega = 0 uses the same
# formula as every other frequency.
#
# The sums also work at frequencies far above anything in the signal, up to
# the Nyquist limit. Past it, the grid cannot tell frequencies apart.

# %%
print(coefficients(waveform_from_values(signal, grid), [40, 100, 127]).a)
try:
    coefficients(waveform_from_values(signal, grid), [128])
except AliasingError as e:
    print("rejected:", e)

# %% [markdown]
# ## Open grid vs. closed grid
#
# Sampling `t_0 .. t_N` (including +pi) counts the point -pi = +pi twice.
# The error this adds to `a_w` is exactly `(2/N) s(pi) cos(w pi)`.

# %%
closed = build_grid(256, "paper")
closed_signal = 0.25 + 0.7 * np.cos(3 * closed.times) - 0.4 * np.sin(5 * closed.times) + 0.1 * np.cos(15 * closed.times)
cc = coefficients(waveform_from_values(closed_signal, closed), range(16))
s_pi = closed_signal[-1]
for w in (0, 3, 15):
    print(f"omega={w:2d}  error={cc.a[w] - c.a[w]: .3e}  predicted={2 / 256 * s_pi * np.cos(w * np.pi): .3e}")

# %% [markdown]
# # The toy identity task
#
# Sixteen one-hot inputs; the cosine coefficient `a[x, omega]` should be 1
# when `x == omega` and 0 otherwise, for omega = 0..15. Set `STEPS` in the
# environment to shorten the run (the default 5000 takes a few minutes).

# %%
import os
from dataclasses import replace
from pathlib import Path

import numpy as np

from neural_waveform import svg
from neural_waveform.fourier import coefficients
from neural_waveform.model import one_hot
from neural_waveform.sampler import sample_waveform
from neural_waveform.trainer import TrainConfig, train

config = replace(TrainConfig(), steps=int(os.environ.get("STEPS", 5000)))
report = train(config, log_every=500)
print(f"final MSE {report.final_loss:.3e}, max |A - I| {report.max_identity_error:.3e}, {report.wall_time:.0f}s")

# %%
np.set_printoptions(precision=2, suppress=True, linewidth=140)
print(report.a)

# %% [markdown]
# ## Frequencies never seen in training
#
# The same network answers at any integer frequency below N/2 = 128.

# %%
grid = config.grid()
wf = sample_waveform(report.params, one_hot(7), grid)
c = coefficients(wf, [7, 16, 40, 100])
print({w: round(c.a[w], 4) for w in c.a})

# %% [markdown]
# ## Figures

# %%
out = Path(os.environ.get("OUT", "toy_figures"))
out.mkdir(exist_ok=True)
series = [(f"x = {x}", grid.times, sample_waveform(report.params, one_hot(x), grid).array()) for x in range(5)]
(out / "waveforms_0_4.svg").write_text(svg.line_chart(series, "Waveforms, x in [0, 4]", "t", "s_x(t)"))
(out / "coefficients.svg").write_text(svg.heat_map(report.a, "a[x, omega]", "x", "omega"))
(out / "loss.svg").write_text(svg.line_chart([("MSE", range(1, config.steps + 1), report.losses)],
                                             "Training loss", "step", "loss", log_y=True))
print(sorted(p.name for p in out.iterdir()))

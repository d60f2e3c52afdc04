"""
Dynamic optical flow
====================

Optical flow has two channels (x and y displacement). It is stored as bytes
after clipping to +-20 pixels; pooling runs on the decoded values.
"""

from pathlib import Path

import numpy as np

from dynimage import arp
from dynimage.imageio import (flow_decode, flow_encode, load_sequence,
                              write_tensor)

out = Path("out")
out.mkdir(exist_ok=True)

# %%
# A flow field that accelerates to the right over 12 frames.
T, H, W = 12, 8, 8
flow = np.zeros((T, 2, H, W))
flow[:, 0] = np.linspace(0, 30, T)[:, None, None]  # beyond the clip at the end

# %%
# Quantize, store and reload.
encoded = flow_encode(flow)
write_tensor(encoded, out / "flow.dynt")
seq = load_sequence(out / "flow.dynt", "flow")
print("bytes at t=0 and t=T-1:", encoded[0, 0, 0, 0], encoded[-1, 0, 0, 0])
print("decoded x-flow at t=T-1:", seq.data[-1, 0, 0, 0], "(clipped)")
print("zero flow decodes to", flow_decode(flow_encode(np.zeros((2, 1, 1))))[0, 0, 0])

# %%
# The dynamic flow image keeps both channels; the x channel is positive
# because horizontal motion grows over time.
dof = arp(seq)
print("dynamic flow shape", dof.shape, "| x mean", dof.tensor[0].mean().round(3),
      "| y mean", dof.tensor[1].mean())

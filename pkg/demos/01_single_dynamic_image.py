"""
Summarizing a clip in one image
===============================

A square slides across a dark frame. We summarize the clip four ways and
write each summary to a PNG in ``out/``.

Mean and max images do not depend on frame order. The dynamic image does:
the square's start and end positions get opposite signs.
"""

from pathlib import Path

import numpy as np

from dynimage import arp, di_export, di_preprocess, max_pool, mean_pool, mhi
from dynimage.imageio import write_image

out = Path("out")
out.mkdir(exist_ok=True)

# %%
# Twenty 3x32x32 frames; pixel values already in [0, 1].
T, size, side = 20, 32, 6
frames = np.full((T, 3, size, size), 0.1)
for t in range(T):
    r = c = t
    frames[t, :, r:r + side, c:c + side] = 0.9

# %%
# Square-rooting the pixels first is the usual preprocessing.
seq = di_preprocess(frames)
summaries = {
    "mean": mean_pool(seq),
    "max": max_pool(seq),
    "mhi": mhi(frames),
    "dynamic": arp(seq),
}
for name, image in summaries.items():
    path = write_image(di_export(image), out / f"square_{name}.png")
    print(f"{name:8s} -> {path}  range [{image.tensor.min():+.3f}, {image.tensor.max():+.3f}]")

# %%
# The dynamic image is negative where the square was early and positive
# where it ended up.
di = summaries["dynamic"].tensor[0]
print("start corner:", round(di[2, 2], 3), " end corner:", round(di[T + 2, T + 2], 3))

# %%
# Playing the clip backwards leaves the mean image untouched but changes
# the dynamic image.
rev = seq.reversed()
print("mean unchanged under reversal:",
      np.array_equal(mean_pool(rev).tensor, summaries["mean"].tensor))
print("dynamic image change (L2):",
      round(float(np.linalg.norm(arp(rev).tensor - summaries["dynamic"].tensor)), 3))

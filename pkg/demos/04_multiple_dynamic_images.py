"""
Multiple dynamic images per clip
================================

Long clips are split into overlapping windows and each window is pooled
separately. The per-window images can be kept, or merged again with a
second temporal pooler.
"""

import numpy as np

from dynimage import WindowSpec, mdi
from dynimage.segmentation import window_ranges

rng = np.random.default_rng(2)
clip = np.cumsum(rng.standard_normal((40, 3, 16, 16)) * 0.05, axis=0)

# %%
# Window 10 with stride 6 is the default.
spec = WindowSpec(10, 6, merge="none")
print("windows:", window_ranges(len(clip), spec))
images = mdi(clip, spec, "arp_avg")
print(len(images), "dynamic images of shape", images[0].shape)

# %%
# Merging: max is indifferent to window order, ARP is not.
for merge in ("max", "mean", "arp_avg"):
    merged = mdi(clip, WindowSpec(10, 6, merge), "arp_avg")
    print(f"merge={merge:8s} frames {merged.source_range}  "
          f"norm {np.linalg.norm(merged.tensor):.3f}")

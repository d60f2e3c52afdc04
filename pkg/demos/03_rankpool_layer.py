"""
RankPool as a network layer
===========================

The approximation is linear in its inputs with weights fixed by the clip
length, so its backward pass is simply each frame's weight times the
upstream gradient. We check that against finite differences.
"""

import numpy as np

from dynimage import MeanPoolLayer, RankPoolLayer, gradcheck

# %%
# Forward pools feature maps over time; backward fans the gradient out.
layer = RankPoolLayer("avg")
feats = np.random.default_rng(1).standard_normal((5, 4, 6, 6))
pooled = layer.forward(feats)
grads = layer.backward(np.ones_like(pooled), T=5)
print("pooled shape", pooled.shape, "| per-frame grad values", grads[:, 0, 0, 0])

# %%
# Finite-difference check across a few lengths and both variants.
for variant in ("avg", "direct"):
    for T in (1, 4, 12):
        rep = gradcheck((4, 8, 8), T, epsilon=1e-5, layer=RankPoolLayer(variant))
        print(f"{variant:6s} T={T:2d}  max rel error {rep.max_rel_error:.1e}  "
              f"{'pass' if rep.passed else 'FAIL'}")

# %%
# The same harness on mean pooling, as a control.
rep = gradcheck((3, 4, 4), 6, layer=MeanPoolLayer())
print("mean pooling control:", "pass" if rep.passed else "FAIL", rep.analytic.flat[0])

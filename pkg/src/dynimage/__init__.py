"""Dynamic images: order-sensitive temporal pooling of video frames."""

from .coefficients import CoefficientVector, alpha_coeffs, beta_coeffs, harmonic
from .layer import MeanPoolLayer, RankPoolLayer, gradcheck
from .metrics import bench, fuse_scores, ranking_accuracy
from .pooling import (PoolingMethod, arp, di_export, di_preprocess, max_pool,
                      mean_pool, mei, mhi, pool)
from .ranksolver import (RankModel, SolverConfig, rank_objective,
                         rank_pool_exact, score)
from .segmentation import WindowSpec, mdi, windows
from .tensor import (DimensionError, DynamicImage, FrameSequence,
                     NumericalError, running_means, weighted_sum)

__version__ = "0.1.0"

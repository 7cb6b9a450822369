# %% [markdown]
# # Seeded samplers
#
# Every draw comes from an RngStream keyed by (seed, stream_id).  `size=`
# adds leading batch axes, so a million matrices take one call.

# %%
import numpy as np

from betavol.betalinalg import abs_det_beta, gram, trace_gram
from betavol.samplers import RngStream, ball_points, gaussian_matrix, haar_stiefel, sphere_points

rng = RngStream(seed=42)
m = gaussian_matrix(2, 3, 2, rng, size=200_000)
print("component variance:", m.components().var())          # 1/2
print("mean Tr M^dagger M:", trace_gram(m).mean(), "(expect beta n N / 2 = 6)")

# %%
# ball radius: ||x||^(beta N) should be uniform on [0, 1]
pts = ball_points(4, 2, 1, RngStream(1), size=100_000)
u = pts.column_norms()[:, 0] ** 8
print("deciles of ||x||^8:", np.quantile(u, np.linspace(0.1, 0.9, 9)).round(3))

sph = sphere_points(2, 3, 2, RngStream(2), size=5)
print("sphere norms:", sph.column_norms().ravel())

# %%
# Haar frames: first entry has E|u_11|^2 = 1/n
frames = haar_stiefel(1, 4, 2, RngStream(3), size=100_000)
print("E u11^2 =", (frames.data[:, 0, 0] ** 2).mean(), "vs 1/4")
print("orthonormal:", np.allclose(gram(frames).matrix.data, np.eye(2)))

# %%
# same key, same numbers; different stream id, different numbers
a = abs_det_beta(gaussian_matrix(1, 2, 2, RngStream(7, 0), size=3))
b = abs_det_beta(gaussian_matrix(1, 2, 2, RngStream(7, 0), size=3))
c = abs_det_beta(gaussian_matrix(1, 2, 2, RngStream(7, 1), size=3))
print(a, b, c)

# %% [markdown]
# # Lyapunov sum of a Gaussian matrix product
#
# log|det(M_t ... M_1)| / t tends to E log|det M|.  The chain keeps an
# orthonormal frame and adds the logs of the QR diagonals, so the product
# itself never overflows.

# %%
import numpy as np

from betavol.closedform import gauss_mean_log_abs_det
from betavol.mcverify import lyapunov_qr_estimate
from betavol.samplers import RngStream, product_chain

# one stream per case, otherwise the four estimates share their noise
for k, (beta, N) in enumerate(((1, 1), (1, 2), (2, 1), (4, 2))):
    est = lyapunov_qr_estimate(beta, N, 2000, 20, RngStream(5, k))
    print(f"beta={beta} N={N}: {est.mean:.4f} +- {est.stderr:.4f}   digamma sum {gauss_mean_log_abs_det(beta, N):.4f}")

# %%
# running average along one chain
rng = RngStream(6)
steps = [product_chain(1, 2, t, rng.child(t)) / t for t in (10, 100, 1000, 5000)]
print(np.round(steps, 4))

# %% [markdown]
# # Closed forms
#
# Volumes of spheres, Stiefel manifolds and Grassmannians, then moments of
# random determinants.  Everything is computed in log-Gamma space.

# %%
from math import pi, sqrt

import betavol.closedform as cf

print("sigma_4 =", cf.sphere_area(4), "=", 2 * pi**2)
print("vol O(3) frames =", cf.stiefel_volume(1, 3, 3), "=", 16 * pi**2)
print("vol RP^2 =", cf.grassmann_volume(1, 3, 1))
print("vol of 3-frames in H^40:", cf.log_stiefel_volume(4, 40, 3), "(log)")

# %% [markdown]
# Linear moments E|det M|^q.  q need not be an integer.

# %%
for dist in ("ball", "sphere", "gauss"):
    row = [cf.linear_moment(dist, 1, 2, q) for q in (0.7, 1.0, 2.0)]
    print(f"{dist:6s}", " ".join(f"{v:.6f}" for v in row))
print("ball, beta=1, N=2, q=1:", cf.linear_moment("ball", 1, 2, 1), "=", 8 / (9 * pi))

# %% [markdown]
# Affine moments: |det| of the difference vectors of N+1 random points,
# i.e. N! times a simplex volume.

# %%
print("triangle in the disk :", cf.affine_moment("ball", 1, 2, 1), "=", 35 / (24 * pi))
print("triangle on the circle:", cf.affine_moment("sphere", 1, 2, 1), "=", 3 / pi)
print("Gaussian triangle / 2 :", cf.efron_value(1, 2), "=", sqrt(3) / 4)
print("Kingman, quaternion N=2:", cf.kingman_q_beta(4, 2))

# %% [markdown]
# The sphere affine moment uses the Euler-beta argument beta N (n+1)/2 - N.
# The alternative "+1" form is kept behind a flag so the two can be compared.
# Take two points drawn uniformly from {-1, 1}.  Then |x - y|^2 is 0 or 4,
# each half the time, so the mean is 2.

# %%
print("corrected:", cf.affine_moment("sphere", 1, 1, 2))
print("printed  :", cf.affine_moment("sphere", 1, 1, 2, printed_form=True))

# %%
print("E V_1 of a Gaussian parallelogram:", cf.intrinsic_volume_mean(2, 1), pi**1.5 / 4)
print("E log|det| (Gauss, 2x2 real):", cf.mean_log_abs_det("gauss", 1, 2))

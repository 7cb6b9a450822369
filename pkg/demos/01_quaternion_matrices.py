# %% [markdown]
# # Matrices over R, C and H
#
# One FMatrix type covers all three fields.  Quaternion entries are stored
# as complex pairs (z, w), standing for the 2x2 block [[z, w], [-conj(w), conj(z)]].

# %%
import numpy as np

from betavol.betalinalg import (
    FMatrix, abs_det_beta, gram, gram_schmidt_qr, polar_decompose, singular_values_beta, trace_gram,
)
from betavol.numfield import QuatScalar, embed_block, quat_mul

i, j = QuatScalar(1j, 0), QuatScalar(0, 1)
print("i*j =", quat_mul(i, j))          # k, stored as (0, i)
print("j*i =", quat_mul(j, i))          # -k
print(embed_block(quat_mul(i, j)))

# %% [markdown]
# A random 3x2 quaternion matrix.  Its complexification is 6x4, and every
# singular value shows up twice there.  `singular_values_beta` keeps one of each pair.

# %%
g = np.random.default_rng(0)
m = FMatrix.from_components(4, g.standard_normal((3, 2, 4)))
print("complexified shape:", m.complexify().shape)
print("raw singular values:", np.linalg.svd(m.complexify(), compute_uv=False).round(6))
print("collapsed:", singular_values_beta(m).round(6))

# half-trace convention: Tr m^dagger m counts each pair once
print("trace_gram:", trace_gram(m), " half complex trace:", np.trace(gram(m).matrix.complexify()).real / 2)

# %% [markdown]
# Gram-Schmidt runs in quaternion arithmetic, so Q keeps its block structure
# and T has a positive real diagonal.

# %%
qr = gram_schmidt_qr(m)
print("T diagonal:", np.diagonal(qr.t_factor.data[..., 0]))
print("|Q T - m| =", np.abs((qr.q_factor @ qr.t_factor - m).complexify()).max())

pol = polar_decompose(m)
print("|U H - m| =", np.abs((pol.stiefel @ pol.psd_part.matrix - m).complexify()).max())

# %%
sq = FMatrix.from_components(4, g.standard_normal((3, 3, 4)))
print("|det|:", abs_det_beta(sq), " product of singular values:", np.prod(singular_values_beta(sq)))

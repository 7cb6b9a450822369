# %% [markdown]
# # Monte Carlo against the closed forms
#
# `verify_moment` draws samples, computes the z-score against the closed
# form, and passes when |z| <= 4.

# %%
from betavol.mcverify import summary, run_suite, SuiteConfig, verify_moment, verify_bp_linear
from betavol.query import MomentQuery
from betavol.samplers import RngStream

q = MomentQuery.square("ball", 1, 2, 1, affine=True)
rep = verify_moment(q, 500_000, RngStream(1))
print(rep.status, rep.closed_form, rep.estimate.mean, "+-", rep.estimate.stderr, "z =", round(rep.z, 2))

# %%
# the printed sphere form sits hundreds of standard errors away
q = MomentQuery.square("sphere", 1, 1, 2, affine=True)
for printed in (False, True):
    rep = verify_moment(q, 200_000, RngStream(2), printed_36prime=printed)
    print("printed" if printed else "corrected", rep.status, round(rep.z, 1))

# %%
# same for the affine ratio over the disk (n=2, N=1, h=2)
q = MomentQuery.rect("ball", 1, 2, 1, 2, affine=True)
for plain in (False, True):
    rep = verify_moment(q, 200_000, RngStream(3), printed_cor310=plain)
    print("plain" if plain else "corrected", rep.closed_form, rep.status, round(rep.z, 1))

# %%
rep = verify_bp_linear(2, 3, 1, 0.5, 200_000, RngStream(4))
print("BP decomposition:", rep.status, round(rep.z, 2))

# %%
# a small grid; the full default grid is `betavol suite`
cfg = SuiteConfig(samples=20_000, betas=(1, 4), Ns=(1, 2), qs=(1.3,), linear_pairs=((3, 2),),
                  affine_pairs=((3, 1),), lyapunov=())
reports = run_suite(cfg)
print(summary(reports))

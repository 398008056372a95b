# %% [markdown]
# # Sampled class membership
#
# A nonnegative `f` is MT-convex when
# `f(t x + (1-t) y) <= lam(t) f(x) + mu(t) f(y)` for all `x, y` and
# `t` in the open unit interval, with `lam = sqrt(t)/(2 sqrt(1-t))` and
# `mu = sqrt(1-t)/(2 sqrt(t))`.

# %%
import numpy as np

from mtconvex import FunctionSpec, SamplePlan, check_midpoint_convexity, check_mt_membership, mt_coefficients

# %% [markdown]
# The coefficients always multiply to 1/4, and their sum is at least 1 with
# the minimum at `t = 1/2`.

# %%
for t in (0.1, 0.5, 0.8):
    c = mt_coefficients(t)
    print(f"t={t}: lam={c.lam:.4f} mu={c.mu:.4f} product={c.lam * c.mu:.4f} sum={c.total:.4f}")

# %% [markdown]
# Since `lam >= t` and `mu >= 1 - t`, every nonnegative convex function
# passes. The square root is concave and fails.

# %%
plan = SamplePlan(grid_points=64, random_samples=4096, seed=0)
for src in ("x^2", "exp(x)", "sqrt(x)"):
    verdict = check_mt_membership(FunctionSpec.from_text(src, 0, 1), plan)
    print(f"{src:8s} {verdict.status:18s} witness={verdict.witness}")

# %% [markdown]
# At `t = 1/2` both coefficients equal 1/2, so the MT inequality contains
# midpoint convexity. A small concave bump fails both checks, and the MT
# witness sits at `t` near 1/2.

# %%
bump = FunctionSpec.from_text("1 + 0.1*sin(3*x)", 0, 1)
print("midpoint:", check_midpoint_convexity(bump, plan).witness)
print("MT:      ", check_mt_membership(bump, plan).witness)

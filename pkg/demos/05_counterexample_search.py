# %% [markdown]
# # Counterexample search
#
# A coarse grid plus seeded random pass finds the largest violation of a
# pointwise predicate. Coordinate-wise golden-section ascent then refines it.

# %%
import math

from mtconvex import FunctionSpec
from mtconvex.falsify import SearchBudget, falsify_pointwise, pointwise_violation

# %% [markdown]
# For `sqrt` on `[0, 1]` the pair `(0, 1)` gives a violation of
# `sqrt(1-t) (1 - 1/(2 sqrt t))`. At `t = 1/2` this is about 0.2071, but the
# maximum sits at `t = 2^(-2/3)` with value `(1 - t)^(3/2)`, about 0.2251.

# %%
f = FunctionSpec.from_text("sqrt(x)", 0, 1)
print("at t=1/2:", pointwise_violation("mt", f, None, 0.0, 1.0, 0.5))
w = falsify_pointwise("mt", f, SearchBudget(coarse_evals=1000, seed=0))
print("search:  ", w)
t_star = 2 ** (-2 / 3)
print("closed form:", t_star, (1 - t_star) ** 1.5)

# %% [markdown]
# Refinement only matters when the grid misses the optimum. With no
# refinement the witness is the best coarse point.

# %%
print(falsify_pointwise("mt", f, SearchBudget(1000, refine_iters=0)))

# %% [markdown]
# Nonnegative convex functions give no witness, and convexity of `sin` on
# `[0, pi]` fails by about 1 at the midpoint.

# %%
print(falsify_pointwise("mt", FunctionSpec.from_text("x^2", 0, 1), SearchBudget(10_000)))
print(falsify_pointwise("convex", FunctionSpec.from_text("sin(x)", 0, math.pi), SearchBudget(1000)))

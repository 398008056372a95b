# %% [markdown]
# # Margins of the Hadamard-type bounds
#
# Each verifier returns both sides of an inequality, the margin
# `rhs - lhs`, quadrature error estimates and a status.

# %%
from mtconvex import FunctionSpec, SamplePlan
from mtconvex.cli import emit_report
from mtconvex.theorems import (
    verify_classical_hh, verify_hadamard_left, verify_midpoint_pi, verify_product_mu,
    verify_so_product, verify_tau_bound,
)

S = FunctionSpec.from_text

# %% [markdown]
# Single-function bounds for a few MT-convex functions.

# %%
reports = []
for src in ("1", "x^2", "exp(x)"):
    f = S(src, 0, 1)
    reports += [verify_hadamard_left(f), verify_tau_bound(f), verify_midpoint_pi(f)]
print(emit_report(reports))

# %% [markdown]
# Product bounds. The similarly-ordered bound `M/8` is tighter than
# `M/12 + N/24` exactly when `M >= N`.

# %%
x, x2 = S("x", 0, 1), S("x^2", 0, 1)
print(emit_report([verify_product_mu(x, x2), verify_so_product(x, x2, SamplePlan(17, 256))]))

# %% [markdown]
# The classical two-sided inequality for a convex function, for comparison.

# %%
print(emit_report(list(verify_classical_hh(S("exp(x)", 0, 1)))))

# %% [markdown]
# Outside the class the verifiers still run, and a sampling plan attaches a
# warning. For the square root the `pi/2` bound needs `f(1/2) <= 2/pi`,
# about 0.637, while `sqrt(1/2)` is about 0.707.

# %%
r = verify_midpoint_pi(S("sqrt(x)", 0, 1), plan=SamplePlan(17, 256))
print(r.status, r.margin, r.warnings)

# %% [markdown]
# # Quadrature with endpoint-singular weights
#
# The weight `tau(x) = sqrt((b-x)(x-a))/(b-a)` has square-root behaviour at
# both ends. The substitution `x = m + h cos(theta)` turns it into a smooth
# integrand, so plain Gauss-Kronrod converges fast.

# %%
import math

from mtconvex import FunctionSpec, Weight, integrate, integrate_weighted, tau_substitution_check

# %% [markdown]
# Three moments with closed forms.

# %%
one = FunctionSpec.from_text("1", 0, 1)
checks = [
    ("int sqrt(t(1-t))", integrate_weighted(one, Weight.SQRT_T_ONE_MINUS_T), math.pi / 8),
    ("int t(1-t)", integrate_weighted(one, Weight.MU), 1 / 6),
    ("int t^2", integrate(FunctionSpec.from_text("x^2", 0, 1)), 1 / 3),
]
for name, res, exact in checks:
    print(f"{name:18s} {res.value:.16f}  error {abs(res.value - exact):.1e}  evals {res.evaluations}")

# %% [markdown]
# The `tau`-weighted integral over `[a, b]` equals the `t`-integral of
# `sqrt(t(1-t)) f(t a + (1-t) b)` times `b - a`. The check computes both
# sides independently and returns their difference.

# %%
for src in ("1", "x", "x^2", "exp(x)"):
    for a, b in ((0, 1), (3, 5)):
        diff = tau_substitution_check(FunctionSpec.from_text(src, a, b))
        print(f"{src:7s} on [{a},{b}]: {diff:.1e}")

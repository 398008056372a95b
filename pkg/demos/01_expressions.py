# %% [markdown]
# # Function expressions
#
# Functions are written as text in a small language over the single
# variable `x`. This notebook parses a few, evaluates them, and shows how
# undefined values are reported.

# %%
import numpy as np

from mtconvex import FunctionSpec, ParseError, evaluate, parse, to_text

# %% [markdown]
# Parsing builds a tree. Unary minus binds looser than `^`, so `-x^2` is the
# negated square, and printing adds only the parentheses that are needed.

# %%
tree = parse("-x^2 + sqrt(x*(1-x))")
print(tree)
print(to_text(tree))

# %% [markdown]
# Evaluation outside the natural domain gives NaN rather than an exception.

# %%
for x in (0.25, 1.5, -1.0):
    print(x, evaluate(parse("sqrt(x*(1-x))"), x))

# %% [markdown]
# Syntax errors carry the byte offset where parsing stopped.

# %%
try:
    parse("x +")
except ParseError as exc:
    print(exc.offset, sorted(exc.expected))

# %% [markdown]
# A `FunctionSpec` pairs an expression with an interval. It has a scalar
# call and a vectorised `values` method used by sampling and quadrature.

# %%
f = FunctionSpec.from_text("exp(x) - 1", 0, 2)
print(f(1.0))
print(f.values(np.linspace(0, 2, 5)))

# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # Spread activation
#
# Energy leaves a seed frame and loses a constant factor per hop. On the
# five-frame graph G5 (B and C inherit from A, D is a perspective on B,
# E inherits from C) every value is a power of the decay.

# %%
from importlib import resources

import numpy as np

from framesim import SpreadParams, build_relatedness_table, load_frame_database, spread

g5 = load_frame_database(resources.files("framesim") / "data" / "g5.jsonl")
params = SpreadParams(decay=0.5, max_depth=3, threshold=0.0)
print(spread(g5, {"B": 1.0}, params).entries)

# %% [markdown]
# Direction matters once traversal is restricted.

# %%
for mode in ("undirected", "parents_only", "children_only"):
    p = SpreadParams(0.5, 3, 0.0, traversal=mode)
    print(f"{mode:14}", spread(g5, {"D": 1.0}, p).entries)

# %% [markdown]
# The relatedness table holds one spread row per frame. As a matrix it is
# symmetric for undirected traversal with uniform weights.

# %%
table = build_relatedness_table(g5, params)
ids = list(g5.frame_ids)
m = np.array([[table.relatedness(a, b) for b in ids] for a in ids])
print(ids)
print(m)
print("symmetric:", np.array_equal(m, m.T))

# %% [markdown]
# A lower relation weight makes a path cost more than its hop count.

# %%
weighted = SpreadParams(0.5, 3, 0.0, relation_weights={"perspective_on": 0.2})
print(spread(g5, {"B": 1.0}, weighted).entries)

# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # Comparing annotation setups
#
# Every image in the toy corpus has an English caption (ENO), its
# Portuguese translation (PTT), an independent Portuguese caption (PTO) and
# two sets of image labels: made with the caption visible (VWC) and
# without it (VWoC). Each pair of annotations becomes two associative
# arrays and is scored by cosine.

# %%
from importlib import resources
from statistics import fmean, stdev

from framesim import (SpreadParams, build_relatedness_table, descriptive_stats, histogram, load_corpus,
                      load_frame_database, pairwise_similarities)

data = resources.files("framesim") / "data"
graph = load_frame_database(data / "toy_frames.jsonl")
corpus = load_corpus(data / "toy_corpus.jsonl", graph)
params = SpreadParams()
table = build_relatedness_table(graph, params)

# %%
for setup in ("ENO", "PTT", "PTO"):
    s = descriptive_stats(corpus, setup, graph, params, table)
    print(f"{setup}: frames {s.avg_frames:.2f}±{s.stdev_frames:.2f}  lemmas {s.avg_lemmas:.2f}  "
          f"ratio {s.avg_ratio:.2f}±{s.stdev_ratio:.2f}")

# %%
samples = {}
for a, b in [("ENO", "PTT"), ("ENO", "PTO"), ("PTT", "PTO"), ("ENO", "VWC"), ("ENO", "VWoC")]:
    samples[a, b] = pairwise_similarities(corpus, a, b, graph, table, params)
    v = samples[a, b].values
    print(f"{a}x{b}: n={len(v)} mean={fmean(v):.3f} stdev={stdev(v):.3f}")

# %% [markdown]
# The VWC labels were written from the captions, so ENO against VWC is
# perfect on every image. VWoC labels are generic and land lower.

# %%
for (lo, hi), count in histogram(samples["ENO", "VWoC"].values, 5):
    print(f"[{lo:.1f}, {hi:.1f})", "#" * count)

# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # The frame graph
#
# Load the bundled toy frame database, look a few lemmas up and walk the
# relations around one frame.

# %%
from importlib import resources

from framesim import load_frame_database, lookup_lemma, related, validate

db = resources.files("framesim") / "data" / "toy_frames.jsonl"
graph = load_frame_database(db)
print(len(graph), "frames,", len(graph.lexical_units), "lexical units,", len(graph.relations), "relations")
print("languages:", graph.languages)

# %% [markdown]
# Lemmas are stored case-folded, and multiword units are ordinary lemmas
# with spaces in them.

# %%
for lemma, lang in [("Thief", "en"), ("street performer", "en"), ("perna de pau", "pt")]:
    hits = sorted((lu.label, f.name) for lu, f in lookup_lemma(graph, lemma, lang))
    print(f"{lemma!r:20} {lang}: {hits}")

# %%
theft = graph.frame_by_name("Theft")
for nbr, rtype, role in related(graph, theft.id):
    print(f"{graph.frame(nbr).name:24} {rtype:16} {role}")

# %% [markdown]
# The shipped database is acyclic, so validation returns nothing.

# %%
print(validate(graph))

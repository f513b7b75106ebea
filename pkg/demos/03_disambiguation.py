# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # From caption to frames
#
# Captions are lemmatized against the frame lexicon (longest multiword
# match first), each lemma gets its candidate frames, and ambiguous lemmas
# pick the candidate best supported by the rest of the sentence.

# %%
from importlib import resources

from framesim import SpreadParams, build_relatedness_table, lemmatize, load_frame_database, parse

graph = load_frame_database(resources.files("framesim") / "data" / "toy_frames.jsonl")
params = SpreadParams()
table = build_relatedness_table(graph, params)

caption = "A street performer on stilts discovers the thief with the suitcase."
print([t.lemma for t in lemmatize(caption, "en", graph)])

# %%
res = parse(caption, "en", graph, params, table=table)
for row in res.trace("demo", graph):
    cands = ", ".join(f"{name}={score:.3f}" for _, name, score in row["candidates"])
    print(f"{row['lemma']:18} -> {graph.frame(row['chosen']).name:22} [{cands}]")

# %%
print("lemmas:", res.lemma_count, "frame-evoking:", res.frame_count, "ratio:", round(res.ratio, 3))
print(sorted(graph.frame(f).name for f in res.annotation.evoked))

# %% [markdown]
# The Portuguese translation goes through the same path with the `pt`
# lexicon.

# %%
pt = parse("Um artista de rua em pernas de pau descobre o ladrão com a mala.", "pt", graph, params, table=table)
print(sorted(graph.frame(f).name for f in pt.annotation.evoked))

"""Spread activation over the frame graph and per-frame relatedness tables.

Energy leaves each seed frame and loses a factor ``decay`` (times the weight
of the relation crossed) per hop. Contributions from several seeds or several
paths are combined with ``max``, so activations stay in ``[0, 1]`` and no
post-adjustment step is needed.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import RELATION_TYPES, FrameGraph, FrameId, _id_key, iter_records

TRAVERSALS = ("undirected", "parents_only", "children_only")


@dataclass(frozen=True)
class SpreadParams:
    decay: float = 0.5
    max_depth: int = 4
    threshold: float = 0.05
    relation_types: frozenset = RELATION_TYPES
    relation_weights: Mapping[str, float] = field(default_factory=dict)
    traversal: str = "undirected"

    def __post_init__(self):
        if not 0.0 < self.decay < 1.0:
            raise ValueError(f"decay must be in (0, 1), got {self.decay}")
        if isinstance(self.max_depth, bool) or not isinstance(self.max_depth, int) or self.max_depth < 0:
            raise ValueError(f"max_depth must be a non-negative integer, got {self.max_depth!r}")
        if not 0.0 <= self.threshold < 1.0:
            raise ValueError(f"threshold must be in [0, 1), got {self.threshold}")
        if self.traversal not in TRAVERSALS:
            raise ValueError(f"traversal must be one of {TRAVERSALS}, got {self.traversal!r}")
        types = frozenset(self.relation_types)
        unknown = types - RELATION_TYPES
        if unknown:
            raise ValueError(f"unknown relation types: {sorted(unknown)}")
        object.__setattr__(self, "relation_types", types)
        for rtype, w in self.relation_weights.items():
            if rtype not in RELATION_TYPES:
                raise ValueError(f"weight given for unknown relation type {rtype!r}")
            if not 0.0 < w <= 1.0:
                raise ValueError(f"relation weight for {rtype} must be in (0, 1], got {w}")
        object.__setattr__(self, "relation_weights", dict(self.relation_weights))

    def weight(self, relation_type: str) -> float:
        return self.relation_weights.get(relation_type, 1.0)


@dataclass(frozen=True)
class ActivationMap:
    entries: dict
    params: SpreadParams
    seeds: dict

    def get(self, frame_id: FrameId, default: float = 0.0) -> float:
        return self.entries.get(frame_id, default)


@dataclass(frozen=True)
class RelatednessTable:
    rows: dict
    params: SpreadParams

    def relatedness(self, source: FrameId, target: FrameId) -> float:
        return self.rows[source].entries.get(target, 0.0)


def pre_adjust(seed_energies: Mapping[FrameId, float]) -> dict:
    """Clamp seed energies into ``[0, 1]``; negative energies are rejected."""
    out = {}
    for frame_id, energy in seed_energies.items():
        if energy < 0:
            raise ValueError(f"negative seed energy {energy} for frame {frame_id!r}")
        out[frame_id] = min(float(energy), 1.0)
    return out


def spread(graph: FrameGraph, seeds: Mapping[FrameId, float], params: SpreadParams = SpreadParams()) -> ActivationMap:
    """Propagate energy from ``seeds`` through ``graph``.

    A frame reached from seed ``s`` over a walk of ``k <= max_depth`` edges
    receives ``energy(s) * prod(weights) * decay**k``; its activation is the
    maximum over seeds and walks. With uniform weights this is
    ``energy(s) * decay**dist(s, n)``. Non-seed entries below the threshold
    are dropped.
    """
    if not seeds:
        raise ValueError("seed set is empty")
    for frame_id in seeds:
        if frame_id not in graph:
            raise KeyError(f"unknown seed frame {frame_id!r}")
    energies = pre_adjust(seeds)
    adj = graph.adjacency(params.traversal, params.relation_types)
    decay_pow = [params.decay ** k for k in range(params.max_depth + 1)]

    best: dict[int, float] = {}
    for frame_id, energy in energies.items():
        h = graph.handle(frame_id)
        if energy > best.get(h, -1.0):
            best[h] = energy
        # frontier holds the best weight product over walks of exactly k edges
        frontier = {h: 1.0}
        for k in range(1, params.max_depth + 1):
            nxt: dict[int, float] = {}
            for node, wprod in frontier.items():
                for nbr, rtype in adj[node]:
                    p = wprod * params.weight(rtype)
                    if p > nxt.get(nbr, 0.0):
                        nxt[nbr] = p
            for node, wprod in nxt.items():
                value = energy * wprod * decay_pow[k]
                if value > best.get(node, -1.0):
                    best[node] = value
            frontier = nxt

    seed_handles = {graph.handle(f) for f in energies}
    entries = {}
    for h in sorted(best):
        value = best[h]
        if h in seed_handles or value >= params.threshold:
            entries[graph.frame_id_at(h)] = value
    return ActivationMap(entries, params, energies)


def build_relatedness_table(
    graph: FrameGraph,
    params: SpreadParams = SpreadParams(),
    frames: Iterable[FrameId] | None = None,
    workers: int = 1,
) -> RelatednessTable:
    """One spread row per frame, seeded with that frame alone at energy 1.0."""
    if frames is None:
        frame_ids = list(graph.frame_ids)
    else:
        frame_ids = list(dict.fromkeys(frames))
        for f in frame_ids:
            if f not in graph:
                raise KeyError(f"unknown frame {f!r}")
        frame_ids.sort(key=graph.handle)

    def row(f):
        return spread(graph, {f: 1.0}, params)

    if workers > 1 and len(frame_ids) > 1:
        with ThreadPoolExecutor(workers) as pool:
            maps = list(pool.map(row, frame_ids))
    else:
        maps = [row(f) for f in frame_ids]
    return RelatednessTable(dict(zip(frame_ids, maps)), params)


def dump_table(table: RelatednessTable) -> str:
    lines = []
    for frame_id in sorted(table.rows, key=_id_key):
        entries = table.rows[frame_id].entries
        rel = [[f, entries[f]] for f in sorted(entries, key=_id_key)]
        lines.append(json.dumps({"frame": frame_id, "related": rel}, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def load_table(source, params: SpreadParams = SpreadParams()) -> RelatednessTable:
    """Read a table written by :func:`dump_table`.

    The file does not record spread parameters; ``params`` is attached as-is.
    """
    rows = {}
    for lineno, rec in iter_records(source):
        try:
            frame_id = rec["frame"]
            entries = {f: float(v) for f, v in rec["related"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"line {lineno}: malformed table row ({exc})") from None
        if frame_id in rows:
            raise ValueError(f"line {lineno}: duplicate row for frame {frame_id!r}")
        rows[frame_id] = ActivationMap(entries, params, {frame_id: 1.0})
    return RelatednessTable(rows, params)

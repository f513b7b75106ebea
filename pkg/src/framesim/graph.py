"""Frame database: frames, frame elements, lexical units and frame relations.

The on-disk format is a line-delimited JSON record stream, one object per
line with a ``kind`` of ``frame``, ``lu`` or ``relation``. Frames may be
referenced before they are defined; references are resolved after the whole
stream has been read.
"""

from __future__ import annotations

import io
import json
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Union

import networkx as nx

FrameId = Union[int, str]

RELATION_TYPES = frozenset({
    "inheritance",
    "perspective_on",
    "using",
    "subframe",
    "precedes",
    "see_also",
    "inchoative_of",
    "causative_of",
})

DIRECTIONS = ("parents", "children", "both")


class FrameDatabaseError(ValueError):
    """Malformed or inconsistent frame database input."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DanglingReferenceError(FrameDatabaseError):
    pass


class DuplicateError(FrameDatabaseError):
    pass


class CycleError(FrameDatabaseError):
    pass


@dataclass(frozen=True)
class FrameElement:
    name: str
    coreness: str  # "core" | "non_core"

    def __post_init__(self):
        if self.coreness not in ("core", "non_core"):
            raise ValueError(f"coreness must be 'core' or 'non_core', got {self.coreness!r}")


@dataclass(frozen=True)
class Frame:
    id: FrameId
    name: str
    frame_elements: tuple[FrameElement, ...] = ()

    def __post_init__(self):
        names = [fe.name for fe in self.frame_elements]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate frame element names in frame {self.name!r}")


@dataclass(frozen=True)
class LexicalUnit:
    id: FrameId
    lemma: str
    pos: str
    frame_id: FrameId
    lang: str

    def __post_init__(self):
        if not self.lemma or not self.lemma.strip():
            raise ValueError("lexical unit lemma must be non-empty")
        object.__setattr__(self, "lemma", self.lemma.casefold())

    @property
    def label(self) -> str:
        return f"{self.lemma}.{self.pos}"


@dataclass(frozen=True)
class FrameRelation:
    relation_type: str
    parent_id: FrameId
    child_id: FrameId

    def __post_init__(self):
        if self.relation_type not in RELATION_TYPES:
            raise ValueError(f"unknown relation type {self.relation_type!r}")


@dataclass(frozen=True)
class Violation:
    kind: str  # "cycle" | "dangling" | "duplicate_relation" | "self_relation" | "duplicate_frame"
    detail: tuple

    def __str__(self) -> str:
        if self.kind == "cycle":
            return "cycle: " + " -> ".join(str(f) for f in self.detail + self.detail[:1])
        return f"{self.kind}: " + ", ".join(str(d) for d in self.detail)


def _id_key(frame_id: FrameId):
    # ints sort before strings so mixed-type ids have one canonical order
    return (0, frame_id, "") if isinstance(frame_id, int) else (1, 0, str(frame_id))


class FrameGraph:
    """Immutable, indexed view over a frame database.

    Construction never raises on referential problems; those are reported by
    :func:`validate`. Use :func:`load_frame_database` for checked loading.
    Frames are mapped to dense integer handles in ascending id order.
    """

    def __init__(
        self,
        frames: Iterable[Frame] = (),
        lexical_units: Iterable[LexicalUnit] = (),
        relations: Iterable[FrameRelation] = (),
    ):
        self.frames: tuple[Frame, ...] = tuple(sorted(frames, key=lambda f: _id_key(f.id)))
        self.lexical_units: tuple[LexicalUnit, ...] = tuple(lexical_units)
        self.relations: tuple[FrameRelation, ...] = tuple(relations)

        self._by_id: dict[FrameId, Frame] = {}
        self._by_name: dict[str, Frame] = {}
        self._handle: dict[FrameId, int] = {}
        for f in self.frames:
            if f.id not in self._by_id:
                self._handle[f.id] = len(self._handle)
            self._by_id.setdefault(f.id, f)
            self._by_name.setdefault(f.name, f)
        self._ids: tuple[FrameId, ...] = tuple(self._handle)

        self._lu_by_lemma_lang: dict[tuple[str, str], list[LexicalUnit]] = defaultdict(list)
        for lu in self.lexical_units:
            self._lu_by_lemma_lang[(lu.lemma, lu.lang)].append(lu)
        self.languages = frozenset(lu.lang for lu in self.lexical_units)

        # adjacency over known frames only; dangling relations stay in self.relations
        self._parents: dict[FrameId, list[FrameRelation]] = defaultdict(list)
        self._children: dict[FrameId, list[FrameRelation]] = defaultdict(list)
        for rel in self.relations:
            if rel.parent_id in self._by_id and rel.child_id in self._by_id:
                self._parents[rel.child_id].append(rel)
                self._children[rel.parent_id].append(rel)
        self._adjacency_cache: dict = {}

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, frame_id) -> bool:
        return frame_id in self._by_id

    def __repr__(self) -> str:
        return (f"FrameGraph({len(self.frames)} frames, {len(self.lexical_units)} LUs, "
                f"{len(self.relations)} relations)")

    @property
    def frame_ids(self) -> tuple[FrameId, ...]:
        """Frame ids in handle order."""
        return self._ids

    def frame(self, frame_id: FrameId) -> Frame:
        try:
            return self._by_id[frame_id]
        except KeyError:
            raise KeyError(f"unknown frame id {frame_id!r}") from None

    def frame_by_name(self, name: str) -> Frame:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown frame name {name!r}") from None

    def resolve(self, ref: FrameId) -> Frame:
        """Look a frame up by name first, then by id."""
        if isinstance(ref, str) and ref in self._by_name:
            return self._by_name[ref]
        if ref in self._by_id:
            return self._by_id[ref]
        raise KeyError(f"unknown frame {ref!r}")

    def handle(self, frame_id: FrameId) -> int:
        try:
            return self._handle[frame_id]
        except KeyError:
            raise KeyError(f"unknown frame id {frame_id!r}") from None

    def frame_id_at(self, handle: int) -> FrameId:
        return self._ids[handle]

    def lemma_inventory(self, lang: str) -> frozenset[str]:
        return frozenset(lemma for (lemma, lu_lang) in self._lu_by_lemma_lang if lu_lang == lang)

    def adjacency(self, traversal: str, relation_types: frozenset[str]) -> list[list[tuple[int, str]]]:
        """Per-handle neighbour lists ``(handle, relation_type)`` for propagation.

        ``traversal`` is ``undirected``, ``parents_only`` (child to parent) or
        ``children_only`` (parent to child). Cached per argument pair.
        """
        key = (traversal, frozenset(relation_types))
        cached = self._adjacency_cache.get(key)
        if cached is not None:
            return cached
        if traversal not in ("undirected", "parents_only", "children_only"):
            raise ValueError(f"unknown traversal {traversal!r}")
        adj: list[list[tuple[int, str]]] = [[] for _ in self._ids]
        for rel in self.relations:
            if rel.relation_type not in relation_types:
                continue
            if rel.parent_id not in self._handle or rel.child_id not in self._handle:
                continue
            p, c = self._handle[rel.parent_id], self._handle[rel.child_id]
            if traversal in ("undirected", "parents_only"):
                adj[c].append((p, rel.relation_type))
            if traversal in ("undirected", "children_only"):
                adj[p].append((c, rel.relation_type))
        for row in adj:
            row.sort()
        self._adjacency_cache[key] = adj
        return adj


def lookup_lemma(graph: FrameGraph, lemma: str, lang: str, pos: str | None = None) -> set[tuple[LexicalUnit, Frame]]:
    """All (lexical unit, frame) pairs whose lemma and language match."""
    if not lemma:
        raise ValueError("lemma must be non-empty")
    units = graph._lu_by_lemma_lang.get((lemma.casefold(), lang), ())
    return {(lu, graph._by_id[lu.frame_id]) for lu in units
            if (pos is None or lu.pos == pos) and lu.frame_id in graph._by_id}


def related(
    graph: FrameGraph,
    frame_id: FrameId,
    relation_filter: Iterable[str] | None = None,
    direction: str = "both",
) -> list[tuple[FrameId, str, str]]:
    """Neighbours of a frame as ``(frame_id, relation_type, "parent"|"child")``.

    Sorted by neighbour frame name, then relation type.
    """
    if frame_id not in graph:
        raise KeyError(f"unknown frame id {frame_id!r}")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    allowed = None if relation_filter is None else set(relation_filter)

    out = []
    if direction in ("parents", "both"):
        out += [(r.parent_id, r.relation_type, "parent") for r in graph._parents.get(frame_id, ())]
    if direction in ("children", "both"):
        out += [(r.child_id, r.relation_type, "child") for r in graph._children.get(frame_id, ())]
    if allowed is not None:
        out = [t for t in out if t[1] in allowed]
    out.sort(key=lambda t: (graph.frame(t[0]).name, t[1], t[2]))
    return out


def find_cycles(graph: FrameGraph) -> list[tuple[FrameId, ...]]:
    """Every elementary directed cycle, each rotated to start at its smallest id."""
    g = nx.DiGraph()
    g.add_nodes_from(range(len(graph)))
    for rel in graph.relations:
        if rel.parent_id in graph and rel.child_id in graph and rel.parent_id != rel.child_id:
            g.add_edge(graph.handle(rel.parent_id), graph.handle(rel.child_id))
    cycles = []
    for cyc in nx.simple_cycles(g):
        i = cyc.index(min(cyc))
        cyc = cyc[i:] + cyc[:i]
        cycles.append(tuple(graph.frame_id_at(h) for h in cyc))
    cycles.sort(key=lambda c: [graph.handle(f) for f in c])
    return cycles


def validate(graph: FrameGraph) -> list[Violation]:
    """Report every invariant violation. An empty list means the graph is valid."""
    report: list[Violation] = []

    seen_ids, seen_names = set(), set()
    for f in graph.frames:
        if f.id in seen_ids:
            report.append(Violation("duplicate_frame", ("id", f.id)))
        if f.name in seen_names:
            report.append(Violation("duplicate_frame", ("name", f.name)))
        seen_ids.add(f.id)
        seen_names.add(f.name)

    for lu in graph.lexical_units:
        if lu.frame_id not in graph:
            report.append(Violation("dangling", ("lu", lu.id, "frame", lu.frame_id)))

    seen_rel = set()
    for rel in graph.relations:
        for end in (rel.parent_id, rel.child_id):
            if end not in graph:
                report.append(Violation("dangling", ("relation", rel.relation_type, rel.parent_id, rel.child_id, "frame", end)))
        if rel.parent_id == rel.child_id:
            report.append(Violation("self_relation", (rel.relation_type, rel.parent_id)))
        triple = (rel.relation_type, rel.parent_id, rel.child_id)
        if triple in seen_rel:
            report.append(Violation("duplicate_relation", triple))
        seen_rel.add(triple)

    report += [Violation("cycle", c) for c in find_cycles(graph)]
    return report


# --- reading and writing ---------------------------------------------------

def _open_text(source) -> IO[str]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    # assume a binary stream
    return io.TextIOWrapper(source, encoding="utf-8")


def iter_records(source) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)`` from a line-delimited JSON stream; blank lines skipped."""
    fh = _open_text(source)
    try:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FrameDatabaseError(f"malformed record: {exc.msg}", lineno) from None
            if not isinstance(rec, dict):
                raise FrameDatabaseError("record is not an object", lineno)
            yield lineno, rec
    finally:
        if isinstance(source, (str, os.PathLike)):
            fh.close()


def _check_id(value, what, lineno):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise FrameDatabaseError(f"{what} must be an integer or string, got {value!r}", lineno)
    return value


def _parse_record(lineno: int, rec: dict):
    kind = rec.get("kind")
    try:
        if kind == "frame":
            fes = tuple(FrameElement(fe["name"], "core" if fe.get("core") else "non_core")
                        for fe in rec.get("fes", []))
            name = rec["name"]
            if not isinstance(name, str) or not name:
                raise FrameDatabaseError("frame name must be a non-empty string", lineno)
            return Frame(_check_id(rec["id"], "frame id", lineno), name, fes)
        if kind == "lu":
            return LexicalUnit(
                _check_id(rec["id"], "lu id", lineno), rec["lemma"], rec["pos"],
                _check_id(rec["frame"], "lu frame", lineno), rec["lang"])
        if kind == "relation":
            return FrameRelation(
                rec["type"],
                _check_id(rec["parent"], "relation parent", lineno),
                _check_id(rec["child"], "relation child", lineno))
    except KeyError as exc:
        raise FrameDatabaseError(f"{kind} record missing field {exc.args[0]!r}", lineno) from None
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, FrameDatabaseError):
            raise
        raise FrameDatabaseError(f"invalid {kind} record: {exc}", lineno) from None
    raise FrameDatabaseError(f"unknown record kind {kind!r}", lineno)


def load_frame_database(source, *, strict: bool = True) -> FrameGraph:
    """Read a frame database record stream into a :class:`FrameGraph`.

    Malformed records, dangling references and duplicate frame ids or names
    always raise. With ``strict`` (the default) duplicate relations and
    directed cycles raise too; pass ``strict=False`` to keep them for
    :func:`validate` to report.
    """
    frames, lus, rels = [], [], []
    lines: dict[int, int] = {}
    for lineno, rec in iter_records(source):
        obj = _parse_record(lineno, rec)
        lines[id(obj)] = lineno
        {Frame: frames, LexicalUnit: lus, FrameRelation: rels}[type(obj)].append(obj)

    seen_ids, seen_names = {}, {}
    for f in frames:
        if f.id in seen_ids:
            raise DuplicateError(f"duplicate frame id {f.id!r}", lines[id(f)])
        if f.name in seen_names:
            raise DuplicateError(f"duplicate frame name {f.name!r}", lines[id(f)])
        seen_ids[f.id] = f
        seen_names[f.name] = f

    for lu in lus:
        if lu.frame_id not in seen_ids:
            raise DanglingReferenceError(
                f"lexical unit {lu.id!r} references unknown frame id {lu.frame_id!r}", lines[id(lu)])
    seen_rel = set()
    for rel in rels:
        for end in (rel.parent_id, rel.child_id):
            if end not in seen_ids:
                raise DanglingReferenceError(f"relation references unknown frame id {end!r}", lines[id(rel)])
        if rel.parent_id == rel.child_id:
            raise FrameDatabaseError(f"relation from frame {rel.parent_id!r} to itself", lines[id(rel)])
        triple = (rel.relation_type, rel.parent_id, rel.child_id)
        if strict and triple in seen_rel:
            raise DuplicateError(f"duplicate relation {triple}", lines[id(rel)])
        seen_rel.add(triple)

    graph = FrameGraph(frames, lus, rels)
    if strict:
        cycles = find_cycles(graph)
        if cycles:
            raise CycleError("directed cycle " + " -> ".join(map(str, cycles[0] + cycles[0][:1])))
    return graph


def frame_records(graph: FrameGraph) -> Iterator[dict]:
    for f in graph.frames:
        yield {"kind": "frame", "id": f.id, "name": f.name,
               "fes": [{"name": fe.name, "core": fe.coreness == "core"} for fe in f.frame_elements]}
    for lu in graph.lexical_units:
        yield {"kind": "lu", "id": lu.id, "lemma": lu.lemma, "pos": lu.pos, "frame": lu.frame_id, "lang": lu.lang}
    for r in graph.relations:
        yield {"kind": "relation", "type": r.relation_type, "parent": r.parent_id, "child": r.child_id}


def dump_frame_database(graph: FrameGraph) -> str:
    return "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in frame_records(graph))

"""Frame disambiguation for caption text.

Text is split into lemmas by dictionary lookup against the lexical-unit
inventory, each lemma gets its candidate frames, and every candidate is
scored by context support: 1.0 for the lemma itself plus, for every other
lemma in the sentence, the strongest relatedness from one of that lemma's
candidates. The best-scoring candidate wins; ties go to the frame name that
sorts first.

This is a self-contained variant built for determinism and testability. It
does not reproduce the node typing or energy function of any external
disambiguation system.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .activation import RelatednessTable, SpreadParams, spread
from .graph import FrameGraph, FrameId, LexicalUnit, lookup_lemma
from .similarity import AnnotationFrames

_WORD = re.compile(r"\w+(?:['\-]\w+)*")

# trivial inflection stripping, tried in order after the exact form
SUFFIXES = {"en": ("es", "s"), "pt": ("s",)}

Normalizer = Callable[[str, str], Sequence[str]]


def suffix_forms(word: str, lang: str) -> tuple[str, ...]:
    """Candidate lemma forms for a case-folded word, most specific first."""
    forms = [word]
    for suffix in SUFFIXES.get(lang, ()):
        if word.endswith(suffix) and len(word) > len(suffix) + 1:
            forms.append(word[: -len(suffix)])
    return tuple(forms)


@dataclass(frozen=True)
class LemmaToken:
    surface: str
    lemma: str
    position: tuple[int, int]  # token index range, end exclusive


@dataclass(frozen=True)
class CandidateSet:
    token: LemmaToken
    candidates: tuple[tuple[LexicalUnit, FrameId], ...]

    @property
    def frame_ids(self) -> tuple:
        return tuple(f for _, f in self.candidates)


@dataclass(frozen=True)
class FrameAssignment:
    token: LemmaToken
    frame_id: FrameId
    score: float


@dataclass
class ParseResult:
    annotation: AnnotationFrames
    tokens: list[LemmaToken]
    candidate_sets: list[CandidateSet]
    assignments: list[FrameAssignment]
    candidate_scores: list[dict] = field(default_factory=list)

    @property
    def lemma_count(self) -> int:
        return len(self.tokens)

    @property
    def frame_count(self) -> int:
        """Number of frame-evoking lemmas, one assigned frame each."""
        return len(self.assignments)

    @property
    def ratio(self) -> float:
        return self.frame_count / self.lemma_count

    def trace(self, caption_id: str, graph: FrameGraph) -> list[dict]:
        rows = []
        assigned = {a.token: a for a in self.assignments}
        for cs, scores in zip(self.candidate_sets, self.candidate_scores):
            a = assigned[cs.token]
            rows.append({
                "caption": caption_id,
                "token": cs.token.surface,
                "lemma": cs.token.lemma,
                "candidates": [[f, graph.frame(f).name, scores[f]] for f in cs.frame_ids],
                "chosen": a.frame_id,
                "score": a.score,
            })
        return rows


def lemmatize(text: str, lang: str, graph: FrameGraph, normalizer: Normalizer | None = None) -> list[LemmaToken]:
    """Split ``text`` into lemma tokens, matching multiword lemmas greedily.

    ``normalizer(word, lang)`` returns candidate lemma forms for a
    case-folded word; the default strips a plural suffix. Words matching no
    lexical unit are kept with their case-folded surface form as lemma.
    """
    if not text or not text.strip():
        raise ValueError("cannot lemmatize empty text")
    if lang not in graph.languages:
        raise ValueError(f"unsupported language {lang!r}: no lexical units for it")
    normalizer = normalizer or suffix_forms
    matches = list(_WORD.finditer(text))
    words = [(m.group(0), m.group(0).casefold()) for m in matches]
    if not words:
        raise ValueError(f"no word tokens in {text!r}")

    inventory = graph.lemma_inventory(lang)
    split_lemmas = {tuple(lemma.split()) for lemma in inventory}
    max_len = max((len(parts) for parts in split_lemmas), default=1)
    forms = [normalizer(w, lang) for _, w in words]

    tokens = []
    i = 0
    while i < len(words):
        match = None
        for length in range(min(max_len, len(words) - i), 0, -1):
            if length == 1:
                lemma = next((f for f in forms[i] if f in inventory), None)
                if lemma is not None:
                    match = (1, lemma)
                break
            # words of a multiword lemma must each match one of their forms
            for parts in _multiword_candidates(forms, i, length):
                if parts in split_lemmas:
                    match = (length, " ".join(parts))
                    break
            if match:
                break
        length, lemma = match or (1, words[i][1])
        surface = text[matches[i].start():matches[i + length - 1].end()]
        tokens.append(LemmaToken(surface, lemma, (i, i + length)))
        i += length
    return tokens


def _multiword_candidates(forms, start, length):
    combos = [()]
    for j in range(start, start + length):
        combos = [c + (f,) for c in combos for f in forms[j]]
    return combos


def candidates(tokens: Iterable[LemmaToken], graph: FrameGraph, lang: str) -> list[CandidateSet]:
    out = []
    for tok in tokens:
        by_frame: dict = {}
        for lu, frame in lookup_lemma(graph, tok.lemma, lang):
            prev = by_frame.get(frame.id)
            if prev is None or (lu.pos, str(lu.id)) < (prev.pos, str(prev.id)):
                by_frame[frame.id] = lu
        if by_frame:
            ordered = sorted(by_frame.items(), key=lambda kv: graph.frame(kv[0]).name)
            out.append(CandidateSet(tok, tuple((lu, f) for f, lu in ordered)))
    return out


def _score_candidates(candidate_sets, graph, params, table):
    rows: dict = {}

    def rel(source, target):
        if table is not None and source in table.rows:
            return table.relatedness(source, target)
        if source not in rows:
            rows[source] = spread(graph, {source: 1.0}, params).entries
        return rows[source].get(target, 0.0)

    all_scores = []
    for i, cs in enumerate(candidate_sets):
        scores = {}
        for f in cs.frame_ids:
            support = [max(rel(g, f) for g in other.frame_ids)
                       for j, other in enumerate(candidate_sets) if j != i]
            scores[f] = 1.0 + sum(support)
        all_scores.append(scores)
    return all_scores


def disambiguate(candidate_sets: Sequence[CandidateSet], graph: FrameGraph,
                 params: SpreadParams = SpreadParams(), table: RelatednessTable | None = None) -> list[FrameAssignment]:
    """Assign one frame per candidate set by context support.

    Relatedness comes from ``table`` when it has a row for the source frame,
    otherwise from a spread computed with ``params``.
    """
    return _assign(candidate_sets, graph, _score_candidates(candidate_sets, graph, params, table))


def _assign(candidate_sets, graph, all_scores):
    out = []
    for cs, scores in zip(candidate_sets, all_scores):
        best = min(cs.frame_ids, key=lambda f: (-scores[f], graph.frame(f).name))
        out.append(FrameAssignment(cs.token, best, scores[best]))
    return out


def parse(text: str, lang: str, graph: FrameGraph, params: SpreadParams = SpreadParams(), *,
          annotation_id: str = "", table: RelatednessTable | None = None,
          normalizer: Normalizer | None = None) -> ParseResult:
    tokens = lemmatize(text, lang, graph, normalizer)
    cands = candidates(tokens, graph, lang)
    scores = _score_candidates(cands, graph, params, table)
    assignments = _assign(cands, graph, scores)
    evoked = AnnotationFrames(annotation_id, (a.frame_id for a in assignments))
    return ParseResult(evoked, tokens, cands, assignments, scores)


def dump_trace(rows: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)

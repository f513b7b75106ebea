"""Caption and image-annotation corpora in the five annotation setups.

Text setups (``ENO`` English originals, ``PTT`` Portuguese translations,
``PTO`` Portuguese originals) carry caption text and are parsed into frames.
Visual setups (``VWC`` image labels made with the caption visible, ``VWoC``
without it) carry explicit frame labels.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .activation import RelatednessTable, SpreadParams
from .daisy import ParseResult, parse
from .graph import FrameGraph, iter_records
from .similarity import AnnotationFrames, compare_annotations

log = logging.getLogger(__name__)

TEXT_SETUPS = ("ENO", "PTT", "PTO")
VISUAL_SETUPS = ("VWC", "VWoC")
SETUPS = TEXT_SETUPS + VISUAL_SETUPS
MERGE_POLICIES = ("error", "first")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Label:
    frame: object
    fe: str | None = None
    box: object = None

    def to_record(self) -> dict:
        rec = {"frame": self.frame}
        if self.fe is not None:
            rec["fe"] = self.fe
        if self.box is not None:
            rec["box"] = self.box
        return rec


@dataclass(frozen=True)
class AnnotationRecord:
    record_id: str
    image_id: str
    setup: str
    lang: str
    text: str | None = None
    labels: tuple[Label, ...] = ()

    @property
    def is_text(self) -> bool:
        return self.setup in TEXT_SETUPS

    def to_record(self) -> dict:
        rec = {"id": self.record_id, "image": self.image_id, "setup": self.setup, "lang": self.lang}
        if self.is_text:
            rec["text"] = self.text
        else:
            rec["labels"] = [lab.to_record() for lab in self.labels]
        return rec


@dataclass
class Corpus:
    records: list[AnnotationRecord]
    index: dict = field(init=False)

    def __post_init__(self):
        self.index = {}
        for rec in self.records:
            self.index.setdefault((rec.image_id, rec.setup), rec)

    def __len__(self) -> int:
        return len(self.records)

    def get(self, image_id: str, setup: str) -> AnnotationRecord | None:
        return self.index.get((image_id, setup))

    def setup_records(self, setup: str) -> list[AnnotationRecord]:
        return [r for r in self.records if r.setup == setup]

    def images(self, setup: str | None = None) -> list[str]:
        return sorted({img for img, s in self.index if setup is None or s == setup})


@dataclass(frozen=True)
class DescriptiveStats:
    setup: str
    n: int
    avg_frames: float
    stdev_frames: float
    avg_lemmas: float
    stdev_lemmas: float
    avg_ratio: float
    stdev_ratio: float


@dataclass
class SimilaritySample:
    setup_a: str
    setup_b: str
    pairs: list[tuple[str, float]]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.pairs]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["image_id", "setup_a", "setup_b", "cosine"])
        for image_id, value in self.pairs:
            w.writerow([image_id, self.setup_a, self.setup_b, repr(value)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, source) -> "SimilaritySample":
        text = source if isinstance(source, str) else source.read()
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise CorpusError("similarity CSV has no rows")
        setups = {(r["setup_a"], r["setup_b"]) for r in rows}
        if len(setups) != 1:
            raise CorpusError("similarity CSV mixes setup pairs")
        (a, b), = setups
        return cls(a, b, [(r["image_id"], float(r["cosine"])) for r in rows])


def _parse_record(lineno: int, rec: dict, graph: FrameGraph | None, allow_empty_text: bool) -> AnnotationRecord:
    try:
        setup = rec["setup"]
        if setup not in SETUPS:
            raise CorpusError(f"line {lineno}: unknown setup {setup!r}")
        record_id, image_id, lang = str(rec["id"]), str(rec["image"]), rec["lang"]
        if setup in TEXT_SETUPS:
            text = rec["text"]
            if not isinstance(text, str):
                raise CorpusError(f"line {lineno}: text must be a string")
            if not text.strip() and not allow_empty_text:
                raise CorpusError(f"line {lineno}: empty caption text in record {record_id!r}")
            return AnnotationRecord(record_id, image_id, setup, lang, text=text)
        labels = []
        for lab in rec["labels"]:
            frame = lab["frame"]
            if graph is not None:
                try:
                    graph.resolve(frame)
                except KeyError:
                    raise CorpusError(f"line {lineno}: label names unknown frame {frame!r}") from None
            labels.append(Label(frame, lab.get("fe"), lab.get("box")))
        return AnnotationRecord(record_id, image_id, setup, lang, labels=tuple(labels))
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"line {lineno}: malformed corpus record ({exc!r})") from None


def load_corpus(source, graph: FrameGraph | None = None, policy: str = "error",
                allow_empty_text: bool = False) -> Corpus:
    """Read a corpus record stream.

    With a ``graph``, every visual frame label must name an existing frame.
    ``policy`` decides what a second record for the same image and setup
    does: ``"error"`` raises, ``"first"`` keeps the earlier record.
    """
    if policy not in MERGE_POLICIES:
        raise ValueError(f"policy must be one of {MERGE_POLICIES}")
    records: list[AnnotationRecord] = []
    seen: dict = {}
    ids: set = set()
    try:
        stream = list(iter_records(source))
    except ValueError as exc:
        raise CorpusError(str(exc)) from None
    for lineno, raw in stream:
        rec = _parse_record(lineno, raw, graph, allow_empty_text)
        if rec.record_id in ids:
            raise CorpusError(f"line {lineno}: duplicate record id {rec.record_id!r}")
        key = (rec.image_id, rec.setup)
        if key in seen:
            if policy == "error":
                raise CorpusError(f"line {lineno}: duplicate record for image {key[0]!r} setup {key[1]}")
            continue
        seen[key] = rec
        ids.add(rec.record_id)
        records.append(rec)
    return Corpus(records)


def dump_corpus(corpus: Corpus) -> str:
    return "".join(json.dumps(r.to_record(), ensure_ascii=False) + "\n" for r in corpus.records)


def annotation_frames(record: AnnotationRecord, graph: FrameGraph, params: SpreadParams = SpreadParams(),
                      table: RelatednessTable | None = None) -> AnnotationFrames:
    """Evoked frames of a record: parsed from text, or taken from its labels.

    An empty result is returned as-is; callers decide how to treat it.
    """
    if record.is_text:
        return parse(record.text, record.lang, graph, params, annotation_id=record.record_id, table=table).annotation
    return AnnotationFrames(record.record_id, (graph.resolve(lab.frame).id for lab in record.labels))


def parse_record(record: AnnotationRecord, graph: FrameGraph, params: SpreadParams = SpreadParams(),
                 table: RelatednessTable | None = None) -> ParseResult:
    if not record.is_text:
        raise CorpusError(f"record {record.record_id!r} is a visual annotation, not text")
    return parse(record.text, record.lang, graph, params, annotation_id=record.record_id, table=table)


def descriptive_stats(corpus: Corpus, setup: str, graph: FrameGraph, params: SpreadParams = SpreadParams(),
                      table: RelatednessTable | None = None) -> DescriptiveStats:
    """Mean and n-1 standard deviation of per-caption frame, lemma and ratio counts."""
    if setup not in TEXT_SETUPS:
        raise CorpusError(f"lemma statistics need a text setup, got {setup!r}")
    results = [parse_record(r, graph, params, table) for r in corpus.setup_records(setup)]
    if not results:
        raise CorpusError(f"no records for setup {setup}")
    return stats_from_counts(setup, [(r.frame_count, r.lemma_count) for r in results])


def stats_from_counts(setup: str, counts: Iterable[tuple[int, int]]) -> DescriptiveStats:
    counts = list(counts)
    frames = [float(f) for f, _ in counts]
    lemmas = [float(n) for _, n in counts]
    ratios = [f / n for f, n in counts]

    def sd(xs):
        return statistics.stdev(xs) if len(xs) > 1 else 0.0

    return DescriptiveStats(setup, len(counts),
                            statistics.fmean(frames), sd(frames),
                            statistics.fmean(lemmas), sd(lemmas),
                            statistics.fmean(ratios), sd(ratios))


def pairwise_similarities(corpus: Corpus, setup_a: str, setup_b: str, graph: FrameGraph,
                          table: RelatednessTable, params: SpreadParams = SpreadParams()) -> SimilaritySample:
    """Cosine similarity per image present in both setups, ordered by image id.

    Images missing a side or whose annotation evokes no frame are skipped
    and listed in ``skipped``.
    """
    for s in (setup_a, setup_b):
        if s not in SETUPS:
            raise CorpusError(f"unknown setup {s!r}")
    images_a, images_b = set(corpus.images(setup_a)), set(corpus.images(setup_b))
    pairs, skipped = [], []
    for image_id in sorted(images_a | images_b):
        if image_id not in images_a or image_id not in images_b:
            missing = setup_a if image_id not in images_a else setup_b
            skipped.append((image_id, f"no {missing} record"))
            continue
        ann_a = annotation_frames(corpus.get(image_id, setup_a), graph, params, table)
        ann_b = annotation_frames(corpus.get(image_id, setup_b), graph, params, table)
        empty = [s for s, ann in ((setup_a, ann_a), (setup_b, ann_b)) if not ann.evoked]
        if empty:
            skipped.append((image_id, f"empty frame set in {', '.join(empty)}"))
            continue
        pairs.append((image_id, compare_annotations(ann_a, ann_b, table)))
    if not pairs:
        warnings.warn(f"no comparable images between {setup_a} and {setup_b}", RuntimeWarning, stacklevel=2)
    return SimilaritySample(setup_a, setup_b, pairs, skipped)


def histogram(sample: Iterable[float], bins: int) -> list[tuple[tuple[float, float], int]]:
    """Equal-width bins over [0, 1]; every bin is half-open except the last."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    values = np.asarray(list(sample), dtype=float)
    if values.size == 0:
        raise ValueError("cannot histogram an empty sample")
    if values.min() < 0.0 or values.max() > 1.0:
        raise ValueError("sample values must lie in [0, 1]")
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    return [((float(edges[i]), float(edges[i + 1])), int(counts[i])) for i in range(bins)]

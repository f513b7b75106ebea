"""Associative arrays for annotations and cosine similarity between them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .activation import RelatednessTable
from .graph import FrameId, _id_key


class UndefinedSimilarityError(ValueError):
    """Raised when one side of a comparison has no activation at all."""


@dataclass(frozen=True)
class AnnotationFrames:
    annotation_id: str
    evoked: frozenset

    def __init__(self, annotation_id: str, evoked: Iterable[FrameId]):
        object.__setattr__(self, "annotation_id", annotation_id)
        object.__setattr__(self, "evoked", frozenset(evoked))


@dataclass(frozen=True, eq=False)
class AssociativeArray:
    """Sparse frame-indexed activation vector.

    ``index`` holds frame ids in canonical order (ints before strings, then
    ascending), which is also the graph's dense handle order.
    """

    index: tuple
    values: np.ndarray

    def __post_init__(self):
        if len(self.index) != len(self.values):
            raise ValueError("index and values must have equal length")
        keys = [_id_key(f) for f in self.index]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ValueError("index must be strictly ascending")
        if len(self.values) and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("values must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.index)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AssociativeArray):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.values, other.values)

    def as_dict(self) -> dict:
        return dict(zip(self.index, self.values.tolist()))

    def to_record(self, annotation_id: str) -> dict:
        return {"annotation": annotation_id,
                "frames": [[f, v] for f, v in zip(self.index, self.values.tolist())]}

    @classmethod
    def from_dict(cls, values: dict) -> "AssociativeArray":
        index = tuple(sorted(values, key=_id_key))
        return cls(index, np.array([values[f] for f in index], dtype=float))


def build_array(ann: AnnotationFrames, table: RelatednessTable) -> AssociativeArray:
    """Max-combine the table rows of every evoked frame."""
    merged: dict = {}
    for frame_id in ann.evoked:
        if frame_id not in table.rows:
            raise KeyError(f"evoked frame {frame_id!r} has no relatedness row")
        for f, v in table.rows[frame_id].entries.items():
            if v > merged.get(f, 0.0):
                merged[f] = v
    return AssociativeArray.from_dict(merged)


def align(a1: AssociativeArray, a2: AssociativeArray) -> tuple[AssociativeArray, AssociativeArray]:
    """Zero-complete both arrays over the union of their indexes."""
    if a1.index == a2.index:
        return a1, a2
    index = tuple(sorted(set(a1.index) | set(a2.index), key=_id_key))
    pos = {f: i for i, f in enumerate(index)}

    def fill(a):
        values = np.zeros(len(index))
        values[[pos[f] for f in a.index]] = a.values
        return AssociativeArray(index, values)

    return fill(a1), fill(a2)


def cosine(a1: AssociativeArray, a2: AssociativeArray) -> float:
    # fsum makes the result independent of term order and of zero padding
    if a1.index != a2.index:
        a1, a2 = align(a1, a2)
    n1 = math.fsum((a1.values * a1.values).tolist())
    n2 = math.fsum((a2.values * a2.values).tolist())
    if n1 == 0.0 or n2 == 0.0:
        raise UndefinedSimilarityError("cosine similarity undefined for a zero-norm array")
    dot = math.fsum((a1.values * a2.values).tolist())
    return min(1.0, dot / (math.sqrt(n1) * math.sqrt(n2)))


def compare_annotations(ann1: AnnotationFrames, ann2: AnnotationFrames, table: RelatednessTable) -> float:
    for ann in (ann1, ann2):
        if not ann.evoked:
            raise UndefinedSimilarityError(f"annotation {ann.annotation_id!r} evokes no frames")
    return cosine(*align(build_array(ann1, table), build_array(ann2, table)))


def dump_array(arr: AssociativeArray, annotation_id: str) -> str:
    return json.dumps(arr.to_record(annotation_id), ensure_ascii=False)

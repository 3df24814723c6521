"""JSON point-set documents.

A document looks like ``{"dim": 2, "points": [[1.0, 0.0], ...], "label": "A"}``;
an empty ``points`` list is the empty set.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

from .sets import FiniteClosedSet

__all__ = ["MalformedInputError", "PointSetDocument", "read_document", "write_document", "read_sequence_dir"]


class MalformedInputError(ValueError):
    """A file does not hold a valid point-set document."""


@dataclass
class PointSetDocument:
    dim: int
    points: list
    label: str | None = None

    def to_set(self) -> FiniteClosedSet:
        return FiniteClosedSet(self.points, dim=self.dim)

    @classmethod
    def from_set(cls, S: FiniteClosedSet, dim: int | None = None, label: str | None = None) -> "PointSetDocument":
        return cls(dim or S.dim, [list(p) for p in S], label)

    def to_json(self) -> str:
        doc = {"dim": self.dim, "points": self.points}
        if self.label is not None:
            doc["label"] = self.label
        return json.dumps(doc)

    @classmethod
    def from_obj(cls, obj, source: str = "<input>") -> "PointSetDocument":
        if not isinstance(obj, dict):
            raise MalformedInputError(f"{source}: top level must be an object")
        dim = obj.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise MalformedInputError(f"{source}: 'dim' must be a positive integer")
        points = obj.get("points")
        if not isinstance(points, list):
            raise MalformedInputError(f"{source}: 'points' must be a list")
        clean = []
        for k, p in enumerate(points):
            if not isinstance(p, list) or len(p) != dim:
                raise MalformedInputError(f"{source}: point {k} must be a list of {dim} numbers")
            for c in p:
                if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                    raise MalformedInputError(f"{source}: point {k} has a non-finite or non-numeric coordinate")
            clean.append([float(c) for c in p])
        label = obj.get("label")
        if label is not None and not isinstance(label, str):
            raise MalformedInputError(f"{source}: 'label' must be a string")
        return cls(dim, clean, label)


def read_document(path) -> PointSetDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MalformedInputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except (json.JSONDecodeError, ValueError) as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from None
    return PointSetDocument.from_obj(obj, str(path))


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name}")


def write_document(path, S: FiniteClosedSet, dim: int | None = None, label: str | None = None) -> None:
    Path(path).write_text(PointSetDocument.from_set(S, dim, label).to_json() + "\n")


_INDEX = re.compile(r"(\d+)$")


def read_sequence_dir(directory) -> list[PointSetDocument]:
    """Read ``*.json`` files whose stems end in an integer, in index order.

    The indices must be consecutive; a gap is reported as malformed input.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise MalformedInputError(f"{directory}: not a directory")
    indexed = {}
    for path in directory.glob("*.json"):
        m = _INDEX.search(path.stem)
        if m is None:
            continue
        k = int(m.group(1))
        if k in indexed:
            raise MalformedInputError(f"{directory}: index {k} appears twice")
        indexed[k] = path
    if not indexed:
        raise MalformedInputError(f"{directory}: no numbered .json files")
    keys = sorted(indexed)
    missing = sorted(set(range(keys[0], keys[-1] + 1)) - set(keys))
    if missing:
        raise MalformedInputError(f"{directory}: missing indices {missing[:10]}")
    return [read_document(indexed[k]) for k in keys]

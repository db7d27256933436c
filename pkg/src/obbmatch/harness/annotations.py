"""Annotation ingestion: quadrilateral ground-truth lines to oriented boxes.

The accepted format is one object per line,

    x1 y1 x2 y2 x3 y3 x4 y4 label difficulty

with the quadrilateral fitted by its minimum-area enclosing rectangle.
Blank lines are skipped.  Malformed lines go into the parse-error report
(or raise FormatError in strict mode); well-formed lines are kept either
way.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import DegenerateInput, FormatError
from ..geometry import OrientedBox, min_area_rect

DEFAULT_IMAGE_SIZE = (800.0, 800.0)


@dataclass(frozen=True)
class GroundTruth:
    box: OrientedBox
    label: str
    difficult: bool = False


@dataclass(frozen=True)
class Scene:
    """One annotated image: its size and oriented ground-truth objects."""

    width: float
    height: float
    objects: tuple[GroundTruth, ...]

    @property
    def boxes(self) -> list[OrientedBox]:
        return [g.box for g in self.objects]


@dataclass(frozen=True)
class ParseIssue:
    path: str
    line_no: int
    message: str


@dataclass
class ParseResult:
    scenes: list[Scene]
    issues: list[ParseIssue]

    @property
    def ok(self) -> bool:
        return not self.issues


def _parse_line(line: str) -> GroundTruth:
    parts = line.split()
    if len(parts) != 10:
        raise ValueError(f"expected 10 fields, got {len(parts)}")
    try:
        coords = [float(v) for v in parts[:8]]
        difficulty = int(parts[9])
    except ValueError as exc:
        raise ValueError(f"bad numeric field: {exc}") from None
    quad = [(coords[0], coords[1]), (coords[2], coords[3]),
            (coords[4], coords[5]), (coords[6], coords[7])]
    box = min_area_rect(quad)
    return GroundTruth(box, parts[8], bool(difficulty))


def parse_annotations(path, image_size=DEFAULT_IMAGE_SIZE, strict=False) -> ParseResult:
    """Read one annotation file, or every *.txt under a directory, into scenes.

    A file contributes a scene when it yields at least one valid object;
    an empty file contributes nothing.  I/O failures propagate as OSError.
    In strict mode the first malformed line raises FormatError carrying
    its 1-based line number.
    """
    p = Path(path)
    files = sorted(p.glob("*.txt")) if p.is_dir() else [p]
    w, h = float(image_size[0]), float(image_size[1])
    scenes: list[Scene] = []
    issues: list[ParseIssue] = []
    for f in files:
        text = f.read_text(encoding="utf-8")
        objects: list[GroundTruth] = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                objects.append(_parse_line(line))
            except (ValueError, DegenerateInput) as exc:
                if strict:
                    raise FormatError(line_no, str(exc)) from exc
                issues.append(ParseIssue(str(f), line_no, str(exc)))
        if objects:
            scenes.append(Scene(w, h, tuple(objects)))
    return ParseResult(scenes, issues)

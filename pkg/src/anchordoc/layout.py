"""Stage-1 layout sequence: document type, element labels, boxes and attributes.

The textual form is one document-type line followed by one line per element in
reading order::

    digital document
    [sec_0] 100,40,800,90
    [para]{author,author_mail} 100,120,800,400

A photographed page is the single line ``photographed document``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterable


class DocumentType(str, enum.Enum):
    DIGITAL = "digital document"
    PHOTOGRAPHED = "photographed document"


class SemanticLabel(str, enum.Enum):
    SEC_0 = "sec_0"
    SEC_1 = "sec_1"
    SEC_2 = "sec_2"
    SEC_3 = "sec_3"
    SEC_4 = "sec_4"
    SEC_5 = "sec_5"
    PARA = "para"
    HALF_PARA = "half_para"
    HEADER = "header"
    FOOT = "foot"
    FNOTE = "fnote"
    WATERMARK = "watermark"
    FIG = "fig"
    TAB = "tab"
    CAP = "cap"
    ANNO = "anno"
    EQU = "equ"
    CODE = "code"
    CATALOGUE = "catalogue"
    REFERENCE = "reference"
    LIST = "list"

    @property
    def heading_level(self) -> int | None:
        """Markdown heading depth for ``sec_k`` labels, ``None`` otherwise."""
        if self.value.startswith("sec_"):
            return min(int(self.value[4:]) + 1, 6)
        return None


class AttributeTag(str, enum.Enum):
    AUTHOR = "author"
    AUTHOR_AFFILI = "author_affili"
    AUTHOR_MAIL = "author_mail"
    AUTHOR_INTRODUCTION = "author_introduction"
    META_PUB_DATE = "meta_pub_date"
    META_SUBJECT = "meta_subject"
    META_DOI = "meta_doi"
    META_NUM = "meta_num"
    PAPER_ABSTRACT = "paper_abstract"
    PAPER_KEYWORDS = "paper_keywords"
    PAPER_CONCLUSION = "paper_conclusion"
    PAGE_NUM = "page_num"


_LABELS = {label.value: label for label in SemanticLabel}
_ATTRS = {tag.value: tag for tag in AttributeTag}
_ATTR_RANK = {tag: i for i, tag in enumerate(AttributeTag)}

# Labels whose content never goes through the model.
UNPARSED_LABELS = frozenset({SemanticLabel.FIG, SemanticLabel.WATERMARK})


class LayoutParseError(ValueError):
    """Stage-1 text does not conform to the layout grammar."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class UnknownDocType(LayoutParseError):
    pass


class UnknownLabel(LayoutParseError):
    pass


class UnknownAttribute(LayoutParseError):
    pass


class MalformedBBox(LayoutParseError):
    pass


class OutOfRange(ValueError):
    pass


class InvalidResult(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in absolute pixels, origin top-left, ``x2``/``y2`` exclusive."""

    x1: int
    y1: int
    x2: int
    y2: int

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return max(0, self.width) * max(0, self.height)

    def is_well_formed(self) -> bool:
        return self.x1 < self.x2 and self.y1 < self.y2

    def within(self, page_w: int, page_h: int) -> bool:
        return self.x1 >= 0 and self.y1 >= 0 and self.x2 <= page_w and self.y2 <= page_h

    def clamp(self, page_w: int, page_h: int) -> BBox:
        return BBox(
            min(max(self.x1, 0), page_w),
            min(max(self.y1, 0), page_h),
            min(max(self.x2, 0), page_w),
            min(max(self.y2, 0), page_h),
        )

    def expand(self, pad: int) -> BBox:
        return BBox(self.x1 - pad, self.y1 - pad, self.x2 + pad, self.y2 + pad)

    def intersection(self, other: BBox) -> int:
        w = min(self.x2, other.x2) - max(self.x1, other.x1)
        h = min(self.y2, other.y2) - max(self.y1, other.y1)
        return w * h if w > 0 and h > 0 else 0

    def iou(self, other: BBox) -> float:
        inter = self.intersection(other)
        if inter == 0:
            return 0.0
        return inter / (self.area + other.area - inter)

    def as_list(self) -> list[int]:
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass(frozen=True)
class LayoutElement:
    label: SemanticLabel
    bbox: BBox
    attrs: frozenset[AttributeTag] = frozenset()
    order: int = 0

    @property
    def parseable(self) -> bool:
        return self.label not in UNPARSED_LABELS


@dataclass(frozen=True)
class StageOneResult:
    doc_type: DocumentType
    elements: tuple[LayoutElement, ...]
    page_w: int
    page_h: int
    # Parser diagnostics (clamped coordinates etc.); not part of equality.
    warnings: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    order: int | None = None

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


_ELEMENT_RE = re.compile(r"\[([^\]\s]*)\](?:\{([^}]*)\})? (\S+)")
_INT_RE = re.compile(r"-?\d+")


def _parse_bbox(coords: str, page_w: int, page_h: int, line_no: int, warnings: list[str]) -> BBox:
    parts = coords.split(",")
    if len(parts) != 4 or not all(_INT_RE.fullmatch(p) for p in parts):
        raise MalformedBBox(f"expected four integer coordinates, got {coords!r}", line_no)
    raw = BBox(*(int(p) for p in parts))
    box = raw.clamp(page_w, page_h)
    if not box.is_well_formed():
        raise MalformedBBox(f"degenerate box {coords!r} on a {page_w}x{page_h} page", line_no)
    if box != raw:
        warnings.append(f"line {line_no}: clamped {coords} to {','.join(map(str, box.as_list()))}")
    return box


def _parse_attrs(raw: str | None, line_no: int) -> frozenset[AttributeTag]:
    if not raw:
        return frozenset()
    tags = set()
    for name in raw.split(","):
        tag = _ATTRS.get(name.strip())
        if tag is None:
            raise UnknownAttribute(f"unknown attribute tag {name!r}", line_no)
        tags.add(tag)
    return frozenset(tags)


def parse_layout_sequence(text: str | bytes, page_w: int, page_h: int) -> StageOneResult:
    """Parse a raw Stage-1 emission into a validated :class:`StageOneResult`.

    Coordinates overshooting the page are clamped with a warning; a box that is
    empty after clamping raises :class:`MalformedBBox`. Every failure is a
    :class:`LayoutParseError` subclass.
    """
    if page_w <= 0 or page_h <= 0:
        raise ValueError(f"page dimensions must be positive, got {page_w}x{page_h}")
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise LayoutParseError(f"layout sequence is not valid UTF-8: {exc}") from None

    lines = [(i, line.strip()) for i, line in enumerate(text.split("\n"), start=1)]
    lines = [(i, line) for i, line in lines if line]
    if not lines:
        raise UnknownDocType("empty layout sequence", 1)

    first_no, first = lines[0]
    try:
        doc_type = DocumentType(first)
    except ValueError:
        raise UnknownDocType(f"unknown document type {first[:80]!r}", first_no) from None

    warnings: list[str] = []
    if doc_type is DocumentType.PHOTOGRAPHED:
        if len(lines) > 1:
            warnings.append(f"ignored {len(lines) - 1} line(s) after photographed document")
        return StageOneResult(doc_type, (), page_w, page_h, tuple(warnings))

    elements = []
    for order, (line_no, line) in enumerate(lines[1:]):
        m = _ELEMENT_RE.fullmatch(line)
        if m is None:
            raise LayoutParseError(f"malformed element line {line[:80]!r}", line_no)
        name, attrs, coords = m.groups()
        label = _LABELS.get(name)
        if label is None:
            raise UnknownLabel(f"unknown label {name!r}", line_no)
        bbox = _parse_bbox(coords, page_w, page_h, line_no, warnings)
        elements.append(LayoutElement(label, bbox, _parse_attrs(attrs, line_no), order))
    return StageOneResult(doc_type, tuple(elements), page_w, page_h, tuple(warnings))


def format_element(element: LayoutElement) -> str:
    attrs = ""
    if element.attrs:
        attrs = "{" + ",".join(t.value for t in sorted(element.attrs, key=_ATTR_RANK.__getitem__)) + "}"
    b = element.bbox
    return f"[{element.label.value}]{attrs} {b.x1},{b.y1},{b.x2},{b.y2}"


def serialize_layout_sequence(result: StageOneResult) -> str:
    violations = validate_layout(result)
    if violations:
        raise InvalidResult(violations)
    lines = [result.doc_type.value]
    lines.extend(format_element(e) for e in result.elements)
    return "\n".join(lines)


def convert_normalized_bbox(
    nx1: float, ny1: float, nx2: float, ny2: float, page_w: int, page_h: int
) -> BBox:
    """Map fractional page coordinates onto absolute pixels (round half up)."""
    for v in (nx1, ny1, nx2, ny2):
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"normalized coordinate {v} outside [0, 1]")
    if not (nx1 < nx2 and ny1 < ny2):
        raise MalformedBBox(f"degenerate normalized box ({nx1}, {ny1}, {nx2}, {ny2})")

    def px(v: float, size: int) -> int:
        return math.floor(v * size + 0.5)

    return BBox(px(nx1, page_w), px(ny1, page_h), px(nx2, page_w), px(ny2, page_h))


def validate_layout(result: StageOneResult) -> list[Violation]:
    """Return every invariant violation in ``result``; an empty list means valid."""
    out: list[Violation] = []
    if not isinstance(result.doc_type, DocumentType):
        out.append(Violation("UnknownDocType", f"{result.doc_type!r}"))
    if result.page_w <= 0 or result.page_h <= 0:
        out.append(Violation("BadPageSize", f"{result.page_w}x{result.page_h}"))
    if result.doc_type is DocumentType.PHOTOGRAPHED and result.elements:
        out.append(Violation("PhotographedWithElements", f"{len(result.elements)} element(s)"))

    for e in result.elements:
        if not isinstance(e.label, SemanticLabel):
            out.append(Violation("UnknownLabel", f"{e.label!r}", e.order))
        bad = [a for a in e.attrs if not isinstance(a, AttributeTag)]
        if bad:
            out.append(Violation("UnknownAttribute", f"{bad!r}", e.order))
        if not e.bbox.is_well_formed():
            out.append(Violation("BBoxOrder", f"{e.bbox.as_list()} is not x1<x2, y1<y2", e.order))
        if not e.bbox.within(result.page_w, result.page_h):
            out.append(
                Violation(
                    "OutOfBounds",
                    f"{e.bbox.as_list()} exceeds {result.page_w}x{result.page_h} page",
                    e.order,
                )
            )

    orders = [e.order for e in result.elements]
    seen: set[int] = set()
    dup: list[int] = []
    for o in orders:
        if o in seen and o not in dup:
            dup.append(o)
        seen.add(o)
    for o in dup:
        out.append(Violation("OrderDuplicate", f"order {o} appears more than once", o))
    if any(o < 0 for o in orders):
        out.append(Violation("OrderNegative", f"negative order index in {orders}"))
    if seen:
        missing = sorted(set(range(max(seen) + 1)) - seen)
        if missing:
            out.append(Violation("OrderGap", f"missing order indices {missing}"))
    if any(b < a for a, b in zip(orders, orders[1:])):
        out.append(Violation("OrderSequence", "elements are not sorted by order"))
    return out


def elements_in_order(elements: Iterable[LayoutElement]) -> list[LayoutElement]:
    return sorted(elements, key=lambda e: e.order)

"""Ground-truth page description shared by the generators, fixtures and evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from anchordoc.layout import (
    AttributeTag,
    BBox,
    DocumentType,
    LayoutElement,
    SemanticLabel,
    StageOneResult,
    validate_layout,
)

SCHEMA = "anchordoc.page_spec/1"


class InvalidPageSpec(ValueError):
    pass


@dataclass(frozen=True)
class PageSpec:
    """Synthetic page: layout, per-element ground truth and where it came from.

    ``contents`` maps reading-order index to the exact text a perfect parser
    returns for that element (HTML for tables, LaTeX for formulas). A
    photographed page has no elements; its ground truth is ``holistic_text``.
    """

    id: str
    page_w: int
    page_h: int
    doc_type: DocumentType
    elements: tuple[LayoutElement, ...] = ()
    contents: dict[int, str] = field(default_factory=dict)
    holistic_text: str | None = None
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        problems = [str(v) for v in validate_layout(self.stage_one())]
        if self.doc_type is DocumentType.DIGITAL:
            wanted = {e.order for e in self.elements if e.parseable}
            if set(self.contents) != wanted:
                problems.append(f"contents cover {sorted(self.contents)} but parseable elements are {sorted(wanted)}")
            if self.holistic_text is not None:
                problems.append("digital pages carry per-element contents, not holistic text")
        elif self.holistic_text is None or self.contents:
            problems.append("photographed pages carry holistic text only")
        if problems:
            raise InvalidPageSpec(f"page {self.id}: " + "; ".join(problems))

    def stage_one(self) -> StageOneResult:
        return StageOneResult(self.doc_type, tuple(self.elements), self.page_w, self.page_h)

    def reading_order_text(self) -> str:
        """Element contents concatenated in reading order, one element per line."""
        if self.holistic_text is not None:
            return self.holistic_text
        ordered = sorted(self.elements, key=lambda e: e.order)
        return "\n".join(self.contents[e.order] for e in ordered if e.order in self.contents)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "id": self.id,
            "page_w": self.page_w,
            "page_h": self.page_h,
            "doc_type": self.doc_type.name.lower(),
            "elements": [
                {
                    "order": e.order,
                    "label": e.label.value,
                    "bbox": e.bbox.as_list(),
                    "attrs": sorted(a.value for a in e.attrs),
                    "content": self.contents.get(e.order),
                }
                for e in self.elements
            ],
            "holistic_text": self.holistic_text,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> PageSpec:
        if obj.get("schema") != SCHEMA:
            raise InvalidPageSpec(f"not a page spec (schema={obj.get('schema')!r})")
        elements = []
        contents = {}
        for row in obj["elements"]:
            e = LayoutElement(
                SemanticLabel(row["label"]),
                BBox(*row["bbox"]),
                frozenset(AttributeTag(a) for a in row.get("attrs", [])),
                int(row["order"]),
            )
            elements.append(e)
            if row.get("content") is not None:
                contents[e.order] = row["content"]
        return cls(
            obj["id"],
            int(obj["page_w"]),
            int(obj["page_h"]),
            DocumentType[obj["doc_type"].upper()],
            tuple(elements),
            contents,
            obj.get("holistic_text"),
            obj.get("provenance", {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def load(cls, path: str | Path) -> PageSpec:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

"""Mock-backend fixtures derived from page ground truth."""

from __future__ import annotations

from dataclasses import dataclass

from anchordoc.backend import FixtureTable, region_id
from anchordoc.datagen.render import Drawing, Polygon, draw_block, table_rows
from anchordoc.datagen.spec import PageSpec
from anchordoc.layout import DocumentType, SemanticLabel, serialize_layout_sequence
from anchordoc.pipeline import PromptTable, select_prompt


@dataclass(frozen=True)
class GeneratedPage:
    spec: PageSpec
    drawing: Drawing
    fixture: FixtureTable

    @property
    def svg(self) -> str:
        return self.drawing.to_svg()

    def png(self) -> bytes:
        return self.drawing.to_png()


def emit_fixture(spec: PageSpec, prompts: PromptTable = PromptTable(), delay_ms: float | None = None) -> FixtureTable:
    """Responses a perfect model would give for ``spec`` under ``prompts``.

    Digital pages get the layout answer plus one entry per parseable element;
    photographed pages get the classification answer plus the holistic text.
    """
    table = FixtureTable()
    table.add(region_id(spec.id, "layout"), prompts.layout, serialize_layout_sequence(spec.stage_one()), delay_ms)
    if spec.doc_type is DocumentType.PHOTOGRAPHED:
        table.add(region_id(spec.id, "holistic"), prompts.holistic, spec.holistic_text, delay_ms)
        return table
    for e in spec.elements:
        if e.parseable:
            table.add(region_id(spec.id, e.order), select_prompt(e.label, prompts), spec.contents[e.order], delay_ms)
    return table


def drawing_for_spec(spec: PageSpec) -> Drawing:
    """Plain rendering of a digital spec: each element's ground truth drawn inside its box."""
    drawing = Drawing(spec.page_w, spec.page_h)
    for e in spec.elements:
        text = spec.contents.get(e.order, "")
        if e.label is SemanticLabel.TAB:
            lines = table_rows(text)
        elif e.label is SemanticLabel.FIG:
            b = e.bbox
            drawing.items.append(Polygon(((b.x1, b.y1), (b.x2, b.y1), (b.x2, b.y2), (b.x1, b.y2)), "#dddddd", "#999999"))
            continue
        else:
            lines = text.split("\n")
        size = max(6.0, min(18.0, e.bbox.height / (1.3 * max(1, len(lines)))))
        draw_block(drawing, e.bbox, lines, size, "sans-serif", "#111111")
    return drawing


"""Table-of-contents pages with hierarchical entries and dotted leaders."""

from __future__ import annotations

import math
import random
import re

from anchordoc.datagen.fixtures import GeneratedPage, emit_fixture
from anchordoc.datagen.render import Drawing
from anchordoc.datagen.spec import PageSpec
from anchordoc.layout import BBox, DocumentType, LayoutElement, SemanticLabel
from anchordoc.pipeline import PromptTable

CANONICAL_LEADER = "......"
_LEADER_RE = re.compile(r"\s*(?:[.…·‥](?:\s?[.…·‥])+|…)\s*")

PAGE_W, PAGE_H = 850, 1100
MARGIN = 60
GUTTER = 40
INDENT = 24

_FONTS = ("Georgia", "Times New Roman", "Helvetica", "Garamond", "Verdana")
_LEADER_STYLES = (". ", ".", "…", "·", "‥")
_WORDS = (
    "analysis methods results discussion background overview evaluation design data model "
    "training inference layout parsing tables formulas code reading order related work "
    "experiments ablation limitations appendix architecture documents benchmarks metrics "
    "synthesis rendering annotation corpus baseline scaling efficiency robustness deployment"
).split()


class RangeError(ValueError):
    pass


def normalize_leaders(text: str) -> str:
    """Replace any dotted-leader run (dots, spaced dots, ellipsis glyphs) with the canonical run."""
    return _LEADER_RE.sub(f" {CANONICAL_LEADER} ", text).strip()


def _title(rng: random.Random) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(2, 5))).capitalize()


def gen_catalog(
    entries: int, columns: int, seed: int, prompts: PromptTable = PromptTable(), page_id: str | None = None
) -> GeneratedPage:
    if not 10 <= entries <= 60:
        raise RangeError(f"catalog entries must be in [10, 60], got {entries}")
    if columns not in (1, 2):
        raise RangeError(f"columns must be 1 or 2, got {columns}")
    rng = random.Random(f"catalog:{entries}:{columns}:{seed}")
    page_id = page_id or f"catalog-{seed}-{entries}x{columns}"
    font = rng.choice(_FONTS)
    leader_style = rng.choice(_LEADER_STYLES)

    rows = math.ceil(entries / columns)
    row_h = min(36, (PAGE_H - 2 * MARGIN) // rows)
    size = round(row_h * 0.55, 1)
    col_w = (PAGE_W - 2 * MARGIN - GUTTER * (columns - 1)) // columns

    drawing = Drawing(PAGE_W, PAGE_H)
    elements = []
    contents = {}
    numbering: list[int] = []
    page_no = rng.randint(1, 5)
    depth = 0
    for k in range(entries):
        depth = 0 if k == 0 else rng.randint(0, min(3, depth + 1))
        numbering = numbering[: depth + 1]
        if len(numbering) <= depth:
            numbering.append(0)
        numbering[depth] += 1
        number = ".".join(str(n) for n in numbering)
        title = _title(rng)
        page_no += rng.randint(0, 6)

        col, row = divmod(k, rows)
        x0 = MARGIN + col * (col_w + GUTTER)
        box = BBox(x0 + depth * INDENT, MARGIN + row * row_h + 2, x0 + col_w, MARGIN + (row + 1) * row_h - 2)
        elements.append(LayoutElement(SemanticLabel.CATALOGUE, box, frozenset(), k))

        leader = (leader_style * 40)[: max(3, 40 - len(title) // 2)]
        raw = f"{number} {title} {leader} {page_no}"
        contents[k] = normalize_leaders(raw)
        baseline = box.y2 - (row_h - size) / 2
        drawing.text(box.x1, baseline, f"{number} {title} {leader}", size, font)
        drawing.text(box.x2, baseline, str(page_no), size, font, anchor="end")

    spec = PageSpec(
        page_id,
        PAGE_W,
        PAGE_H,
        DocumentType.DIGITAL,
        tuple(elements),
        contents,
        provenance={
            "generator": "catalog",
            "seed": seed,
            "entries": entries,
            "columns": columns,
            "font": font,
            "leader_style": leader_style,
        },
    )
    return GeneratedPage(spec, drawing, emit_fixture(spec, prompts))

"""Render parsed elements into one Markdown document in reading order."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace

from anchordoc.layout import DocumentType, SemanticLabel
from anchordoc.pipeline import DocumentOutput, ParsedElement, PipelineConfig, content_kind_for


class BlockKind(str, enum.Enum):
    HEADING = "heading"
    PARAGRAPH = "paragraph"
    TABLE_HTML = "table_html"
    FORMULA_DISPLAY = "formula_display"
    CODE_FENCE = "code_fence"
    CAPTION = "caption"
    FOOTNOTE = "footnote"
    MARGINALIA = "marginalia"
    FIGURE_REF = "figure_ref"
    LIST_BLOCK = "list_block"
    CATALOG_BLOCK = "catalog_block"
    REFERENCE_BLOCK = "reference_block"


class IncompatibleContent(ValueError):
    pass


MARGINALIA_LABELS = frozenset({SemanticLabel.HEADER, SemanticLabel.FOOT, SemanticLabel.WATERMARK})

_TEXT_BLOCKS = {
    SemanticLabel.PARA: BlockKind.PARAGRAPH,
    SemanticLabel.HALF_PARA: BlockKind.PARAGRAPH,
    SemanticLabel.ANNO: BlockKind.PARAGRAPH,
    SemanticLabel.LIST: BlockKind.LIST_BLOCK,
    SemanticLabel.REFERENCE: BlockKind.REFERENCE_BLOCK,
    SemanticLabel.CATALOGUE: BlockKind.CATALOG_BLOCK,
    SemanticLabel.FNOTE: BlockKind.FOOTNOTE,
    SemanticLabel.CAP: BlockKind.CAPTION,
    SemanticLabel.HEADER: BlockKind.MARGINALIA,
    SemanticLabel.FOOT: BlockKind.MARGINALIA,
    SemanticLabel.WATERMARK: BlockKind.MARGINALIA,
}


@dataclass(frozen=True)
class MarkdownBlock:
    kind: BlockKind
    body: str
    label: SemanticLabel
    level: int | None = None
    attrs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is BlockKind.HEADING and not (self.level and 1 <= self.level <= 6):
            raise ValueError(f"heading level must be in 1..6, got {self.level}")

    def render(self) -> str:
        if self.kind is BlockKind.HEADING:
            text = "#" * self.level + " " + " ".join(self.body.split())
        elif self.kind is BlockKind.FORMULA_DISPLAY:
            text = f"$$\n{self.body.strip()}\n$$"
        elif self.kind is BlockKind.CODE_FENCE:
            fence = _fence_for(self.body)
            text = f"{fence}\n{self.body}\n{fence}"
        elif self.kind is BlockKind.FIGURE_REF:
            text = f"![fig]({self.body})"
        else:
            text = self.body
        if self.attrs:
            text = f"<!-- attrs: {', '.join(self.attrs)} -->\n{text}"
        return text


def _fence_for(body: str) -> str:
    longest = max((len(run) for run in re.findall(r"`+", body)), default=0)
    return "`" * max(3, longest + 1)


def render_element(pe: ParsedElement) -> MarkdownBlock:
    label = pe.element.label
    attrs = tuple(sorted(a.value for a in pe.element.attrs))
    if pe.kind is not content_kind_for(label):
        raise IncompatibleContent(f"label {label.value} cannot carry {pe.kind.value} content")

    level = label.heading_level
    if level is not None:
        return MarkdownBlock(BlockKind.HEADING, pe.content, label, level, attrs)
    if label is SemanticLabel.TAB:
        return MarkdownBlock(BlockKind.TABLE_HTML, pe.content.strip(), label, attrs=attrs)
    if label is SemanticLabel.EQU:
        return MarkdownBlock(BlockKind.FORMULA_DISPLAY, pe.content, label, attrs=attrs)
    if label is SemanticLabel.CODE:
        return MarkdownBlock(BlockKind.CODE_FENCE, pe.content, label, attrs=attrs)
    if label is SemanticLabel.FIG:
        return MarkdownBlock(BlockKind.FIGURE_REF, pe.content, label, attrs=attrs)
    return MarkdownBlock(_TEXT_BLOCKS[label], pe.content.strip(), label, attrs=attrs)


_HYPHEN_END = re.compile(r"[^\W\d_]-$")


def _join_fragments(first: str, second: str, dehyphenate: bool) -> str:
    head = first.rstrip()
    tail = second.lstrip()
    if dehyphenate and _HYPHEN_END.search(head):
        return head[:-1] + tail
    return f"{head} {tail}"


def merge_spanning_paragraphs(blocks: list[MarkdownBlock], dehyphenate: bool = True) -> list[MarkdownBlock]:
    """Join each spanning-paragraph fragment with the paragraph that continues it."""
    out: list[MarkdownBlock] = []
    for block in blocks:
        prev = out[-1] if out else None
        if (
            prev is not None
            and prev.label is SemanticLabel.HALF_PARA
            and block.label in (SemanticLabel.HALF_PARA, SemanticLabel.PARA)
        ):
            merged_attrs = tuple(sorted(set(prev.attrs) | set(block.attrs)))
            out[-1] = replace(
                block,
                body=_join_fragments(prev.body, block.body, dehyphenate),
                attrs=merged_attrs,
            )
        else:
            out.append(block)
    return out


def assemble(doc: DocumentOutput, config: PipelineConfig = PipelineConfig()) -> str:
    if doc.doc_type is DocumentType.PHOTOGRAPHED:
        return doc.holistic_text or ""
    blocks = [
        render_element(pe)
        for pe in sorted(doc.parsed, key=lambda p: p.element.order)
        if config.include_marginalia or pe.element.label not in MARGINALIA_LABELS
    ]
    blocks = merge_spanning_paragraphs(blocks, config.dehyphenate)
    rendered = [b.render() for b in blocks if b.body.strip()]
    return "\n\n".join(rendered)

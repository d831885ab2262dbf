from __future__ import annotations

import pytest

from anchordoc.assembler import (
    BlockKind,
    IncompatibleContent,
    MarkdownBlock,
    assemble,
    merge_spanning_paragraphs,
    render_element,
)
from anchordoc.layout import AttributeTag, BBox, DocumentType, LayoutElement, SemanticLabel
from anchordoc.pipeline import ContentKind, DocumentOutput, ParsedElement, PipelineConfig, Source, content_kind_for


def pe(label: str, content: str, order: int = 0, attrs=()) -> ParsedElement:
    lab = SemanticLabel(label)
    el = LayoutElement(lab, BBox(0, order * 10, 100, order * 10 + 9), frozenset(AttributeTag(a) for a in attrs), order)
    return ParsedElement(el, content_kind_for(lab), content, Source.MODEL_CALL)


def digital(*parsed) -> DocumentOutput:
    return DocumentOutput("d", DocumentType.DIGITAL, 100, 1000, tuple(parsed))


def block(label: str, body: str) -> MarkdownBlock:
    return render_element(pe(label, body))


def test_heading_levels():
    assert block("sec_0", "Overview").render() == "# Overview"
    assert block("sec_3", "Deep").render() == "#### Deep"
    assert block("sec_5", "Deepest").render() == "###### Deepest"


def test_formula_wrapper():
    assert block("equ", "E = mc^2").render() == "$$\nE = mc^2\n$$"


def test_code_keeps_indentation():
    rendered = block("code", "def f():\n    return 1").render()
    lines = rendered.split("\n")
    assert lines[0] == "```" and lines[-1] == "```"
    assert lines[2] == "    return 1"


def test_code_fence_grows_past_inner_backticks():
    rendered = block("code", "x = '```'").render()
    assert rendered.startswith("````\n") and rendered.endswith("\n````")


def test_table_and_figure():
    assert block("tab", " <table><tr><td>A</td></tr></table>\n").render() == "<table><tr><td>A</td></tr></table>"
    assert block("fig", "crops/d_0.png").render() == "![fig](crops/d_0.png)"


def test_attributes_become_a_comment():
    out = render_element(pe("para", "Ada Lovelace", attrs=["author"])).render()
    assert out == "<!-- attrs: author -->\nAda Lovelace"


def test_incompatible_content_rejected():
    el = LayoutElement(SemanticLabel.TAB, BBox(0, 0, 1, 1))
    bogus = ParsedElement.__new__(ParsedElement)
    object.__setattr__(bogus, "element", el)
    object.__setattr__(bogus, "kind", ContentKind.TEXT)
    object.__setattr__(bogus, "content", "x")
    object.__setattr__(bogus, "source", Source.MODEL_CALL)
    object.__setattr__(bogus, "error", None)
    with pytest.raises(IncompatibleContent):
        render_element(bogus)


def test_heading_level_bounds():
    with pytest.raises(ValueError):
        MarkdownBlock(BlockKind.HEADING, "x", SemanticLabel.SEC_0, level=7)


# -- spanning paragraphs ------------------------------------------------------------


def merged(*pairs, dehyphenate=True) -> list[str]:
    return [b.body for b in merge_spanning_paragraphs([block(l, t) for l, t in pairs], dehyphenate)]


def test_merge_with_space():
    assert merged(("half_para", "the quick"), ("para", "brown fox")) == ["the quick brown fox"]


def test_merge_elides_hyphen():
    assert merged(("half_para", "experi-"), ("para", "ment")) == ["experiment"]
    assert merged(("half_para", "experi-"), ("para", "ment"), dehyphenate=False) == ["experi- ment"]


def test_numeric_hyphen_kept():
    assert merged(("half_para", "pages 10-"), ("para", "12")) == ["pages 10- 12"]


def test_lone_fragment_passes_through():
    assert merged(("para", "a"), ("half_para", "tail")) == ["a", "tail"]


def test_fragment_chain():
    assert merged(("half_para", "one"), ("half_para", "two"), ("para", "three")) == ["one two three"]


def test_fragment_not_merged_into_heading():
    assert merged(("half_para", "end"), ("sec_1", "Next")) == ["end", "Next"]


# -- whole documents ----------------------------------------------------------------


def test_photographed_passthrough():
    doc = DocumentOutput("d", DocumentType.PHOTOGRAPHED, 10, 10, holistic_text="abc")
    assert assemble(doc) == "abc"


def test_heading_then_paragraph():
    assert assemble(digital(pe("sec_1", "Intro", 0), pe("para", "Hello", 1))) == "## Intro\n\nHello"


def test_marginalia_filtered_by_default():
    doc = digital(pe("header", "Running head", 0), pe("para", "Body", 1), pe("foot", "7", 2))
    assert assemble(doc) == "Body"
    assert assemble(doc, PipelineConfig(include_marginalia=True)) == "Running head\n\nBody\n\n7"


def test_order_not_list_position_decides():
    doc = digital(pe("para", "second", 1), pe("para", "first", 0))
    assert assemble(doc) == "first\n\nsecond"


def test_empty_bodies_dropped():
    doc = digital(pe("para", "a", 0), pe("para", "   ", 1), pe("para", "b", 2))
    assert assemble(doc) == "a\n\nb"

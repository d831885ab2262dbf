from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchordoc.layout import (
    AttributeTag,
    BBox,
    DocumentType,
    InvalidResult,
    LayoutElement,
    LayoutParseError,
    MalformedBBox,
    OutOfRange,
    SemanticLabel,
    StageOneResult,
    UnknownAttribute,
    UnknownDocType,
    UnknownLabel,
    convert_normalized_bbox,
    elements_in_order,
    format_element,
    parse_layout_sequence,
    serialize_layout_sequence,
    validate_layout,
)


def el(label="para", box=(0, 0, 10, 10), attrs=(), order=0):
    return LayoutElement(SemanticLabel(label), BBox(*box), frozenset(AttributeTag(a) for a in attrs), order)


def digital(*elements, w=1000, h=1000):
    return StageOneResult(DocumentType.DIGITAL, tuple(elements), w, h)


# -- vocabulary ------------------------------------------------------------------


def test_label_vocabulary_has_21_entries():
    assert len(SemanticLabel) == 21
    assert {"sec_0", "sec_5", "half_para", "catalogue", "watermark", "code", "list"} <= {l.value for l in SemanticLabel}


def test_attribute_vocabulary_is_deduplicated():
    assert len(AttributeTag) == 12
    assert len({t.value for t in AttributeTag}) == 12


@pytest.mark.parametrize(
    "label,level", [("sec_0", 1), ("sec_1", 2), ("sec_4", 5), ("sec_5", 6), ("para", None), ("cap", None)]
)
def test_heading_levels(label, level):
    assert SemanticLabel(label).heading_level == level


def test_parseable_excludes_figures_and_watermarks():
    assert not el("fig").parseable
    assert not el("watermark").parseable
    assert el("tab").parseable and el("code").parseable


# -- bbox --------------------------------------------------------------------------


def test_bbox_geometry():
    a, b = BBox(0, 0, 10, 10), BBox(5, 0, 15, 10)
    assert a.area == 100 and a.width == 10 and a.height == 10
    assert a.intersection(b) == 50
    assert a.iou(b) == pytest.approx(50 / 150)
    assert a.iou(BBox(20, 20, 30, 30)) == 0.0
    assert BBox(-5, 3, 120, 50).clamp(100, 40) == BBox(0, 3, 100, 40)
    assert not BBox(3, 0, 3, 5).is_well_formed()


# -- parsing -----------------------------------------------------------------------


def test_parse_two_elements():
    result = parse_layout_sequence("digital document\n[sec_0] 100,40,800,90\n[para] 100,120,800,400", 896, 1280)
    assert result.doc_type is DocumentType.DIGITAL
    assert [(e.label, e.order) for e in result.elements] == [(SemanticLabel.SEC_0, 0), (SemanticLabel.PARA, 1)]
    assert result.elements[0].bbox == BBox(100, 40, 800, 90)


def test_photographed_terminates_generation():
    result = parse_layout_sequence("photographed document", 896, 1280)
    assert result.doc_type is DocumentType.PHOTOGRAPHED
    assert result.elements == ()


def test_lines_after_photographed_are_ignored_with_warning():
    result = parse_layout_sequence("photographed document\n[para] 1,1,5,5", 100, 100)
    assert result.elements == ()
    assert result.warnings


def test_zero_width_box_is_malformed():
    with pytest.raises(MalformedBBox):
        parse_layout_sequence("digital document\n[para] 100,400,100,500", 896, 1280)


def test_unknown_doc_type():
    with pytest.raises(UnknownDocType):
        parse_layout_sequence("scanned document", 100, 100)


def test_unknown_label_reports_line():
    with pytest.raises(UnknownLabel) as info:
        parse_layout_sequence("digital document\n[para] 1,1,5,5\n[poem] 1,6,5,9", 100, 100)
    assert info.value.line_no == 3


def test_unknown_attribute():
    with pytest.raises(UnknownAttribute):
        parse_layout_sequence("digital document\n[para]{shiny} 1,1,5,5", 100, 100)


@pytest.mark.parametrize("line", ["[para] 1,2,3", "[para] a,b,c,d", "[para] 1.5,2,3,4", "[para]", "para 1,2,3,4"])
def test_malformed_lines(line):
    with pytest.raises(LayoutParseError):
        parse_layout_sequence("digital document\n" + line, 100, 100)


def test_attributes_and_blank_lines():
    text = "digital document\n\n[para]{author,page_num} 10,20,30,40\n  \n[tab]{} 10,50,90,90\n"
    result = parse_layout_sequence(text, 100, 100)
    assert result.elements[0].attrs == {AttributeTag.AUTHOR, AttributeTag.PAGE_NUM}
    assert result.elements[1].attrs == frozenset()


def test_out_of_page_box_is_clamped_with_warning():
    result = parse_layout_sequence("digital document\n[para] -5,10,150,50", 100, 100)
    assert result.elements[0].bbox == BBox(0, 10, 100, 50)
    assert result.warnings


def test_box_entirely_off_page_is_malformed():
    with pytest.raises(MalformedBBox):
        parse_layout_sequence("digital document\n[para] 150,10,180,50", 100, 100)


def test_invalid_utf8_is_a_parse_error():
    with pytest.raises(LayoutParseError):
        parse_layout_sequence(b"digital document\n[para] 1,1,5,5\xff", 100, 100)


def test_bytes_input_accepted():
    result = parse_layout_sequence(b"digital document\n[para] 1,1,5,5", 100, 100)
    assert len(result.elements) == 1


# -- serialising -------------------------------------------------------------------


def test_serialize_photographed():
    assert serialize_layout_sequence(StageOneResult(DocumentType.PHOTOGRAPHED, (), 10, 10)) == "photographed document"


def test_serialize_with_attribute():
    result = digital(el("para", (10, 20, 30, 40), ["author"]))
    assert serialize_layout_sequence(result) == "digital document\n[para]{author} 10,20,30,40"


def test_attributes_are_emitted_in_canonical_order():
    a = format_element(el(attrs=["meta_doi", "author"]))
    b = format_element(el(attrs=["author", "meta_doi"]))
    assert a == b


def test_serialize_rejects_invalid_result():
    with pytest.raises(InvalidResult) as info:
        serialize_layout_sequence(digital(el(order=0), el(order=0)))
    assert [v.kind for v in info.value.violations] == ["OrderDuplicate"]


# -- normalized coordinates ------------------------------------------------------------


def test_normalized_bbox_products():
    assert convert_normalized_bbox(0.5, 0.5, 0.75, 0.75, 896, 896) == BBox(448, 448, 672, 672)
    assert convert_normalized_bbox(0, 0, 1, 1, 640, 480) == BBox(0, 0, 640, 480)


def test_quantization_step_is_about_nine_pixels():
    a = convert_normalized_bbox(0.10, 0.1, 0.5, 0.5, 896, 896)
    b = convert_normalized_bbox(0.11, 0.1, 0.5, 0.5, 896, 896)
    assert b.x1 - a.x1 == 9
    assert 0.01 * 896 == pytest.approx(8.96)


def test_normalized_bbox_range_checked():
    with pytest.raises(OutOfRange):
        convert_normalized_bbox(0, 0, 1.2, 1, 100, 100)
    with pytest.raises(MalformedBBox):
        convert_normalized_bbox(0.5, 0, 0.5, 1, 100, 100)


# -- validation --------------------------------------------------------------------


def test_valid_result_has_no_violations():
    result = digital(el(order=0), el(box=(0, 20, 10, 30), order=1), el("tab", (0, 40, 50, 60), order=2))
    assert validate_layout(result) == []


def test_duplicate_order_is_one_violation():
    result = digital(el(order=0), el(order=1), el(order=1))
    kinds = [v.kind for v in validate_layout(result)]
    assert kinds.count("OrderDuplicate") == 1


def test_box_past_right_edge():
    result = digital(el(box=(900, 0, 1050, 10)))
    assert [v.kind for v in validate_layout(result)] == ["OutOfBounds"]


def test_order_gaps_and_photographed_elements():
    assert "OrderGap" in {v.kind for v in validate_layout(digital(el(order=0), el(order=2)))}
    photo = StageOneResult(DocumentType.PHOTOGRAPHED, (el(),), 100, 100)
    assert [v.kind for v in validate_layout(photo)] == ["PhotographedWithElements"]


def test_elements_in_order_sorts_by_order():
    items = [el(order=2), el(order=0), el(order=1)]
    assert [e.order for e in elements_in_order(items)] == [0, 1, 2]


# -- round trip --------------------------------------------------------------------


@st.composite
def stage_one_results(draw):
    w = draw(st.integers(2, 4000))
    h = draw(st.integers(2, 4000))
    if draw(st.booleans()) and draw(st.booleans()):
        return StageOneResult(DocumentType.PHOTOGRAPHED, (), w, h)
    n = draw(st.integers(0, 8))
    elements = []
    for order in range(n):
        x1 = draw(st.integers(0, w - 1))
        y1 = draw(st.integers(0, h - 1))
        box = BBox(x1, y1, draw(st.integers(x1 + 1, w)), draw(st.integers(y1 + 1, h)))
        attrs = draw(st.frozensets(st.sampled_from(list(AttributeTag)), max_size=3))
        elements.append(LayoutElement(draw(st.sampled_from(list(SemanticLabel))), box, attrs, order))
    return StageOneResult(DocumentType.DIGITAL, tuple(elements), w, h)


@settings(max_examples=300, deadline=None)
@given(stage_one_results())
def test_round_trip_property(result):
    assert parse_layout_sequence(serialize_layout_sequence(result), result.page_w, result.page_h) == result

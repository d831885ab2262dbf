from __future__ import annotations

import io
import json
import time

import pytest
from PIL import Image

from anchordoc.backend import FixtureTable, MockBackend, ModelRequest, ModelResponse, TransportError
from anchordoc.layout import BBox, DocumentType, LayoutElement, LayoutParseError, SemanticLabel, UnknownDocType
from anchordoc.pipeline import (
    ContentKind,
    DegenerateRegion,
    DocumentOutput,
    NotParseable,
    PageImage,
    ParsedElement,
    PipelineConfig,
    PromptTable,
    Source,
    Stage2BatchError,
    crop_box,
    crop_region,
    parse_document,
    run_stage1,
    run_stage2_elements,
    run_stage2_holistic,
    select_prompt,
)

P = PromptTable()


def element(label: str, order: int, box=None) -> LayoutElement:
    return LayoutElement(SemanticLabel(label), box or BBox(10, 10 + 30 * order, 190, 35 + 30 * order), order=order)


def page(w: int = 200, h: int = 400, page_id: str = "pg") -> PageImage:
    return PageImage.blank(page_id, w, h)


def layout_fixture(text: str, page_id: str = "pg") -> FixtureTable:
    table = FixtureTable()
    table.add(f"{page_id}/layout", P.layout, text)
    return table


# -- prompts ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "label,prompt",
    [
        ("tab", "Parse the table in the image."),
        ("equ", "Read formula in the image."),
        ("code", "Read code in the image."),
        ("cap", "Read text in the image."),
        ("para", "Read text in the image."),
        ("sec_2", "Read text in the image."),
        ("catalogue", "Read text in the image."),
    ],
)
def test_select_prompt(label, prompt):
    assert select_prompt(SemanticLabel(label), P) == prompt


@pytest.mark.parametrize("label", ["fig", "watermark"])
def test_unparsed_labels_have_no_prompt(label):
    with pytest.raises(NotParseable):
        select_prompt(SemanticLabel(label), P)


def test_prompt_overrides(tmp_path):
    path = tmp_path / "prompts.json"
    path.write_text(json.dumps({"table": "Convert the table to HTML."}))
    prompts = PromptTable.load(path)
    assert prompts.table == "Convert the table to HTML." and prompts.formula == P.formula
    with pytest.raises(ValueError):
        PromptTable.from_mapping({"tables": "x"})
    with pytest.raises(ValueError):
        PromptTable(code="")


# -- crops -----------------------------------------------------------------------------


def test_identity_crop():
    assert crop_box(BBox(0, 0, 50, 40), 0, 50, 40) == BBox(0, 0, 50, 40)


def test_padding_is_clamped():
    assert crop_box(BBox(10, 10, 20, 20), 5, 15, 15) == BBox(5, 5, 15, 15)


def test_box_right_of_page_is_degenerate():
    with pytest.raises(DegenerateRegion):
        crop_box(BBox(60, 0, 80, 10), 0, 50, 40)


def test_crop_region_pixels():
    img = Image.new("RGB", (20, 20), "white")
    img.putpixel((12, 7), (255, 0, 0))
    box, crop = crop_region(PageImage("p", img), BBox(10, 5, 15, 10))
    assert crop.size == (5, 5)
    assert crop.getpixel((2, 2)) == (255, 0, 0)


def test_page_image_rejects_other_formats():
    buf = io.BytesIO()
    Image.new("RGB", (2, 2)).save(buf, format="GIF")
    with pytest.raises(ValueError):
        PageImage.from_bytes(buf.getvalue(), "g")


# -- stage 1 -----------------------------------------------------------------------------


def test_stage1_photographed():
    result = run_stage1(page(), MockBackend(layout_fixture("photographed document")), PipelineConfig())
    assert result.doc_type is DocumentType.PHOTOGRAPHED and result.elements == ()


def test_stage1_digital_lines_in_order():
    text = "digital document\n[sec_0] 10,10,190,30\n[para] 10,40,190,80\n[tab] 10,90,190,200\n[equ] 10,210,190,240"
    result = run_stage1(page(), MockBackend(layout_fixture(text)), PipelineConfig())
    assert [e.label.value for e in result.elements] == ["sec_0", "para", "tab", "equ"]
    assert [e.order for e in result.elements] == [0, 1, 2, 3]


def test_stage1_bad_doc_type_keeps_raw_text():
    with pytest.raises(UnknownDocType) as info:
        run_stage1(page(), MockBackend(layout_fixture("scanned document")), PipelineConfig())
    assert info.value.raw_response == "scanned document"


# -- stage 2 -----------------------------------------------------------------------------


def test_holistic_passthrough_single_call():
    table = layout_fixture("photographed document")
    table.add("pg/holistic", P.holistic, "Hello\nWorld")
    backend = MockBackend(table)
    doc = parse_document(page(), backend)
    assert doc.holistic_text == "Hello\nWorld" and doc.parsed == ()
    assert len(backend.calls_with_suffix("holistic")) == 1
    assert backend.call_count == 2


def test_holistic_failure_surfaces():
    class Down:
        def request(self, req: ModelRequest) -> ModelResponse:
            raise TransportError("connection refused")

    with pytest.raises(TransportError):
        run_stage2_holistic(page(), Down(), PipelineConfig())


def test_three_parseable_elements_three_calls():
    elements = [element("para", 0), element("tab", 1), element("equ", 2)]
    table = FixtureTable()
    table.add("pg/0", P.paragraph, "p")
    table.add("pg/1", P.table, "<table></table>")
    table.add("pg/2", P.formula, "x")
    backend = MockBackend(table)
    results = run_stage2_elements(page(), elements, backend, PipelineConfig())
    assert backend.call_count == 3
    assert [r.content for r in results] == ["p", "<table></table>", "x"]
    assert [r.kind for r in results] == [ContentKind.TEXT, ContentKind.TABLE_HTML, ContentKind.FORMULA_LATEX]


def test_figures_and_watermarks_skip_the_model(tmp_path):
    elements = [element("para", 0), element("fig", 1), element("watermark", 2), element("para", 3)]
    table = FixtureTable()
    table.add("pg/0", P.paragraph, "a")
    table.add("pg/3", P.paragraph, "b")
    backend = MockBackend(table)
    results = run_stage2_elements(page(), elements, backend, PipelineConfig(crop_dir=tmp_path / "crops"))
    assert backend.call_count == 2
    fig, mark = results[1], results[2]
    assert fig.kind is ContentKind.FIGURE_PLACEHOLDER and fig.content == "crops/pg_1.png"
    assert fig.source is Source.SYNTHESIZED
    assert (tmp_path / "crops" / "pg_1.png").exists()
    assert mark.content == "" and mark.source is Source.SYNTHESIZED


def test_one_failure_is_recorded_not_raised():
    table = FixtureTable()
    table.add("pg/0", P.paragraph, "ok")
    results = run_stage2_elements(page(), [element("para", 0), element("para", 1)], MockBackend(table), PipelineConfig())
    assert not results[0].failed
    assert results[1].failed and results[1].error.startswith("FixtureMiss")


def test_all_failures_raise_batch_error():
    with pytest.raises(Stage2BatchError) as info:
        run_stage2_elements(page(), [element("para", 0), element("code", 1)], MockBackend(FixtureTable()), PipelineConfig())
    assert len(info.value.results) == 2 and all(r.failed for r in info.value.results)


def test_parallel_wall_time():
    elements = [element("para", k) for k in range(8)]
    table = FixtureTable(default_delay_ms=100)
    for k in range(8):
        table.add(f"pg/{k}", P.paragraph, str(k))
    backend = MockBackend(table)
    start = time.perf_counter()
    results = run_stage2_elements(page(), elements, backend, PipelineConfig(concurrency=4))
    elapsed = time.perf_counter() - start
    assert [r.content for r in results] == [str(k) for k in range(8)]
    assert elapsed <= 2 * 2 * 0.100
    assert elapsed < 8 * 0.100
    assert backend.high_water == 4


def test_crop_padding_changes_request_size():
    table = FixtureTable()
    table.add("pg/0", P.paragraph, "x")
    backend = MockBackend(table)
    run_stage2_elements(page(), [element("para", 0, BBox(50, 50, 60, 60))], backend, PipelineConfig(crop_padding=4))
    assert (backend.calls[0].image.width, backend.calls[0].image.height) == (18, 18)


# -- full document ----------------------------------------------------------------------


def test_digital_document_output_in_order():
    text = "digital document\n[sec_1] 10,10,190,30\n[para] 10,40,190,80"
    table = layout_fixture(text)
    table.add("pg/0", P.paragraph, "Intro")
    table.add("pg/1", P.paragraph, "Hello")
    doc = parse_document(page(), MockBackend(table), PipelineConfig(concurrency=2))
    assert doc.doc_type is DocumentType.DIGITAL and doc.holistic_text is None
    assert [p.element.order for p in doc.parsed] == [0, 1]
    assert set(doc.timing) == {"stage1", "stage2", "total"}


def test_unclassified_photographed_page_becomes_one_anchor():
    table = layout_fixture("photographed document")
    table.add("pg/holistic", P.holistic, "text")
    backend = MockBackend(table)
    with pytest.raises(Stage2BatchError) as info:
        parse_document(page(), backend, PipelineConfig(classify=False))
    (only,) = info.value.results
    assert only.element.bbox == BBox(0, 0, 200, 400)
    assert backend.calls_with_suffix("holistic") == []


def test_stage1_failure_propagates():
    with pytest.raises(LayoutParseError):
        parse_document(page(), MockBackend(layout_fixture("digital document\n[para] 1,1")))


def test_document_output_invariants():
    with pytest.raises(ValueError):
        DocumentOutput("p", DocumentType.PHOTOGRAPHED, 10, 10)
    with pytest.raises(ValueError):
        DocumentOutput("p", DocumentType.DIGITAL, 10, 10, holistic_text="x")
    with pytest.raises(ValueError):
        ParsedElement(element("tab", 0), ContentKind.TEXT, "x", Source.MODEL_CALL)


def test_document_json_round_trip():
    table = layout_fixture("digital document\n[para]{author} 10,10,190,30\n[fig] 10,40,190,80")
    table.add("pg/0", P.paragraph, "Ada")
    doc = parse_document(page(), MockBackend(table))
    obj = doc.to_json()
    assert obj["schema"] == "anchordoc.document/1" and obj["doc_type"] == "digital"
    assert obj["elements"][0]["attrs"] == ["author"]
    assert DocumentOutput.from_json(json.loads(json.dumps(obj))) == doc
    assert "timing" not in doc.to_json(include_timing=False)

"""Two-stage orchestration: layout + classification, then hybrid content parsing."""

from __future__ import annotations

import enum
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from PIL import Image

from anchordoc.backend import BackendError, ImagePayload, ModelBackend, ModelRequest, region_id
from anchordoc.layout import (
    AttributeTag,
    BBox,
    DocumentType,
    LayoutElement,
    LayoutParseError,
    SemanticLabel,
    StageOneResult,
    parse_layout_sequence,
)

log = logging.getLogger(__name__)

# Alternative holistic phrasing usable through a prompt override.
HOLISTIC_PROMPT_PHOTOGRAPHED = "Parse the content of this photographed document."


@dataclass(frozen=True)
class PromptTable:
    layout: str = "Parse the reading order of this document."
    holistic: str = "Read text in the image."
    formula: str = "Read formula in the image."
    code: str = "Read code in the image."
    table: str = "Parse the table in the image."
    paragraph: str = "Read text in the image."

    def __post_init__(self) -> None:
        empty = [f.name for f in fields(self) if not getattr(self, f.name)]
        if empty:
            raise ValueError(f"prompts must be non-empty: {', '.join(empty)}")

    @classmethod
    def from_mapping(cls, data: dict[str, str]) -> PromptTable:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown prompt keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> PromptTable:
        return cls.from_mapping(json.loads(Path(path).read_text(encoding="utf-8")))


class ContentKind(str, enum.Enum):
    TEXT = "text"
    TABLE_HTML = "table_html"
    FORMULA_LATEX = "formula_latex"
    CODE_BLOCK = "code_block"
    FIGURE_PLACEHOLDER = "figure_placeholder"


class Source(str, enum.Enum):
    MODEL_CALL = "model_call"
    SYNTHESIZED = "synthesized"


_KIND_BY_LABEL = {
    SemanticLabel.TAB: ContentKind.TABLE_HTML,
    SemanticLabel.EQU: ContentKind.FORMULA_LATEX,
    SemanticLabel.CODE: ContentKind.CODE_BLOCK,
    SemanticLabel.FIG: ContentKind.FIGURE_PLACEHOLDER,
}


def content_kind_for(label: SemanticLabel) -> ContentKind:
    return _KIND_BY_LABEL.get(label, ContentKind.TEXT)


class NotParseable(ValueError):
    pass


class DegenerateRegion(ValueError):
    pass


class Stage2BatchError(BackendError):
    """Every model call of a page failed; ``results`` keeps the per-element record."""

    def __init__(self, results: list[ParsedElement]):
        self.results = results
        errors = sorted({r.error for r in results if r.error})
        super().__init__(f"all {sum(r.failed for r in results)} element request(s) failed: {errors[:3]}")


@dataclass(frozen=True)
class ParsedElement:
    element: LayoutElement
    kind: ContentKind
    content: str
    source: Source
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def __post_init__(self) -> None:
        if self.kind is not content_kind_for(self.element.label):
            raise ValueError(f"{self.kind.value} content is incompatible with label {self.element.label.value}")


@dataclass(frozen=True)
class DocumentOutput:
    page_id: str
    doc_type: DocumentType
    page_w: int
    page_h: int
    parsed: tuple[ParsedElement, ...] = ()
    holistic_text: str | None = None
    timing: dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.doc_type is DocumentType.PHOTOGRAPHED:
            if self.holistic_text is None or self.parsed:
                raise ValueError("photographed output carries holistic text and no elements")
        elif self.holistic_text is not None:
            raise ValueError("digital output carries parsed elements, not holistic text")

    @property
    def failed_elements(self) -> list[ParsedElement]:
        return [p for p in self.parsed if p.failed]

    def to_json(self, include_timing: bool = True) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "schema": "anchordoc.document/1",
            "id": self.page_id,
            "doc_type": self.doc_type.name.lower(),
            "page_w": self.page_w,
            "page_h": self.page_h,
            "elements": [
                {
                    "order": p.element.order,
                    "label": p.element.label.value,
                    "bbox": p.element.bbox.as_list(),
                    "attrs": sorted(a.value for a in p.element.attrs),
                    "content_kind": p.kind.value,
                    "content": p.content,
                    "source": p.source.value,
                    "error": p.error,
                }
                for p in self.parsed
            ],
            "holistic_text": self.holistic_text,
        }
        if include_timing:
            obj["timing"] = {k: round(v, 6) for k, v in self.timing.items()}
        return obj

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> DocumentOutput:
        parsed = []
        for row in obj["elements"]:
            element = LayoutElement(
                SemanticLabel(row["label"]),
                BBox(*row["bbox"]),
                frozenset(AttributeTag(a) for a in row.get("attrs", [])),
                int(row["order"]),
            )
            parsed.append(
                ParsedElement(
                    element,
                    ContentKind(row["content_kind"]),
                    row["content"],
                    Source(row.get("source", Source.MODEL_CALL.value)),
                    row.get("error"),
                )
            )
        return cls(
            obj["id"],
            DocumentType[obj["doc_type"].upper()],
            int(obj["page_w"]),
            int(obj["page_h"]),
            tuple(parsed),
            obj.get("holistic_text"),
            dict(obj.get("timing", {})),
        )


@dataclass(frozen=True)
class PipelineConfig:
    concurrency: int = 4
    crop_padding: int = 0
    include_marginalia: bool = False
    prompts: PromptTable = PromptTable()
    # Where figure crops are written; ``None`` keeps them in memory only.
    crop_dir: Path | None = None
    dehyphenate: bool = True
    # False reproduces the no-classification ablation: every page is parsed element-wise.
    classify: bool = True

    def __post_init__(self) -> None:
        if self.concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {self.concurrency}")
        if self.crop_padding < 0:
            raise ValueError(f"crop_padding must be >= 0, got {self.crop_padding}")

    def with_(self, **changes: Any) -> PipelineConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class PageImage:
    page_id: str
    image: Image.Image
    # Original encoded bytes, resent untouched for full-page requests.
    source: bytes | None = None

    @property
    def width(self) -> int:
        return self.image.width

    @property
    def height(self) -> int:
        return self.image.height

    def payload(self) -> ImagePayload:
        if self.source is not None:
            return ImagePayload(self.width, self.height, data=self.source)
        return ImagePayload.from_image(self.image)

    @classmethod
    def from_bytes(cls, data: bytes, page_id: str) -> PageImage:
        image = Image.open(io.BytesIO(data))
        image.load()
        if image.format not in ("PNG", "JPEG"):
            raise ValueError(f"unsupported page image format {image.format}; expected PNG or JPEG")
        return cls(page_id, image, data)

    @classmethod
    def open(cls, path: str | Path, page_id: str | None = None) -> PageImage:
        path = Path(path)
        return cls.from_bytes(path.read_bytes(), page_id or path.stem)

    @classmethod
    def blank(cls, page_id: str, width: int, height: int) -> PageImage:
        return cls(page_id, Image.new("RGB", (width, height), "white"))


def crop_box(bbox: BBox, padding: int, page_w: int, page_h: int) -> BBox:
    """Padded box intersected with the page; raises :class:`DegenerateRegion` if empty."""
    box = bbox.expand(padding).clamp(page_w, page_h)
    if not box.is_well_formed():
        raise DegenerateRegion(f"box {bbox.as_list()} (padding {padding}) does not intersect the {page_w}x{page_h} page")
    return box


def crop_region(page: PageImage, bbox: BBox, padding: int = 0) -> tuple[BBox, Image.Image]:
    box = crop_box(bbox, padding, page.width, page.height)
    return box, page.image.crop((box.x1, box.y1, box.x2, box.y2))


def select_prompt(label: SemanticLabel, prompts: PromptTable) -> str:
    if label in (SemanticLabel.FIG, SemanticLabel.WATERMARK):
        raise NotParseable(f"{label.value} elements are not sent to the model")
    if label is SemanticLabel.TAB:
        return prompts.table
    if label is SemanticLabel.EQU:
        return prompts.formula
    if label is SemanticLabel.CODE:
        return prompts.code
    return prompts.paragraph


def figure_ref(page_id: str, order: int) -> str:
    return f"crops/{page_id}_{order}.png"


def run_stage1(page: PageImage, backend: ModelBackend, config: PipelineConfig) -> StageOneResult:
    req = ModelRequest(config.prompts.layout, page.payload(), region_id(page.page_id, "layout"))
    text = backend.request(req).text
    try:
        result = parse_layout_sequence(text, page.width, page.height)
    except LayoutParseError as exc:
        exc.raw_response = text
        raise
    for w in result.warnings:
        log.warning("page=%s layout: %s", page.page_id, w)
    return result


def run_stage2_holistic(page: PageImage, backend: ModelBackend, config: PipelineConfig) -> str:
    req = ModelRequest(config.prompts.holistic, page.payload(), region_id(page.page_id, "holistic"))
    return backend.request(req).text


def _parse_one(page: PageImage, element: LayoutElement, backend: ModelBackend, config: PipelineConfig) -> ParsedElement:
    kind = content_kind_for(element.label)
    if element.label is SemanticLabel.WATERMARK:
        return ParsedElement(element, kind, "", Source.SYNTHESIZED)
    try:
        _, crop = crop_region(page, element.bbox, config.crop_padding)
    except DegenerateRegion as exc:
        return ParsedElement(element, kind, "", Source.SYNTHESIZED, str(exc))
    if element.label is SemanticLabel.FIG:
        ref = figure_ref(page.page_id, element.order)
        if config.crop_dir is not None:
            target = Path(config.crop_dir) / Path(ref).name
            target.parent.mkdir(parents=True, exist_ok=True)
            crop.save(target, format="PNG")
        return ParsedElement(element, kind, ref, Source.SYNTHESIZED)

    req = ModelRequest(
        select_prompt(element.label, config.prompts),
        ImagePayload.from_image(crop),
        region_id(page.page_id, element.order),
    )
    try:
        text = backend.request(req).text
    except BackendError as exc:
        log.warning("page=%s element=%d (%s) failed: %s", page.page_id, element.order, element.label.value, exc)
        return ParsedElement(element, kind, "", Source.MODEL_CALL, f"{type(exc).__name__}: {exc}")
    return ParsedElement(element, kind, text, Source.MODEL_CALL)


def run_stage2_elements(
    page: PageImage,
    elements: tuple[LayoutElement, ...] | list[LayoutElement],
    backend: ModelBackend,
    config: PipelineConfig,
) -> list[ParsedElement]:
    """Parse every element concurrently with at most ``config.concurrency`` in flight.

    Results land in slots indexed by reading order, so the output never depends
    on completion order. Raises :class:`Stage2BatchError` when every model call
    failed.
    """
    ordered = sorted(elements, key=lambda e: e.order)
    slots: list[ParsedElement | None] = [None] * len(ordered)
    if ordered:
        with ThreadPoolExecutor(max_workers=min(config.concurrency, len(ordered))) as pool:
            futures = {pool.submit(_parse_one, page, e, backend, config): i for i, e in enumerate(ordered)}
            for future, i in futures.items():
                slots[i] = future.result()
    results: list[ParsedElement] = slots  # type: ignore[assignment]
    attempted = [r for r in results if r.element.parseable]
    if attempted and all(r.failed for r in attempted):
        raise Stage2BatchError(results)
    return results


def parse_document(page: PageImage, backend: ModelBackend, config: PipelineConfig = PipelineConfig()) -> DocumentOutput:
    t0 = time.perf_counter()
    layout = run_stage1(page, backend, config)
    t1 = time.perf_counter()

    if layout.doc_type is DocumentType.PHOTOGRAPHED and config.classify:
        text = run_stage2_holistic(page, backend, config)
        t2 = time.perf_counter()
        out = DocumentOutput(page.page_id, layout.doc_type, page.width, page.height, (), text)
    else:
        elements = layout.elements
        if layout.doc_type is DocumentType.PHOTOGRAPHED:
            # Without classification there is no holistic route: the whole page becomes one text anchor.
            elements = (LayoutElement(SemanticLabel.PARA, BBox(0, 0, page.width, page.height), frozenset(), 0),)
        parsed = run_stage2_elements(page, elements, backend, config)
        t2 = time.perf_counter()
        out = DocumentOutput(page.page_id, DocumentType.DIGITAL, page.width, page.height, tuple(parsed))

    timing = {"stage1": t1 - t0, "stage2": t2 - t1, "total": t2 - t0}
    out.timing.update(timing)
    log.info(
        "page=%s doc_type=%s elements=%d stage1=%.3fs stage2=%.3fs",
        page.page_id, layout.doc_type.name.lower(), len(out.parsed), timing["stage1"], timing["stage2"],
    )
    return out

"""Two-stage document parsing: a layout pass emits typed anchors, a content pass parses each one."""

from anchordoc.assembler import assemble
from anchordoc.backend import FixtureTable, MockBackend, ModelBackend, ModelRequest, ModelResponse
from anchordoc.layout import (
    BBox,
    DocumentType,
    LayoutElement,
    SemanticLabel,
    StageOneResult,
    parse_layout_sequence,
    serialize_layout_sequence,
)
from anchordoc.pipeline import DocumentOutput, PageImage, PipelineConfig, PromptTable, parse_document

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "DocumentOutput",
    "DocumentType",
    "FixtureTable",
    "LayoutElement",
    "MockBackend",
    "ModelBackend",
    "ModelRequest",
    "ModelResponse",
    "PageImage",
    "PipelineConfig",
    "PromptTable",
    "SemanticLabel",
    "StageOneResult",
    "assemble",
    "parse_document",
    "parse_layout_sequence",
    "serialize_layout_sequence",
]

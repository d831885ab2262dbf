"""Per-page scoring against ground truth and corpus-level aggregation."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Any

from anchordoc.datagen.spec import SCHEMA as SPEC_SCHEMA
from anchordoc.datagen.spec import PageSpec
from anchordoc.layout import DocumentType, LayoutElement, SemanticLabel, StageOneResult
from anchordoc.metrics.editdistance import normalized_edit_distance
from anchordoc.metrics.formula import formula_token_score
from anchordoc.metrics.matching import match_elements, reading_order_edit
from anchordoc.metrics.teds import teds, teds_s
from anchordoc.pipeline import DocumentOutput

log = logging.getLogger(__name__)

DOCUMENT_SCHEMA = "anchordoc.document/1"
METRICS = ("text_edit", "formula_score", "table_teds", "table_teds_s", "order_edit")

# Excluded from page text on both sides, matching the assembler's default.
_NON_TEXT = frozenset(
    {
        SemanticLabel.TAB,
        SemanticLabel.EQU,
        SemanticLabel.FIG,
        SemanticLabel.WATERMARK,
        SemanticLabel.HEADER,
        SemanticLabel.FOOT,
    }
)


class EmptyInput(ValueError):
    pass


class NoOverlap(ValueError):
    pass


@dataclass(frozen=True)
class EvalPage:
    """Either side of a comparison, normalised from a page spec or a parse output."""

    id: str
    doc_type: DocumentType
    page_w: int
    page_h: int
    elements: tuple[LayoutElement, ...] = ()
    contents: dict[int, str] = field(default_factory=dict)
    holistic_text: str | None = None

    @classmethod
    def from_spec(cls, spec: PageSpec) -> EvalPage:
        return cls(spec.id, spec.doc_type, spec.page_w, spec.page_h, spec.elements, dict(spec.contents), spec.holistic_text)

    @classmethod
    def from_document(cls, doc: DocumentOutput) -> EvalPage:
        elements = tuple(p.element for p in doc.parsed)
        contents = {p.element.order: p.content for p in doc.parsed if p.element.parseable}
        return cls(doc.page_id, doc.doc_type, doc.page_w, doc.page_h, elements, contents, doc.holistic_text)

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> EvalPage:
        schema = obj.get("schema")
        if schema == SPEC_SCHEMA:
            return cls.from_spec(PageSpec.from_json(obj))
        if schema == DOCUMENT_SCHEMA:
            return cls.from_document(DocumentOutput.from_json(obj))
        raise ValueError(f"unrecognised page schema {schema!r}")

    @property
    def ordered(self) -> list[LayoutElement]:
        return sorted(self.elements, key=lambda e: e.order)

    def text(self, full: bool = False) -> str:
        if self.holistic_text is not None:
            return self.holistic_text
        return "\n".join(
            self.contents.get(e.order, "")
            for e in self.ordered
            if e.parseable and (full or e.label not in _NON_TEXT)
        )

    def stage_one(self) -> StageOneResult:
        return StageOneResult(self.doc_type, tuple(self.ordered), self.page_w, self.page_h)


def overall_score(
    text_edit: float | None, formula_score: float | None, table_teds: float | None, order_edit: float | None
) -> float | None:
    parts = []
    if text_edit is not None:
        parts.append(100.0 * (1.0 - text_edit))
    if formula_score is not None:
        parts.append(formula_score)
    if table_teds is not None:
        parts.append(table_teds)
    if order_edit is not None:
        parts.append(100.0 * (1.0 - order_edit))
    return fmean(parts) if parts else None


@dataclass(frozen=True)
class EvalReport:
    """Scores for one page or a whole corpus.

    ``text_edit``/``order_edit`` are in [0, 1] (lower is better); the others are
    on a 0-100 scale. ``None`` marks a component the page does not have.
    """

    id: str
    text_edit: float | None = None
    formula_score: float | None = None
    table_teds: float | None = None
    table_teds_s: float | None = None
    order_edit: float | None = None
    per_element: tuple[dict[str, Any], ...] = ()
    documents: int = 1

    @property
    def overall(self) -> float | None:
        return overall_score(self.text_edit, self.formula_score, self.table_teds, self.order_edit)

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"id": self.id}
        for name in METRICS:
            obj[name] = getattr(self, name)
        obj["overall"] = self.overall
        return obj

    def row(self) -> str:
        def fmt(v: float | None) -> str:
            return "-" if v is None else f"{v:.2f}"

        return (
            f"{self.id}: overall={fmt(self.overall)} text_edit={fmt(self.text_edit)} "
            f"formula={fmt(self.formula_score)} teds={fmt(self.table_teds)} "
            f"teds_s={fmt(self.table_teds_s)} order_edit={fmt(self.order_edit)}"
        )


def _mean(values: list[float]) -> float | None:
    return fmean(values) if values else None


def evaluate_page(pred: EvalPage, gt: EvalPage) -> EvalReport:
    either_photo = DocumentType.PHOTOGRAPHED in (pred.doc_type, gt.doc_type)
    gt_text = gt.text(full=either_photo)
    pred_text = pred.text(full=either_photo)
    text_edit = normalized_edit_distance(pred_text, gt_text) if gt_text or pred_text else None

    if gt.doc_type is not DocumentType.DIGITAL:
        return EvalReport(gt.id, text_edit=text_edit)

    pred_els = pred.ordered if pred.doc_type is DocumentType.DIGITAL else []
    gt_els = gt.ordered
    pred_of = match_elements(pred_els, gt_els).pred_for_gt()

    tables, tables_s, formulas, breakdown = [], [], [], []
    for j, g in enumerate(gt_els):
        if g.label not in (SemanticLabel.TAB, SemanticLabel.EQU):
            continue
        truth = gt.contents.get(g.order, "")
        i = pred_of.get(j)
        guess = pred.contents.get(pred_els[i].order, "") if i is not None else None
        if g.label is SemanticLabel.TAB:
            score = 100.0 * teds(guess, truth) if guess is not None else 0.0
            score_s = 100.0 * teds_s(guess, truth) if guess is not None else 0.0
            tables.append(score)
            tables_s.append(score_s)
            breakdown.append({"order": g.order, "label": g.label.value, "table_teds": score, "table_teds_s": score_s})
        else:
            score = formula_token_score(guess, truth) if guess is not None else 0.0
            formulas.append(score)
            breakdown.append({"order": g.order, "label": g.label.value, "formula_score": score})

    if pred.doc_type is DocumentType.DIGITAL:
        order_edit = reading_order_edit(pred.stage_one(), gt.stage_one()) if gt_els else None
    else:
        order_edit = 1.0 if gt_els else None

    return EvalReport(
        gt.id,
        text_edit=text_edit,
        formula_score=_mean(formulas),
        table_teds=_mean(tables),
        table_teds_s=_mean(tables_s),
        order_edit=order_edit,
        per_element=tuple(breakdown),
    )


def aggregate(reports: list[EvalReport], id: str = "aggregate") -> EvalReport:
    """Mean of each metric over the pages that have it."""
    if not reports:
        raise EmptyInput("cannot aggregate zero reports")
    means = {name: _mean([getattr(r, name) for r in reports if getattr(r, name) is not None]) for name in METRICS}
    return EvalReport(id, documents=len(reports), **means)


def _load_dir(path: Path) -> dict[str, EvalPage]:
    pages = {}
    for f in sorted(path.glob("*.json")):
        try:
            obj = json.loads(f.read_text(encoding="utf-8"))
        except ValueError:
            log.warning("skipping %s: not JSON", f)
            continue
        if not isinstance(obj, dict) or obj.get("schema") not in (SPEC_SCHEMA, DOCUMENT_SCHEMA):
            continue
        pages[f.stem] = EvalPage.from_json(obj)
    return pages


def evaluate_dirs(pred_dir: str | Path, gt_dir: str | Path) -> tuple[list[EvalReport], EvalReport, list[str]]:
    """Score every id present in both directories; returns reports, aggregate and warnings."""
    preds = _load_dir(Path(pred_dir))
    gts = _load_dir(Path(gt_dir))
    shared = sorted(set(preds) & set(gts))
    warnings = []
    if set(preds) != set(gts):
        only_pred = sorted(set(preds) - set(gts))
        only_gt = sorted(set(gts) - set(preds))
        if only_pred:
            warnings.append(f"{len(only_pred)} prediction(s) without ground truth: {only_pred[:5]}")
        if only_gt:
            warnings.append(f"{len(only_gt)} ground-truth page(s) without prediction: {only_gt[:5]}")
    if not shared:
        raise NoOverlap(f"no shared page ids between {pred_dir} and {gt_dir}")
    reports = [evaluate_page(preds[i], gts[i]) for i in shared]
    return reports, aggregate(reports), warnings


def report_json(reports: list[EvalReport], total: EvalReport, config: dict[str, Any]) -> dict[str, Any]:
    agg = total.to_json()
    agg["documents"] = total.documents
    return {
        "per_document": [r.to_json() for r in reports],
        "aggregate": agg,
        "config": config,
    }

"""One-to-one element matching and reading-order edit distance."""

from __future__ import annotations

from dataclasses import dataclass

from anchordoc.layout import DocumentType, LayoutElement, StageOneResult
from anchordoc.metrics.editdistance import normalized_edit_distance

IOU_THRESHOLD = 0.5


class BothMustBeDigital(ValueError):
    pass


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int, float], ...]  # (pred index, gt index, IoU)
    unmatched_pred: tuple[int, ...]
    unmatched_gt: tuple[int, ...]

    def gt_for_pred(self) -> dict[int, int]:
        return {p: g for p, g, _ in self.pairs}

    def pred_for_gt(self) -> dict[int, int]:
        return {g: p for p, g, _ in self.pairs}


def match_elements(
    pred: list[LayoutElement] | tuple[LayoutElement, ...],
    gt: list[LayoutElement] | tuple[LayoutElement, ...],
    threshold: float = IOU_THRESHOLD,
) -> Matching:
    """Greedy one-to-one matching by descending IoU; pairs below ``threshold`` are dropped.

    Indices refer to positions in the given lists. Ties break on the lower
    prediction index, then the lower ground-truth index.
    """
    candidates = []
    for i, p in enumerate(pred):
        for j, g in enumerate(gt):
            iou = p.bbox.iou(g.bbox)
            if iou >= threshold:
                candidates.append((-iou, i, j))
    candidates.sort()
    used_p: set[int] = set()
    used_g: set[int] = set()
    pairs = []
    for neg_iou, i, j in candidates:
        if i in used_p or j in used_g:
            continue
        used_p.add(i)
        used_g.add(j)
        pairs.append((i, j, -neg_iou))
    pairs.sort()
    return Matching(
        tuple(pairs),
        tuple(i for i in range(len(pred)) if i not in used_p),
        tuple(j for j in range(len(gt)) if j not in used_g),
    )


def reading_order_edit(pred: StageOneResult, gt: StageOneResult) -> float:
    """Edit distance between matched ground-truth indices in predicted order and the true order.

    Unmatched ground-truth elements surface as deletions.
    """
    if pred.doc_type is not DocumentType.DIGITAL or gt.doc_type is not DocumentType.DIGITAL:
        raise BothMustBeDigital("reading-order edit needs two digital layouts")
    pred_els = sorted(pred.elements, key=lambda e: e.order)
    gt_els = sorted(gt.elements, key=lambda e: e.order)
    gt_of = match_elements(pred_els, gt_els).gt_for_pred()
    predicted = [gt_of[i] for i in range(len(pred_els)) if i in gt_of]
    return normalized_edit_distance(predicted, list(range(len(gt_els))))

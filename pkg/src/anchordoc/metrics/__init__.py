"""Evaluation metrics: normalised edit distance, TEDS, formula token score, matching, reports."""

from anchordoc.metrics.editdistance import (
    edit_distance_matrix,
    levenshtein,
    normalized_edit_distance,
    normalized_edit_distance_matrix,
)
from anchordoc.metrics.formula import formula_token_score, tokenize_latex
from anchordoc.metrics.matching import IOU_THRESHOLD, BothMustBeDigital, Matching, match_elements, reading_order_edit
from anchordoc.metrics.report import (
    EmptyInput,
    EvalPage,
    EvalReport,
    NoOverlap,
    aggregate,
    evaluate_dirs,
    evaluate_page,
    report_json,
)
from anchordoc.metrics.teds import Node, parse_table, teds, teds_s, tree_edit_distance, tree_similarity

__all__ = [
    "BothMustBeDigital",
    "EmptyInput",
    "EvalPage",
    "EvalReport",
    "IOU_THRESHOLD",
    "Matching",
    "NoOverlap",
    "Node",
    "aggregate",
    "edit_distance_matrix",
    "evaluate_dirs",
    "evaluate_page",
    "formula_token_score",
    "levenshtein",
    "match_elements",
    "normalized_edit_distance",
    "normalized_edit_distance_matrix",
    "parse_table",
    "reading_order_edit",
    "report_json",
    "teds",
    "teds_s",
    "tokenize_latex",
    "tree_edit_distance",
    "tree_similarity",
]

"""Token-level LaTeX comparison, a stand-in for render-based formula metrics."""

from __future__ import annotations

import re

from anchordoc.metrics.editdistance import normalized_edit_distance

# Control words, control symbols, then any single non-space character.
_TOKEN_RE = re.compile(r"\\[A-Za-z]+|\\.|\S", re.DOTALL)


def tokenize_latex(latex: str) -> list[str]:
    """Split LaTeX into commands, braces and single symbols; whitespace is dropped."""
    return _TOKEN_RE.findall(latex)


def formula_token_score(pred_latex: str, gt_latex: str) -> float:
    """``100 * (1 - normalized token edit distance)``; 100 for identical token streams."""
    return 100.0 * (1.0 - normalized_edit_distance(tokenize_latex(pred_latex), tokenize_latex(gt_latex)))

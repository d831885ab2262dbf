from __future__ import annotations

import random
from collections import defaultdict

import pytest

from anchordoc.layout import AttributeTag, BBox, DocumentType, LayoutElement, SemanticLabel, StageOneResult

# -- shared builders -------------------------------------------------------------

LABELS = list(SemanticLabel)
ATTRS = list(AttributeTag)


def random_bbox(rng: random.Random, page_w: int, page_h: int) -> BBox:
    x1, x2 = sorted(rng.sample(range(page_w + 1), 2))
    y1, y2 = sorted(rng.sample(range(page_h + 1), 2))
    return BBox(x1, y1, x2, y2)


def random_stage_one(rng: random.Random, max_elements: int = 12, photographed_rate: float = 0.1) -> StageOneResult:
    page_w, page_h = rng.randint(2, 2000), rng.randint(2, 2000)
    if rng.random() < photographed_rate:
        return StageOneResult(DocumentType.PHOTOGRAPHED, (), page_w, page_h)
    elements = tuple(
        LayoutElement(
            rng.choice(LABELS),
            random_bbox(rng, page_w, page_h),
            frozenset(rng.sample(ATTRS, rng.choice((0, 0, 1, 2)))),
            order,
        )
        for order in range(rng.randint(0, max_elements))
    )
    return StageOneResult(DocumentType.DIGITAL, elements, page_w, page_h)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)


# -- acceptance summary ----------------------------------------------------------

_criteria: dict[int, str] = {}
_outcomes: dict[int, list[bool]] = defaultdict(list)
_nodes: dict[str, int] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            number, title = mark.args
            _criteria[number] = title
            _nodes[item.nodeid] = number


def pytest_runtest_logreport(report):
    number = _nodes.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or report.failed:
        _outcomes[number].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        results = _outcomes.get(number, [])
        ok = bool(results) and all(results)
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {_criteria[number]}")

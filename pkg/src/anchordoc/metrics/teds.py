"""Tree-edit-distance similarity for HTML tables (TEDS and structure-only TEDS-S).

Ordered tree edit distance is computed with the Zhang-Shasha keyroot dynamic
program, unit insert/delete costs and a pluggable relabel cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Callable

TABLE_TAGS = frozenset({"table", "thead", "tbody", "tfoot", "tr", "td", "th"})
CELL_TAGS = frozenset({"td", "th"})
_SECTION_TAGS = frozenset({"thead", "tbody", "tfoot"})


@dataclass
class Node:
    label: str
    children: list[Node] = field(default_factory=list)
    text: str = ""
    colspan: int = 1
    rowspan: int = 1

    def size(self) -> int:
        count, stack = 0, [self]
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children)
        return count

    def __repr__(self) -> str:
        inner = ",".join(repr(c) for c in self.children)
        head = self.label + (f'"{self.text}"' if self.text else "")
        return f"{head}({inner})" if self.children else head


def label_cost(a: Node, b: Node) -> int:
    return 0 if a.label == b.label else 1


def _postorder(root: Node) -> tuple[list[Node], list[int], list[int]]:
    """Postorder nodes, leftmost-leaf index of each node, and the keyroots."""
    nodes: list[Node] = []
    leftmost: list[int] = []
    stack: list[tuple[Node, int]] = [(root, 0)]
    first_leaf: list[int] = []
    while stack:
        node, child = stack.pop()
        if child == 0:
            first_leaf.append(-1)
        if child < len(node.children):
            stack.append((node, child + 1))
            stack.append((node.children[child], 0))
            continue
        index = len(nodes)
        lm = first_leaf.pop()
        if lm < 0:
            lm = index
        nodes.append(node)
        leftmost.append(lm)
        if first_leaf and first_leaf[-1] < 0:
            first_leaf[-1] = lm
    last_with: dict[int, int] = {}
    for i, lm in enumerate(leftmost):
        last_with[lm] = i
    return nodes, leftmost, sorted(last_with.values())


def tree_edit_distance(t1: Node, t2: Node, relabel: Callable[[Node, Node], int] = label_cost) -> int:
    nodes1, l1, kr1 = _postorder(t1)
    nodes2, l2, kr2 = _postorder(t2)
    ren = [[relabel(a, b) for b in nodes2] for a in nodes1]
    td = [[0] * len(nodes2) for _ in nodes1]

    for i in kr1:
        li = l1[i]
        rows = i - li + 2
        for j in kr2:
            lj = l2[j]
            cols = j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for y in range(1, cols):
                fd[0][y] = y
            for x in range(1, rows):
                i1 = li + x - 1
                cur = fd[x]
                prev = fd[x - 1]
                cur[0] = x
                ren_i = ren[i1]
                td_i = td[i1]
                whole_i = l1[i1] == li
                p = l1[i1] - li
                for y in range(1, cols):
                    j1 = lj + y - 1
                    best = prev[y] + 1
                    if cur[y - 1] + 1 < best:
                        best = cur[y - 1] + 1
                    if whole_i and l2[j1] == lj:
                        sub = prev[y - 1] + ren_i[j1]
                        if sub < best:
                            best = sub
                        td_i[j1] = best
                    else:
                        sub = fd[p][l2[j1] - lj] + td_i[j1]
                        if sub < best:
                            best = sub
                    cur[y] = best
    return td[-1][-1]


def tree_similarity(t1: Node | None, t2: Node | None, relabel: Callable[[Node, Node], int] = label_cost) -> float:
    """``1 - TED / max(|t1|, |t2|)``; a missing tree counts as empty."""
    if t1 is None and t2 is None:
        return 1.0
    if t1 is None or t2 is None:
        return 0.0
    return 1.0 - tree_edit_distance(t1, t2, relabel) / max(t1.size(), t2.size())


class _TableBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root: Node | None = None
        self.stack: list[Node] = []
        self.text: list[list[str]] = []

    def _pop_until(self, stop: Callable[[Node], bool]) -> None:
        while len(self.stack) > 1 and not stop(self.stack[-1]):
            self._close()

    def _close(self) -> None:
        node = self.stack.pop()
        if node.label in CELL_TAGS:
            node.text = " ".join("".join(self.text.pop()).split())

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag not in TABLE_TAGS:
            return
        if not self.stack:
            if tag != "table" or self.root is not None:
                return
            self.root = Node("table")
            self.stack.append(self.root)
            return
        if tag in CELL_TAGS:
            self._pop_until(lambda n: n.label not in CELL_TAGS)
        elif tag == "tr":
            self._pop_until(lambda n: n.label not in CELL_TAGS and n.label != "tr")
        elif tag in _SECTION_TAGS:
            self._pop_until(lambda n: n.label == "table")
        node = Node(tag)
        if tag in CELL_TAGS:
            values = dict(attrs)
            node.colspan = _span(values.get("colspan"))
            node.rowspan = _span(values.get("rowspan"))
            self.text.append([])
        self.stack[-1].children.append(node)
        self.stack.append(node)

    def handle_endtag(self, tag: str) -> None:
        if tag not in TABLE_TAGS or not self.stack:
            return
        if not any(n.label == tag for n in self.stack):
            return
        while self.stack[-1].label != tag:
            self._close()
        self._close()

    def handle_data(self, data: str) -> None:
        if self.text:
            self.text[-1].append(data)


def _span(value: str | None) -> int:
    try:
        return max(1, int(value)) if value is not None else 1
    except ValueError:
        return 1


def parse_table(html: str) -> Node | None:
    """Build the tree of the first ``<table>`` in ``html``; ``None`` if there is none."""
    builder = _TableBuilder()
    builder.feed(html)
    builder.close()
    while len(builder.stack) > 0:
        builder._close()
    return builder.root


def _cell_cost(structure_only: bool) -> Callable[[Node, Node], int]:
    def cost(a: Node, b: Node) -> int:
        if a.label != b.label:
            return 1
        if a.label in CELL_TAGS:
            if a.colspan != b.colspan or a.rowspan != b.rowspan:
                return 1
            if not structure_only and a.text != b.text:
                return 1
        return 0

    return cost


def _score(pred_html: str, gt_html: str, structure_only: bool) -> float:
    pred = parse_table(pred_html or "")
    gt = parse_table(gt_html or "")
    if pred is None and gt is None:
        # two non-tables are only equal when both are blank
        return 1.0 if not (pred_html or "").strip() and not (gt_html or "").strip() else 0.0
    return tree_similarity(pred, gt, _cell_cost(structure_only))


def teds(pred_html: str, gt_html: str) -> float:
    return _score(pred_html, gt_html, structure_only=False)


def teds_s(pred_html: str, gt_html: str) -> float:
    return _score(pred_html, gt_html, structure_only=True)

"""Technical pages built around a code listing with exact indentation ground truth."""

from __future__ import annotations

import enum
import random

from anchordoc.datagen.fixtures import GeneratedPage, emit_fixture
from anchordoc.datagen.render import Drawing, Polygon, draw_block, table_rows
from anchordoc.datagen.spec import PageSpec
from anchordoc.datagen.templates import TEMPLATES
from anchordoc.layout import BBox, DocumentType, LayoutElement, SemanticLabel
from anchordoc.pipeline import PromptTable


class Language(str, enum.Enum):
    CPP = "cpp"
    PYTHON = "python"
    GO = "go"
    JAVASCRIPT = "javascript"

    @property
    def indent_unit(self) -> str:
        return {"cpp": "    ", "python": "    ", "go": "\t", "javascript": "  "}[self.value]

    @property
    def display(self) -> str:
        return {"cpp": "C++", "python": "Python", "go": "Go", "javascript": "JavaScript"}[self.value]


FONT_FAMILIES = ("DejaVu Sans Mono", "Courier New", "Fira Code", "Source Code Pro", "Consolas")
COLOR_SCHEMES = {
    "paper": ("#ffffff", "#1f1f1f"),
    "solarized": ("#fdf6e3", "#586e75"),
    "github": ("#f6f8fa", "#24292e"),
    "monokai": ("#272822", "#f8f8f2"),
    "dracula": ("#282a36", "#f8f8f2"),
}

PAGE_W, PAGE_H = 900, 1200
MARGIN = 60
CODE_LINE_H = 20
CODE_SIZE = 14

_VERBS = ("compute", "load", "merge", "parse", "scan", "count", "filter", "render", "collect", "resolve")
_NOUNS = ("items", "values", "tokens", "records", "rows", "pages", "blocks", "entries", "nodes", "scores")
_CLASSES = ("Buffer", "Parser", "Reader", "Cache", "Layout", "Tracker", "Matrix", "Session")


def _ident(rng: random.Random, language: Language) -> dict[str, str]:
    verb, noun = rng.choice(_VERBS), rng.choice(_NOUNS)
    fn = f"{verb}_{noun}" if language is Language.PYTHON else verb + noun.capitalize()
    var = rng.choice(_NOUNS)
    item = var[:-1] if var.endswith("s") else var + "_item"
    return {
        "fn": fn,
        "var": var,
        "item": item,
        "cls": rng.choice(_CLASSES),
        "n": str(rng.randint(2, 99)),
        "m": str(rng.randint(1, 9)),
    }


def _reindent(source: str, unit: str) -> list[str]:
    lines = []
    for line in source.split("\n"):
        stripped = line.lstrip(" ")
        depth = (len(line) - len(stripped)) // 4 if stripped else 0
        lines.append(unit * depth + stripped)
    return lines


def style_for(seed: int) -> tuple[str, str, str]:
    """``(style_id, font_family, scheme_name)`` for a seed; 25 combinations."""
    rng = random.Random(f"code-style:{seed}")
    font_idx = rng.randrange(len(FONT_FAMILIES))
    scheme = rng.choice(sorted(COLOR_SCHEMES))
    return f"{font_idx}:{scheme}", FONT_FAMILIES[font_idx], scheme


def gen_code_page(
    language: Language | str, seed: int, prompts: PromptTable = PromptTable(), page_id: str | None = None
) -> GeneratedPage:
    language = Language(language)
    rng = random.Random(f"code:{language.value}:{seed}")
    names = _ident(rng, language)
    template_idx = rng.randrange(len(TEMPLATES[language.value]))
    code_lines = _reindent(TEMPLATES[language.value][template_idx].format(**names), language.indent_unit)
    code = "\n".join(code_lines)
    indentation = [line[: len(line) - len(line.lstrip(" \t"))] for line in code_lines]
    depth = max(len(ind) // len(language.indent_unit) for ind in indentation)
    style_id, font, scheme = style_for(seed)
    bg, fg = COLOR_SCHEMES[scheme]
    page_id = page_id or f"code-{language.value}-{seed}"

    heading = f"{language.display} example: {names['fn']}"
    intro = f"The listing below shows how {names['fn']} handles {names['var']} in {language.display}."
    caption = f"Listing 1. {names['fn']} ({len(code_lines)} lines, nesting depth {depth})."
    table = (
        "<table><tr><th>Language</th><th>Lines</th><th>Depth</th></tr>"
        f"<tr><td>{language.display}</td><td>{len(code_lines)}</td><td>{depth}</td></tr></table>"
    )
    n = rng.randint(3, 12)
    formula = rng.choice(
        [
            f"T(n) = O(n^{{{max(depth, 1)}}})",
            f"\\sum_{{i=1}}^{{{n}}} i = {n * (n + 1) // 2}",
            f"\\frac{{a + b}}{{{names['m']}}} \\leq \\sqrt{{{n}}}",
        ]
    )

    right = PAGE_W - MARGIN
    y = MARGIN
    blocks: list[tuple[SemanticLabel, int, str]] = [
        (SemanticLabel.SEC_1, 40, heading),
        (SemanticLabel.PARA, 30, intro),
        (SemanticLabel.CODE, len(code_lines) * CODE_LINE_H + 12, code),
        (SemanticLabel.CAP, 28, caption),
        (SemanticLabel.TAB, 2 * 28 + 8, table),
        (SemanticLabel.EQU, 40, formula),
    ]
    drawing = Drawing(PAGE_W, PAGE_H)
    elements = []
    contents = {}
    for order, (label, height, text) in enumerate(blocks):
        box = BBox(MARGIN, y, right, y + height)
        elements.append(LayoutElement(label, box, frozenset(), order))
        contents[order] = text
        if label is SemanticLabel.CODE:
            drawing.items.append(Polygon(((box.x1, box.y1), (box.x2, box.y1), (box.x2, box.y2), (box.x1, box.y2)), bg))
            inner = BBox(box.x1 + 8, box.y1 + 2, box.x2, box.y2)
            draw_block(drawing, inner, code_lines, CODE_SIZE, font, fg, CODE_LINE_H)
        elif label is SemanticLabel.TAB:
            draw_block(drawing, box, table_rows(text), 16, "sans-serif", "#111111", 28)
        else:
            size = 24 if label is SemanticLabel.SEC_1 else 16
            draw_block(drawing, box, [text], size, "serif", "#111111")
        y += height + 24

    spec = PageSpec(
        page_id,
        PAGE_W,
        PAGE_H,
        DocumentType.DIGITAL,
        tuple(elements),
        contents,
        provenance={
            "generator": "code",
            "seed": seed,
            "language": language.value,
            "template": template_idx,
            "style_id": style_id,
            "font": font,
            "color_scheme": scheme,
            "nesting_depth": depth,
            "indentation": indentation,
        },
    )
    return GeneratedPage(spec, drawing, emit_fixture(spec, prompts))

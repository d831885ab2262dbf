"""Vector drawings of synthetic pages, serialised to SVG 1.1 or rasterised to PNG."""

from __future__ import annotations

import functools
import io
import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable
from xml.sax.saxutils import escape, quoteattr

from PIL import Image, ImageDraw, ImageFont

Point = tuple[float, float]


@dataclass(frozen=True)
class Text:
    x: float
    y: float  # baseline
    text: str
    size: float
    font: str = "sans-serif"
    fill: str = "#000000"
    anchor: str = "start"  # or "end"
    angle: float = 0.0  # degrees, clockwise


@dataclass(frozen=True)
class Polygon:
    points: tuple[Point, ...]
    fill: str = "none"
    stroke: str | None = None


@dataclass
class Drawing:
    width: int
    height: int
    background: str = "#ffffff"
    items: list[Text | Polygon] = field(default_factory=list)

    def text(self, *args, **kwargs) -> None:
        self.items.append(Text(*args, **kwargs))

    def map_points(self, fn: Callable[[float, float], Point], background: str | None = None) -> Drawing:
        """Apply a point transform; text follows its anchor and turns with the local baseline."""
        items: list[Text | Polygon] = []
        for item in self.items:
            if isinstance(item, Polygon):
                items.append(replace(item, points=tuple(fn(x, y) for x, y in item.points)))
            else:
                x, y = fn(item.x, item.y)
                ax, ay = fn(item.x + item.size, item.y)
                angle = math.degrees(math.atan2(ay - y, ax - x))
                items.append(replace(item, x=x, y=y, angle=round(angle, 2)))
        return Drawing(self.width, self.height, background or self.background, items)

    def to_svg(self) -> str:
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="{self.background}"/>',
        ]
        for item in self.items:
            if isinstance(item, Polygon):
                pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in item.points)
                stroke = f' stroke="{item.stroke}"' if item.stroke else ""
                out.append(f'<polygon points="{pts}" fill="{item.fill}"{stroke}/>')
            else:
                rotate = f' transform="rotate({_num(item.angle)} {_num(item.x)} {_num(item.y)})"' if item.angle else ""
                anchor = ' text-anchor="end"' if item.anchor == "end" else ""
                out.append(
                    f'<text x="{_num(item.x)}" y="{_num(item.y)}" font-family={quoteattr(item.font)} '
                    f'font-size="{_num(item.size)}" fill="{item.fill}"{anchor}{rotate} '
                    f'xml:space="preserve">{escape(_display(item.text))}</text>'
                )
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def to_image(self) -> Image.Image:
        image = Image.new("RGB", (self.width, self.height), self.background)
        draw = ImageDraw.Draw(image)
        for item in self.items:
            if isinstance(item, Polygon):
                draw.polygon(
                    [(round(x), round(y)) for x, y in item.points],
                    fill=None if item.fill == "none" else item.fill,
                    outline=item.stroke,
                )
            else:
                anchor = "rs" if item.anchor == "end" else "ls"
                draw.text((item.x, item.y), _display(item.text), fill=item.fill, font=_font(round(item.size)), anchor=anchor)
        return image

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        self.to_image().save(buf, format="PNG", optimize=False)
        return buf.getvalue()


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _display(text: str) -> str:
    return text.replace("\t", "    ")


@functools.lru_cache(maxsize=64)
def _font(size: int) -> ImageFont.FreeTypeFont:
    return ImageFont.load_default(size=max(6, size))


_TAG_RE = re.compile(r"<[^>]+>")


def table_rows(html: str) -> list[str]:
    """Visible rows of a simple HTML table, cells joined by a vertical bar."""
    rows = []
    for row in re.findall(r"<tr[^>]*>(.*?)</tr>", html, flags=re.S):
        cells = [_TAG_RE.sub("", c).strip() for c in re.findall(r"<t[dh][^>]*>(.*?)</t[dh]>", row, flags=re.S)]
        rows.append(" | ".join(cells))
    return rows or [_TAG_RE.sub("", html)]


def draw_block(drawing: Drawing, box, lines: list[str], size: float, font: str, fill: str, line_height: float | None = None) -> None:
    """Stack ``lines`` from the top-left of ``box`` (a BBox)."""
    lh = line_height or size * 1.3
    for k, line in enumerate(lines):
        drawing.text(box.x1, box.y1 + size + k * lh, line, size, font, fill)

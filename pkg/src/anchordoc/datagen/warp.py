"""Geometric simulation of photographed pages: perspective plus a sinusoidal crease."""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from anchordoc.datagen.fixtures import GeneratedPage, drawing_for_spec, emit_fixture
from anchordoc.datagen.render import Drawing, Polygon
from anchordoc.datagen.spec import PageSpec
from anchordoc.layout import DocumentType
from anchordoc.pipeline import PromptTable

Point = tuple[float, float]


class NonConvex(ValueError):
    pass


class AmplitudeTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class WarpParams:
    # Displacements of the top-left, top-right, bottom-right, bottom-left page corners.
    corners: tuple[Point, Point, Point, Point] = ((0, 0), (0, 0), (0, 0), (0, 0))
    crease_amplitude: float = 0.0
    crease_frequency: float = 0.0  # cycles per page along the crease axis
    crease_axis: str = "x"

    def quad(self, page_w: int, page_h: int) -> list[Point]:
        base = [(0, 0), (page_w, 0), (page_w, page_h), (0, page_h)]
        return [(x + dx, y + dy) for (x, y), (dx, dy) in zip(base, self.corners)]

    def validate(self, page_w: int, page_h: int) -> None:
        if self.crease_axis not in ("x", "y"):
            raise ValueError(f"crease axis must be 'x' or 'y', got {self.crease_axis!r}")
        if abs(self.crease_amplitude) >= 0.1 * page_h:
            raise AmplitudeTooLarge(
                f"crease amplitude {self.crease_amplitude} must stay below 10% of page height ({0.1 * page_h})"
            )
        if not is_convex(self.quad(page_w, page_h)):
            raise NonConvex(f"corner displacements {self.corners} fold the page quadrilateral")


def is_convex(quad: list[Point]) -> bool:
    """Strict convexity of a closed polygon (all turns the same sign, none straight)."""
    signs = set()
    n = len(quad)
    for i in range(n):
        (ax, ay), (bx, by), (cx, cy) = quad[i], quad[(i + 1) % n], quad[(i + 2) % n]
        cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        if cross == 0:
            return False
        signs.add(cross > 0)
    return len(signs) == 1


def homography(src: list[Point], dst: list[Point]) -> np.ndarray:
    rows = []
    rhs = []
    for (x, y), (u, v) in zip(src, dst):
        rows.append([x, y, 1, 0, 0, 0, -u * x, -u * y])
        rows.append([0, 0, 0, x, y, 1, -v * x, -v * y])
        rhs.extend([u, v])
    h = np.linalg.solve(np.array(rows, float), np.array(rhs, float))
    return np.append(h, 1.0).reshape(3, 3)


class PageWarp:
    """Point map: perspective homography followed by a crease displacement."""

    def __init__(self, params: WarpParams, page_w: int, page_h: int, phase: float):
        params.validate(page_w, page_h)
        self.params = params
        self.page_w = page_w
        self.page_h = page_h
        self.phase = phase
        corners = [(0, 0), (page_w, 0), (page_w, page_h), (0, page_h)]
        self.h = homography(corners, params.quad(page_w, page_h))

    def __call__(self, x: float, y: float) -> Point:
        hx, hy, hw = self.h @ np.array([x, y, 1.0])
        px, py = hx / hw, hy / hw
        p = self.params
        if p.crease_amplitude:
            if p.crease_axis == "x":
                py += p.crease_amplitude * math.sin(2 * math.pi * p.crease_frequency * x / self.page_w + self.phase)
            else:
                px += p.crease_amplitude * math.sin(2 * math.pi * p.crease_frequency * y / self.page_h + self.phase)
        return round(float(px), 3), round(float(py), 3)


def _outline(w: int, h: int, steps: int = 16) -> list[Point]:
    pts: list[Point] = []
    for k in range(steps):
        pts.append((w * k / steps, 0))
    for k in range(steps):
        pts.append((w, h * k / steps))
    for k in range(steps):
        pts.append((w - w * k / steps, h))
    for k in range(steps):
        pts.append((0, h - h * k / steps))
    return pts


def warp_photographed(
    source: PageSpec | GeneratedPage,
    params: WarpParams,
    seed: int,
    prompts: PromptTable = PromptTable(),
    page_id: str | None = None,
) -> GeneratedPage:
    """Photograph-like version of a digital page.

    The element list is dropped; the ground truth becomes the reading-order
    concatenation of element contents, and the warped element quads are kept
    in provenance.
    """
    if isinstance(source, GeneratedPage):
        spec, drawing = source.spec, source.drawing
    else:
        spec, drawing = source, drawing_for_spec(source)
    if spec.doc_type is not DocumentType.DIGITAL:
        raise ValueError("only digital pages can be warped")
    phase = random.Random(f"warp:{spec.id}:{seed}").uniform(0, 2 * math.pi)
    warp = PageWarp(params, spec.page_w, spec.page_h, phase)

    regions = []
    for e in sorted(spec.elements, key=lambda e: e.order):
        b = e.bbox
        quad = [warp(x, y) for x, y in ((b.x1, b.y1), (b.x2, b.y1), (b.x2, b.y2), (b.x1, b.y2))]
        regions.append({"order": e.order, "label": e.label.value, "quad": [list(p) for p in quad]})

    sheet = Polygon(tuple(_outline(spec.page_w, spec.page_h)), drawing.background)
    flat = Drawing(spec.page_w, spec.page_h, drawing.background, [sheet, *drawing.items])
    warped = flat.map_points(warp, background="#4a4038")

    photo = PageSpec(
        page_id or f"{spec.id}-photo",
        spec.page_w,
        spec.page_h,
        DocumentType.PHOTOGRAPHED,
        holistic_text=spec.reading_order_text(),
        provenance={
            "generator": "warp_photographed",
            "seed": seed,
            "source": spec.id,
            "source_provenance": spec.provenance,
            "params": {**asdict(params), "corners": [list(c) for c in params.corners]},
            "phase": round(phase, 6),
            "page_quad": [list(warp(x, y)) for x, y in ((0, 0), (spec.page_w, 0), (spec.page_w, spec.page_h), (0, spec.page_h))],
            "regions": regions,
        },
    )
    return GeneratedPage(photo, warped, emit_fixture(photo, prompts))


def random_warp_params(rng: random.Random, page_w: int, page_h: int) -> WarpParams:
    """Mild perspective and crease, always convex and within the amplitude bound."""
    jitter = 0.06
    corners = tuple(
        (round(rng.uniform(-jitter, jitter) * page_w, 1), round(rng.uniform(-jitter, jitter) * page_h, 1))
        for _ in range(4)
    )
    return WarpParams(
        corners,  # type: ignore[arg-type]
        crease_amplitude=round(rng.uniform(0.0, 0.04) * page_h, 1),
        crease_frequency=round(rng.uniform(0.5, 3.0), 2),
        crease_axis=rng.choice(("x", "y")),
    )

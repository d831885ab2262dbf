"""Synthetic pages (catalogs, code listings, photographed warps) with exact ground truth."""

from anchordoc.datagen.catalog import CANONICAL_LEADER, RangeError, gen_catalog, normalize_leaders
from anchordoc.datagen.code import COLOR_SCHEMES, FONT_FAMILIES, Language, gen_code_page, style_for
from anchordoc.datagen.corpus import KINDS, generate, write_corpus
from anchordoc.datagen.fixtures import GeneratedPage, drawing_for_spec, emit_fixture
from anchordoc.datagen.render import Drawing
from anchordoc.datagen.spec import InvalidPageSpec, PageSpec
from anchordoc.datagen.warp import AmplitudeTooLarge, NonConvex, WarpParams, random_warp_params, warp_photographed

__all__ = [
    "AmplitudeTooLarge",
    "CANONICAL_LEADER",
    "COLOR_SCHEMES",
    "Drawing",
    "FONT_FAMILIES",
    "GeneratedPage",
    "InvalidPageSpec",
    "KINDS",
    "Language",
    "NonConvex",
    "PageSpec",
    "RangeError",
    "WarpParams",
    "drawing_for_spec",
    "emit_fixture",
    "gen_catalog",
    "gen_code_page",
    "generate",
    "normalize_leaders",
    "random_warp_params",
    "style_for",
    "warp_photographed",
    "write_corpus",
]

"""Seeded corpora of generated pages and their on-disk layout."""

from __future__ import annotations

import random
from pathlib import Path
from typing import Iterator

from anchordoc.backend import FixtureTable
from anchordoc.datagen.catalog import gen_catalog
from anchordoc.datagen.code import Language, gen_code_page
from anchordoc.datagen.fixtures import GeneratedPage
from anchordoc.datagen.warp import random_warp_params, warp_photographed
from anchordoc.pipeline import PromptTable

KINDS = ("catalog", "code", "page-warped")


def generate(kind: str, count: int, seed: int, prompts: PromptTable = PromptTable()) -> Iterator[GeneratedPage]:
    if kind not in KINDS:
        raise ValueError(f"unknown corpus kind {kind!r}; expected one of {', '.join(KINDS)}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = random.Random(f"corpus:{kind}:{seed}")
    languages = list(Language)
    for i in range(count):
        sub = rng.randrange(1 << 30)
        page_id = f"{kind}-{seed}-{i:04d}"
        if kind == "catalog":
            yield gen_catalog(rng.randint(10, 60), rng.choice((1, 2)), sub, prompts, page_id=page_id)
        elif kind == "code":
            yield gen_code_page(languages[i % len(languages)], sub, prompts, page_id=page_id)
        else:
            if i % 2 == 0:
                base = gen_catalog(rng.randint(10, 60), rng.choice((1, 2)), sub, prompts)
            else:
                base = gen_code_page(languages[(i // 2) % len(languages)], sub, prompts)
            params = random_warp_params(rng, base.spec.page_w, base.spec.page_h)
            yield warp_photographed(base, params, sub, prompts, page_id=page_id)


def write_corpus(pages: list[GeneratedPage] | Iterator[GeneratedPage], out_dir: str | Path, images: bool = True) -> FixtureTable:
    """Write ``specs/``, ``svg/``, ``fixtures/`` (and ``images/``) plus a merged ``fixture.json``."""
    out = Path(out_dir)
    for sub in ("specs", "svg", "fixtures") + (("images",) if images else ()):
        (out / sub).mkdir(parents=True, exist_ok=True)
    merged = FixtureTable()
    for page in pages:
        pid = page.spec.id
        (out / "specs" / f"{pid}.json").write_text(page.spec.dumps(), encoding="utf-8")
        (out / "svg" / f"{pid}.svg").write_text(page.svg, encoding="utf-8")
        page.fixture.dump(out / "fixtures" / f"{pid}.json")
        if images:
            (out / "images" / f"{pid}.png").write_bytes(page.png())
        merged.entries.update(page.fixture.entries)
    merged.dump(out / "fixture.json")
    return merged

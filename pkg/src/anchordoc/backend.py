"""Model backend contract and the fixture-driven mock backend."""

from __future__ import annotations

import io
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from PIL import Image


class BackendError(Exception):
    """Base class for every failure raised by a model backend."""


class FixtureMiss(BackendError, KeyError):
    def __init__(self, region_id: str, prompt: str):
        self.region_id = region_id
        self.prompt = prompt
        super().__init__(f"no fixture entry for region {region_id!r} with prompt {prompt!r}")

    def __str__(self) -> str:
        return self.args[0]


class TransportError(BackendError):
    pass


class ProtocolError(BackendError):
    pass


class RateLimited(BackendError):
    def __init__(self, message: str, retry_after: float | None = None):
        self.retry_after = retry_after
        super().__init__(message)


class EncodingError(BackendError, ValueError):
    pass


_SIGNATURES = (
    (b"\x89PNG\r\n\x1a\n", "image/png"),
    (b"\xff\xd8\xff", "image/jpeg"),
    (b"GIF87a", "image/gif"),
    (b"GIF89a", "image/gif"),
)


def sniff_mime(data: bytes) -> str | None:
    for magic, mime in _SIGNATURES:
        if data.startswith(magic):
            return mime
    if data[:4] == b"RIFF" and data[8:12] == b"WEBP":
        return "image/webp"
    return None


class ImagePayload:
    """Raster handed to a backend: encoded bytes plus pixel dimensions.

    Built either from encoded bytes or from a PIL image; the latter is PNG
    encoded lazily so backends that never look at pixels pay nothing.
    """

    __slots__ = ("width", "height", "_data", "_image", "_lock")

    def __init__(self, width: int, height: int, data: bytes | None = None, image: Image.Image | None = None):
        if width <= 0 or height <= 0:
            raise ValueError(f"image dimensions must be positive, got {width}x{height}")
        if data is None and image is None:
            raise ValueError("ImagePayload needs encoded bytes or an image")
        self.width = width
        self.height = height
        self._data = data
        self._image = image
        self._lock = threading.Lock()

    @classmethod
    def from_image(cls, image: Image.Image) -> ImagePayload:
        return cls(image.width, image.height, image=image)

    @property
    def data(self) -> bytes:
        if self._data is None:
            with self._lock:
                if self._data is None:
                    buf = io.BytesIO()
                    self._image.save(buf, format="PNG")
                    self._data = buf.getvalue()
        return self._data

    def __repr__(self) -> str:
        return f"ImagePayload({self.width}x{self.height})"


@dataclass(frozen=True)
class ModelRequest:
    prompt: str
    image: ImagePayload
    region_id: str

    def __post_init__(self) -> None:
        if not self.prompt:
            raise EncodingError("prompt must be non-empty")


@dataclass(frozen=True)
class ModelResponse:
    text: str
    latency: float
    backend_tag: str


class ModelBackend(Protocol):
    def request(self, req: ModelRequest) -> ModelResponse: ...


def region_id(page_id: str, suffix: int | str) -> str:
    """Region identifiers are ``<page>/<order>``, ``<page>/layout`` or ``<page>/holistic``."""
    return f"{page_id}/{suffix}"


@dataclass(frozen=True)
class FixtureEntry:
    response: str
    delay_ms: float | None = None


@dataclass
class FixtureTable:
    """Canned responses keyed by ``(region_id, prompt)``.

    JSON form: ``{"entries": [{"region_id", "prompt", "response", "delay_ms"?}],
    "default_delay_ms": 0}``.
    """

    entries: dict[tuple[str, str], FixtureEntry] = field(default_factory=dict)
    default_delay_ms: float = 0.0

    def add(self, region: str, prompt: str, response: str, delay_ms: float | None = None) -> None:
        self.entries[(region, prompt)] = FixtureEntry(response, delay_ms)

    def lookup(self, region: str, prompt: str) -> FixtureEntry:
        try:
            return self.entries[(region, prompt)]
        except KeyError:
            raise FixtureMiss(region, prompt) from None

    def delay_for(self, entry: FixtureEntry) -> float:
        ms = self.default_delay_ms if entry.delay_ms is None else entry.delay_ms
        return ms / 1000.0

    def merge(self, other: FixtureTable) -> FixtureTable:
        merged = FixtureTable(dict(self.entries), self.default_delay_ms)
        merged.entries.update(other.entries)
        return merged

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        rows = []
        for (region, prompt), entry in sorted(self.entries.items()):
            row = {"region_id": region, "prompt": prompt, "response": entry.response}
            if entry.delay_ms is not None:
                row["delay_ms"] = entry.delay_ms
            rows.append(row)
        return {"entries": rows, "default_delay_ms": self.default_delay_ms}

    @classmethod
    def from_json(cls, obj: dict) -> FixtureTable:
        table = cls(default_delay_ms=float(obj.get("default_delay_ms", 0.0)))
        for row in obj["entries"]:
            table.add(row["region_id"], row["prompt"], row["response"], row.get("delay_ms"))
        return table

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> FixtureTable:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


class MockBackend:
    """Deterministic backend answering from a :class:`FixtureTable`.

    Records every request and the peak number of simultaneous in-flight calls.
    ``max_concurrency`` caps in-flight requests when set.
    """

    tag = "mock"

    def __init__(self, fixtures: FixtureTable, max_concurrency: int | None = None):
        self.fixtures = fixtures
        self._lock = threading.Lock()
        self._slots = threading.BoundedSemaphore(max_concurrency) if max_concurrency else None
        self._in_flight = 0
        self.high_water = 0
        self.calls: list[ModelRequest] = []

    @property
    def call_count(self) -> int:
        with self._lock:
            return len(self.calls)

    def calls_with_suffix(self, suffix: str) -> list[ModelRequest]:
        with self._lock:
            return [r for r in self.calls if r.region_id.endswith("/" + suffix)]

    def reset(self) -> None:
        with self._lock:
            self.calls.clear()
            self.high_water = 0

    def request(self, req: ModelRequest) -> ModelResponse:
        if self._slots is not None:
            self._slots.acquire()
        start = time.perf_counter()
        with self._lock:
            self.calls.append(req)
            self._in_flight += 1
            self.high_water = max(self.high_water, self._in_flight)
        try:
            entry = self.fixtures.lookup(req.region_id, req.prompt)
            delay = self.fixtures.delay_for(entry)
            if delay > 0:
                time.sleep(delay)
            return ModelResponse(entry.response, time.perf_counter() - start, self.tag)
        finally:
            with self._lock:
                self._in_flight -= 1
            if self._slots is not None:
                self._slots.release()

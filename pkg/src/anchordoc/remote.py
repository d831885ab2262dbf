"""OpenAI-compatible chat-completions client for vision-language model servers."""

from __future__ import annotations

import base64
import json
import logging
import threading
import time
from dataclasses import dataclass

import httpx

from anchordoc.backend import (
    EncodingError,
    ModelRequest,
    ModelResponse,
    ProtocolError,
    RateLimited,
    TransportError,
    sniff_mime,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 8192


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str = "dolphin-v2"
    api_key: str | None = None
    max_tokens: int = DEFAULT_MAX_TOKENS
    timeout: float = 120.0
    retries: int = 2
    backoff_base: float = 0.1
    max_concurrency: int = 8

    @property
    def url(self) -> str:
        return self.base_url.rstrip("/") + "/v1/chat/completions"

    def __repr__(self) -> str:
        key = "***" if self.api_key else None
        return f"EndpointConfig(base_url={self.base_url!r}, model={self.model!r}, api_key={key})"


def image_data_url(data: bytes) -> str:
    if not isinstance(data, (bytes, bytearray)) or not data:
        raise EncodingError("image bytes are empty or not bytes")
    mime = sniff_mime(bytes(data))
    if mime is None:
        raise EncodingError("image bytes are not a recognised raster format (PNG, JPEG, GIF, WebP)")
    return f"data:{mime};base64," + base64.b64encode(data).decode("ascii")


def encode_remote_request(req: ModelRequest, endpoint: EndpointConfig) -> bytes:
    """Build the chat-completion request body for ``req``.

    One user message carrying the prompt text part followed by the image as a
    base64 data URL, temperature 0. Key order is fixed so bodies are byte-stable.
    """
    if not req.prompt:
        raise EncodingError("prompt must be non-empty")
    try:
        data = req.image.data
    except Exception as exc:  # the lazy PNG encode can fail on exotic modes
        raise EncodingError(f"cannot encode image: {exc}") from exc
    body = {
        "model": endpoint.model,
        "messages": [
            {
                "role": "user",
                "content": [
                    {"type": "text", "text": req.prompt},
                    {"type": "image_url", "image_url": {"url": image_data_url(data)}},
                ],
            }
        ],
        "temperature": 0,
        "max_tokens": endpoint.max_tokens,
    }
    return json.dumps(body, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def decode_remote_response(payload: bytes) -> str:
    try:
        obj = json.loads(payload)
        content = obj["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProtocolError(f"malformed chat-completion response: {exc!r}") from None
    if isinstance(content, list):
        # some servers return content parts
        try:
            content = "".join(p["text"] for p in content if p.get("type") == "text")
        except (KeyError, TypeError, AttributeError) as exc:
            raise ProtocolError(f"malformed content parts: {exc!r}") from None
    if not isinstance(content, str):
        raise ProtocolError(f"message content is {type(content).__name__}, expected string")
    return content


def _retry_after(response: httpx.Response) -> float | None:
    value = response.headers.get("retry-after")
    if value is None:
        return None
    try:
        return max(0.0, float(value))
    except ValueError:
        return None


class RemoteBackend:
    """Thread-safe client; transport failures are retried with exponential backoff.

    Malformed bodies and rate limiting are surfaced immediately.
    """

    tag = "remote"

    def __init__(self, endpoint: EndpointConfig, client: httpx.Client | None = None, sleep=time.sleep):
        self.endpoint = endpoint
        headers = {"Content-Type": "application/json"}
        if endpoint.api_key:
            headers["Authorization"] = f"Bearer {endpoint.api_key}"
        self._client = client or httpx.Client(timeout=endpoint.timeout)
        self._headers = headers
        self._slots = threading.BoundedSemaphore(endpoint.max_concurrency)
        self._sleep = sleep

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> RemoteBackend:
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post_once(self, body: bytes) -> str:
        try:
            response = self._client.post(self.endpoint.url, content=body, headers=self._headers)
        except httpx.TimeoutException as exc:
            raise TransportError(f"timeout talking to {self.endpoint.base_url}: {exc}") from None
        except httpx.TransportError as exc:
            raise TransportError(f"cannot reach {self.endpoint.base_url}: {exc}") from None
        if response.status_code == 429:
            raise RateLimited("rate limited by server", _retry_after(response))
        if response.status_code >= 500:
            raise TransportError(f"server error {response.status_code}")
        if response.status_code >= 400:
            raise ProtocolError(f"request rejected with status {response.status_code}: {response.text[:200]}")
        return decode_remote_response(response.content)

    def request(self, req: ModelRequest) -> ModelResponse:
        body = encode_remote_request(req, self.endpoint)
        start = time.perf_counter()
        with self._slots:
            attempt = 0
            while True:
                try:
                    text = self._post_once(body)
                    break
                except TransportError as exc:
                    if attempt >= self.endpoint.retries:
                        raise
                    delay = self.endpoint.backoff_base * (2**attempt)
                    log.warning("transport error on %s (attempt %d), retrying in %.2fs: %s",
                                req.region_id, attempt + 1, delay, exc)
                    self._sleep(delay)
                    attempt += 1
        return ModelResponse(text, time.perf_counter() - start, self.tag)

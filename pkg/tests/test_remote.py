from __future__ import annotations

import json
from pathlib import Path

import httpx
import pytest

from anchordoc.backend import EncodingError, ImagePayload, ModelRequest, ProtocolError, RateLimited, TransportError
from anchordoc.remote import (
    EndpointConfig,
    RemoteBackend,
    decode_remote_response,
    encode_remote_request,
    image_data_url,
)

DATA = Path(__file__).parent / "data"
PIXEL = (DATA / "pixel.png").read_bytes()
ENDPOINT = EndpointConfig("http://model.local", api_key="sk-test")


def pixel_request(prompt: str = "Read text in the image.") -> ModelRequest:
    return ModelRequest(prompt, ImagePayload(1, 1, data=PIXEL), "p1/0")


def completion(text) -> dict:
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


def backend_with(handler, **kw) -> tuple[RemoteBackend, list[float]]:
    sleeps: list[float] = []
    client = httpx.Client(transport=httpx.MockTransport(handler))
    endpoint = EndpointConfig("http://model.local", api_key="sk-test", **kw)
    return RemoteBackend(endpoint, client=client, sleep=sleeps.append), sleeps


def test_body_has_one_text_and_one_image_part():
    body = json.loads(encode_remote_request(pixel_request(), ENDPOINT))
    (message,) = body["messages"]
    assert message["role"] == "user"
    assert [p["type"] for p in message["content"]] == ["text", "image_url"]
    assert message["content"][0]["text"] == "Read text in the image."
    assert message["content"][1]["image_url"]["url"].startswith("data:image/png;base64,")
    assert body["temperature"] == 0


def test_body_matches_golden_file():
    assert encode_remote_request(pixel_request(), ENDPOINT) == (DATA / "golden_request.json").read_bytes()


def test_body_never_carries_the_key():
    assert b"sk-test" not in encode_remote_request(pixel_request(), ENDPOINT)
    assert "sk-test" not in repr(ENDPOINT)


def test_unknown_image_bytes_rejected():
    with pytest.raises(EncodingError):
        image_data_url(b"not an image")
    with pytest.raises(EncodingError):
        image_data_url(b"")


def test_decode_plain_and_part_content():
    assert decode_remote_response(json.dumps(completion("hi")).encode()) == "hi"
    parts = [{"type": "text", "text": "a"}, {"type": "text", "text": "b"}]
    assert decode_remote_response(json.dumps(completion(parts)).encode()) == "ab"


@pytest.mark.parametrize("payload", [b"not json", b"{}", b'{"choices": []}', json.dumps(completion(7)).encode()])
def test_decode_rejects_malformed(payload):
    with pytest.raises(ProtocolError):
        decode_remote_response(payload)


def test_request_round_trip_with_auth():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["body"] = request.content
        return httpx.Response(200, json=completion("digital document"))

    backend, _ = backend_with(handler)
    resp = backend.request(pixel_request())
    assert resp.text == "digital document" and resp.backend_tag == "remote"
    assert seen["url"] == "http://model.local/v1/chat/completions"
    assert seen["auth"] == "Bearer sk-test"
    assert seen["body"] == (DATA / "golden_request.json").read_bytes()


def test_transport_errors_retry_then_succeed():
    attempts = []

    def handler(request):
        attempts.append(1)
        if len(attempts) < 3:
            raise httpx.ConnectError("refused")
        return httpx.Response(200, json=completion("ok"))

    backend, sleeps = backend_with(handler)
    assert backend.request(pixel_request()).text == "ok"
    assert sleeps == [0.1, 0.2]


def test_transport_failure_surfaces_after_retries():
    def handler(request):
        return httpx.Response(503)

    backend, sleeps = backend_with(handler, retries=2)
    with pytest.raises(TransportError):
        backend.request(pixel_request())
    assert len(sleeps) == 2


def test_rate_limit_is_not_retried():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(429, headers={"Retry-After": "3"})

    backend, sleeps = backend_with(handler)
    with pytest.raises(RateLimited) as info:
        backend.request(pixel_request())
    assert info.value.retry_after == 3.0
    assert calls == [1] and sleeps == []


def test_client_errors_are_protocol_errors():
    backend, sleeps = backend_with(lambda r: httpx.Response(400, text="bad"))
    with pytest.raises(ProtocolError):
        backend.request(pixel_request())
    assert sleeps == []


def test_malformed_success_body_is_protocol_error():
    backend, _ = backend_with(lambda r: httpx.Response(200, content=b"<html>"))
    with pytest.raises(ProtocolError):
        backend.request(pixel_request())

"""Minimal HTTP service: ``POST /parse?id=<page>`` with an image body.

The response body is the same document JSON that ``anchordoc parse`` writes to
``<id>.json``. Each request is independent; the server keeps no state beyond
the backend it was started with.
"""

from __future__ import annotations

import json
import logging
import re
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from anchordoc.backend import BackendError, ModelBackend
from anchordoc.layout import LayoutParseError
from anchordoc.pipeline import PageImage, PipelineConfig, parse_document

log = logging.getLogger(__name__)

MAX_BODY = 64 * 1024 * 1024
_PAGE_ID = re.compile(r"^[A-Za-z0-9._-]{1,128}$")


def make_handler(backend: ModelBackend, config: PipelineConfig) -> type[BaseHTTPRequestHandler]:
    class Handler(BaseHTTPRequestHandler):
        server_version = "anchordoc"

        def log_message(self, fmt: str, *args) -> None:
            log.info("%s %s", self.address_string(), fmt % args)

        def _reply(self, status: int, obj: dict) -> None:
            body = (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _error(self, status: HTTPStatus, message: str) -> None:
            self._reply(status, {"error": status.phrase, "detail": message})

        def do_GET(self) -> None:
            if urlsplit(self.path).path == "/health":
                self._reply(HTTPStatus.OK, {"status": "ok"})
            else:
                self._error(HTTPStatus.NOT_FOUND, "only POST /parse and GET /health exist")

        def do_POST(self) -> None:
            url = urlsplit(self.path)
            if url.path != "/parse":
                self._error(HTTPStatus.NOT_FOUND, "only POST /parse exists")
                return
            page_id = parse_qs(url.query).get("id", ["page"])[0]
            if not _PAGE_ID.match(page_id):
                self._error(HTTPStatus.BAD_REQUEST, f"invalid page id {page_id!r}")
                return
            try:
                length = int(self.headers.get("Content-Length", ""))
            except ValueError:
                self._error(HTTPStatus.LENGTH_REQUIRED, "Content-Length is required")
                return
            if length <= 0 or length > MAX_BODY:
                self._error(HTTPStatus.BAD_REQUEST, f"body must be 1..{MAX_BODY} bytes")
                return
            data = self.rfile.read(length)
            try:
                page = PageImage.from_bytes(data, page_id)
            except (OSError, ValueError) as exc:
                self._error(HTTPStatus.UNSUPPORTED_MEDIA_TYPE, f"body is not a PNG or JPEG image: {exc}")
                return
            try:
                doc = parse_document(page, backend, config)
            except (BackendError, LayoutParseError) as exc:
                self._error(HTTPStatus.BAD_GATEWAY, f"{type(exc).__name__}: {exc}")
                return
            self._reply(HTTPStatus.OK, doc.to_json())

    return Handler


def make_server(backend: ModelBackend, config: PipelineConfig, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), make_handler(backend, config))
    server.daemon_threads = True
    return server

from __future__ import annotations

import json
import threading

import httpx
import pytest

from anchordoc.backend import FixtureTable, MockBackend
from anchordoc.cli import main
from anchordoc.pipeline import PipelineConfig
from anchordoc.serve import make_server


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert main(["generate", "code", "--count", "2", "--seed", "3", "--out", str(root)], env={}) == 0
    return root


@pytest.fixture(scope="module")
def server(corpus):
    backend = MockBackend(FixtureTable.load(corpus / "fixture.json"))
    srv = make_server(backend, PipelineConfig(), "127.0.0.1", 0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    host, port = srv.server_address[:2]
    with httpx.Client(base_url=f"http://{host}:{port}", timeout=10) as client:
        yield client
    srv.shutdown()
    srv.server_close()


def test_health(server):
    r = server.get("/health")
    assert r.status_code == 200 and r.json() == {"status": "ok"}


def test_parse_matches_cli_output(server, corpus, tmp_path):
    pid = "code-3-0000"
    image = corpus / "images" / f"{pid}.png"
    r = server.post("/parse", params={"id": pid}, content=image.read_bytes())
    assert r.status_code == 200
    assert main(["parse", str(image), "--out", str(tmp_path), "--backend", f"mock:{corpus / 'fixture.json'}"], env={}) == 0
    from_cli = json.loads((tmp_path / f"{pid}.json").read_text())
    from_server = r.json()
    from_cli.pop("timing")
    from_server.pop("timing")
    assert from_server == from_cli


def test_concurrent_requests(server, corpus):
    results = {}

    def hit(pid):
        body = (corpus / "images" / f"{pid}.png").read_bytes()
        results[pid] = server.post("/parse", params={"id": pid}, content=body).json()["id"]

    threads = [threading.Thread(target=hit, args=(f"code-3-000{k}",)) for k in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == {"code-3-0000": "code-3-0000", "code-3-0001": "code-3-0001"}


def test_unknown_paths(server):
    assert server.get("/parse").status_code == 404
    assert server.post("/other", content=b"x").status_code == 404


def test_bad_page_id(server, corpus):
    body = (corpus / "images" / "code-3-0000.png").read_bytes()
    assert server.post("/parse", params={"id": "../etc"}, content=body).status_code == 400


def test_empty_body(server):
    assert server.post("/parse", params={"id": "x"}, content=b"").status_code == 400


def test_not_an_image(server):
    r = server.post("/parse", params={"id": "x"}, content=b"plain text")
    assert r.status_code == 415 and r.json()["error"] == "Unsupported Media Type"


def test_backend_failure_is_bad_gateway(server, corpus):
    body = (corpus / "images" / "code-3-0000.png").read_bytes()
    r = server.post("/parse", params={"id": "unknown-page"}, content=body)
    assert r.status_code == 502 and "FixtureMiss" in r.json()["detail"]

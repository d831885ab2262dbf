"""Command-line entry point: ``anchordoc parse|evaluate|generate|serve``.

Exit codes: 0 success, 2 partial failure, 64 usage error, 65 no overlapping
ids to evaluate, 74 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from anchordoc.assembler import assemble
from anchordoc.backend import BackendError, FixtureTable, MockBackend, ModelBackend
from anchordoc.layout import LayoutParseError
from anchordoc.pipeline import PageImage, PipelineConfig, PromptTable, parse_document
from anchordoc.remote import EndpointConfig, RemoteBackend

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

log = logging.getLogger("anchordoc")

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_NO_OVERLAP = 65
EXIT_IO = 74

ENV_API_KEY = "ANCHORDOC_API_KEY"
ENV_BACKEND = "ANCHORDOC_BACKEND"
ENV_ENDPOINT = "ANCHORDOC_ENDPOINT"

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
FORMATS = ("md", "json", "both")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which we reserve for partial failure
        raise UsageError(message)


class RedactingFilter(logging.Filter):
    """Replaces known secrets in log records before they are formatted."""

    def __init__(self, secrets: Sequence[str]):
        super().__init__()
        self.secrets = [s for s in secrets if s]

    def filter(self, record: logging.LogRecord) -> bool:
        if self.secrets:
            msg = record.getMessage()
            for s in self.secrets:
                msg = msg.replace(s, "***")
            record.msg, record.args = msg, None
        return True


def redact(text: str, secrets: Sequence[str]) -> str:
    for s in secrets:
        if s:
            text = text.replace(s, "***")
    return text


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class BackendSpec:
    scheme: str  # "mock" or "http"
    target: str  # fixture path or base URL

    @classmethod
    def parse(cls, text: str) -> BackendSpec:
        scheme, sep, target = text.partition(":")
        if not sep or not target:
            raise UsageError(f"backend must look like mock:<fixture.json> or http:<url>, got {text!r}")
        if scheme == "mock":
            return cls("mock", target)
        if scheme in ("http", "https"):
            # "http:http://host" and the bare URL forms are both accepted.
            url = target if target.startswith(("http://", "https://")) else text
            return cls("http", url)
        raise UsageError(f"unknown backend scheme {scheme!r}; expected mock or http")

    def __str__(self) -> str:
        return f"{self.scheme}:{self.target}"


def load_config_file(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config {path} is not valid TOML: {exc}") from exc
    # Either flat keys or an [anchordoc] table.
    return dict(data.get("anchordoc", data))


def _single_backend(backend: str | None, endpoint: str | None, where: str) -> BackendSpec | None:
    specs = []
    if backend:
        specs.append(BackendSpec.parse(backend))
    if endpoint:
        specs.append(BackendSpec.parse(endpoint if endpoint.startswith(("http:", "https:")) else f"http:{endpoint}"))
    if len(specs) == 2 and specs[0] != specs[1]:
        raise UsageError(f"conflicting backend specs in {where}: {specs[0]} vs {specs[1]}")
    return specs[0] if specs else None


def resolve_backend_spec(args: argparse.Namespace, config: dict[str, Any], env: dict[str, str]) -> BackendSpec:
    """Flag, then config file, then environment; two different specs at one level is an error."""
    for where, backend, endpoint in (
        ("flags", args.backend, getattr(args, "endpoint", None)),
        ("config file", config.get("backend"), config.get("endpoint")),
        ("environment", env.get(ENV_BACKEND), env.get(ENV_ENDPOINT)),
    ):
        spec = _single_backend(backend, endpoint, where)
        if spec is not None:
            return spec
    raise UsageError("no backend given; pass --backend mock:<fixture.json> or http:<url>")


def _setting(args: argparse.Namespace, config: dict[str, Any], name: str, default: Any) -> Any:
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def build_pipeline_config(args: argparse.Namespace, config: dict[str, Any], crop_dir: Path | None) -> PipelineConfig:
    prompts_src = _setting(args, config, "prompts", None)
    try:
        if prompts_src is None:
            prompts = PromptTable()
        elif isinstance(prompts_src, dict):
            prompts = PromptTable.from_mapping(prompts_src)
        else:
            prompts = PromptTable.load(prompts_src)
        return PipelineConfig(
            concurrency=int(_setting(args, config, "concurrency", 4)),
            crop_padding=int(_setting(args, config, "crop_padding", 0)),
            include_marginalia=bool(_setting(args, config, "include_marginalia", False)),
            prompts=prompts,
            crop_dir=crop_dir,
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def build_backend(spec: BackendSpec, config: dict[str, Any], env: dict[str, str], concurrency: int) -> ModelBackend:
    if spec.scheme == "mock":
        try:
            return MockBackend(FixtureTable.load(spec.target))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"fixture {spec.target} is malformed: {exc}") from exc
    api_key = config.get("api_key") or env.get(ENV_API_KEY)
    endpoint = EndpointConfig(
        spec.target,
        model=config.get("model", EndpointConfig.model),
        api_key=api_key,
        max_concurrency=max(concurrency, 1),
    )
    return RemoteBackend(endpoint)


def _secrets(config: dict[str, Any], env: dict[str, str]) -> list[str]:
    return [s for s in (config.get("api_key"), env.get(ENV_API_KEY)) if s]


# -- subcommands ---------------------------------------------------------------


def collect_images(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not path.exists():
        raise FileNotFoundError(f"input {path} does not exist")
    return [path]


def cmd_parse(args: argparse.Namespace, config: dict[str, Any], env: dict[str, str]) -> int:
    spec = resolve_backend_spec(args, config, env)
    fmt = _setting(args, config, "format", "both")
    if fmt not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
    out = Path(args.out)
    pconfig = build_pipeline_config(args, config, out / "crops")
    images = collect_images(Path(args.input))
    if not images:
        raise UsageError(f"no PNG or JPEG images found in {args.input}")
    backend = build_backend(spec, config, env, pconfig.concurrency)
    out.mkdir(parents=True, exist_ok=True)

    failed: list[str] = []
    partial: list[str] = []
    try:
        for path in images:
            data = path.read_bytes()
            try:
                page = PageImage.from_bytes(data, path.stem)
            except (OSError, ValueError) as exc:  # PIL signals undecodable data with an OSError
                log.error("page=%s unreadable image: %s", path.stem, exc)
                failed.append(f"{path.stem}: {exc}")
                continue
            try:
                doc = parse_document(page, backend, pconfig)
            except (BackendError, LayoutParseError) as exc:
                log.error("page=%s failed: %s: %s", page.page_id, type(exc).__name__, exc)
                failed.append(f"{page.page_id}: {type(exc).__name__}: {exc}")
                continue
            if fmt in ("json", "both"):
                (out / f"{page.page_id}.json").write_text(
                    json.dumps(doc.to_json(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
                )
            if fmt in ("md", "both"):
                (out / f"{page.page_id}.md").write_text(assemble(doc, pconfig) + "\n", encoding="utf-8")
            if doc.failed_elements:
                partial.append(f"{page.page_id}: {len(doc.failed_elements)} element(s) failed")
    finally:
        close = getattr(backend, "close", None)
        if close:
            close()

    if failed or partial:
        print(f"parse: {len(images) - len(failed)}/{len(images)} page(s) written", file=sys.stderr)
        for line in failed + partial:
            print(f"  {line}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _gt_dir(path: Path) -> Path:
    # A corpus root from `generate` keeps its specs one level down.
    if (path / "specs").is_dir():
        return path / "specs"
    return path


def cmd_evaluate(args: argparse.Namespace, config: dict[str, Any], env: dict[str, str]) -> int:
    from anchordoc.metrics.report import NoOverlap, evaluate_dirs, report_json

    pred, gt = Path(args.pred), Path(args.gt)
    for d in (pred, gt):
        if not d.is_dir():
            raise FileNotFoundError(f"{d} is not a directory")
    try:
        reports, total, warnings = evaluate_dirs(pred, _gt_dir(gt))
    except NoOverlap as exc:
        print(f"evaluate: {exc}", file=sys.stderr)
        return EXIT_NO_OVERLAP
    for w in warnings:
        log.warning("%s", w)
    doc = report_json(reports, total, {"pred": str(pred), "gt": str(gt)})
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(total.row())
    return EXIT_OK


def cmd_generate(args: argparse.Namespace, config: dict[str, Any], env: dict[str, str]) -> int:
    from anchordoc.datagen.corpus import generate, write_corpus

    if args.count < 1:
        raise UsageError(f"--count must be >= 1, got {args.count}")
    prompts_src = _setting(args, config, "prompts", None)
    try:
        prompts = PromptTable() if prompts_src is None else (
            PromptTable.from_mapping(prompts_src) if isinstance(prompts_src, dict) else PromptTable.load(prompts_src)
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    merged = write_corpus(generate(args.kind, args.count, args.seed, prompts), args.out, images=not args.no_images)
    print(f"generate: {args.count} {args.kind} page(s), {len(merged)} fixture entries -> {args.out}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, config: dict[str, Any], env: dict[str, str]) -> int:
    from anchordoc.serve import make_server

    spec = resolve_backend_spec(args, config, env)
    pconfig = build_pipeline_config(args, config, None)
    backend = build_backend(spec, config, env, pconfig.concurrency)
    server = make_server(backend, pconfig, args.host, args.port)
    host, port = server.server_address[:2]
    log.info("serving POST /parse on http://%s:%d", host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", help="mock:<fixture.json> or http:<url>")
    p.add_argument("--endpoint", help="base URL of an OpenAI-compatible server (same as --backend http:<url>)")
    p.add_argument("--concurrency", type=int, help="parallel element requests per page (default 4)")
    p.add_argument("--crop-padding", type=int, help="pixels added around each element crop (default 0)")
    p.add_argument("--include-marginalia", action="store_true", default=None, help="keep headers, footers, watermarks")
    p.add_argument("--prompts", help="JSON file overriding prompt strings")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anchordoc", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="TOML file with default settings")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="parse page images into JSON and Markdown")
    p.add_argument("input", help="image file or directory of images")
    p.add_argument("--out", "-o", required=True, help="output directory")
    p.add_argument("--format", choices=FORMATS, help="outputs to write (default both)")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("evaluate", help="score predictions against ground truth")
    p.add_argument("pred", help="directory of parse outputs (<id>.json)")
    p.add_argument("gt", help="directory of page specs or a generated corpus root")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="write a synthetic corpus with fixtures")
    p.add_argument("kind", choices=("catalog", "code", "page-warped"))
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--prompts", help="JSON file overriding prompt strings")
    p.add_argument("--no-images", action="store_true", help="skip PNG rasterisation")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="expose parse as POST /parse")
    _add_pipeline_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)
    return parser


def _setup_logging(verbosity: int, secrets: Sequence[str]) -> None:
    level = logging.WARNING - 10 * min(verbosity, 2)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    handler.addFilter(RedactingFilter(secrets))
    root = logging.getLogger("anchordoc")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def main(argv: Sequence[str] | None = None, env: dict[str, str] | None = None) -> int:
    env = dict(os.environ if env is None else env)
    secrets = [env.get(ENV_API_KEY, "")]
    try:
        args = build_parser().parse_args(argv)
        config = load_config_file(args.config)
        secrets = _secrets(config, env)
        _setup_logging(args.verbose, secrets)
        return args.func(args, config, env)
    except UsageError as exc:
        print(f"anchordoc: error: {redact(str(exc), secrets)}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"anchordoc: I/O error: {redact(str(exc), secrets)}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

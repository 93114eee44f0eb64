"""Command line entry point for the scoring service."""

from __future__ import annotations

import argparse
import logging
import sys

import uvicorn

from .app import create_app
from .config import DEFAULT_DEVICE, DEFAULT_MAX_BATCH, DEFAULT_MODEL, MODES, ServiceConfig

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scoring-service",
        description="Serve query-document relevance scores over HTTP.",
    )
    parser.add_argument("--host", default="127.0.0.1", help="bind address (default %(default)s)")
    parser.add_argument("--port", type=int, default=8800, help="bind port (default %(default)s)")
    parser.add_argument(
        "--model",
        default=DEFAULT_MODEL,
        help="cross-encoder model identifier for model mode (default %(default)s)",
    )
    parser.add_argument(
        "--mode",
        choices=MODES,
        default="echo",
        help="echo returns deterministic scores with no model artifacts; "
        "model loads the cross-encoder (default %(default)s)",
    )
    parser.add_argument(
        "--max-batch",
        type=int,
        default=DEFAULT_MAX_BATCH,
        help="largest pair batch a single request may carry (default %(default)s)",
    )
    parser.add_argument(
        "--device",
        default=DEFAULT_DEVICE,
        help="device hint for model inference (default %(default)s)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = ServiceConfig(
            mode=args.mode, model=args.model, max_batch=args.max_batch, device=args.device
        )
        app = create_app(config)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info("serving %s mode on %s:%d", config.mode, args.host, args.port)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())

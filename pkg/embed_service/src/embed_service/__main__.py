"""Run the service: python -m embed_service [--port N]."""

import argparse
import os

import uvicorn

from .app import DEFAULT_PORT, create_app


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="0.0.0.0")
    parser.add_argument("--port", type=int, default=int(os.environ.get("NOCL_EMBED_PORT", DEFAULT_PORT)))
    args = parser.parse_args()
    uvicorn.run(create_app(), host=args.host, port=args.port)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Run the HTTP service.

    python scripts/serve.py --port 8000 --data-dir ./sessions

Sessions persist as JSON files under --data-dir and survive restarts.
"""

import argparse
import sys
from pathlib import Path

import uvicorn

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from causalwhatif.service import create_app


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--data-dir", default="./sessions")
    args = parser.parse_args()
    uvicorn.run(create_app(data_dir=args.data_dir), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())

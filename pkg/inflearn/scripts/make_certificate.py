# inflearn/scripts/make_certificate.py
"""
Regenerate the lattice-family certificate:
  python -m inflearn.scripts.make_certificate [--out PATH] [--check]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from inflearn.app.catalog import CERTIFICATE_PATH, certify_lattices
from inflearn.app.utils import canonical_json


def render(extended_stage: int = 8) -> str:
    return canonical_json(certify_lattices(extended_stage))


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(CERTIFICATE_PATH))
    ap.add_argument("--stage", type=int, default=8, help="chain stage used for the extended check")
    ap.add_argument("--check", action="store_true", help="compare with the file instead of writing it")
    args = ap.parse_args()

    text = render(args.stage)
    out = Path(args.out)
    if args.check:
        same = out.exists() and out.read_text(encoding="utf-8") == text
        print("certificate up to date" if same else f"certificate differs: {out}")
        return 0 if same else 1
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

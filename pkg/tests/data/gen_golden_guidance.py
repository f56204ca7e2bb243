#!/usr/bin/env python3
"""Writes the golden guidance files for the 12 pinned combinations.

Run from the tests/ directory's parent with tests/ on sys.path. Outputs are
committed; regenerate only when guidance behavior intentionally changes and
review the diff.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from golden_guidance_cases import all_cases  # noqa: E402
from phishcode.guidance import generate_guidance  # noqa: E402

OUT = Path(__file__).parent / "golden_guidance"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, coded, record in all_cases():
        response = generate_guidance(coded, record)
        (OUT / f"{name}.json").write_text(response.to_json() + "\n", encoding="utf-8")
        (OUT / f"{name}.txt").write_text(response.to_text(), encoding="utf-8")
    print(f"wrote {len(list(OUT.iterdir()))} golden files")


if __name__ == "__main__":
    main()

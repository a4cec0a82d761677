#!/usr/bin/env python3
"""
Fixture Generation Script
=========================
Freezes the regression fixtures that only a verified run can produce.

Usage:
    python scripts/generate_fixtures.py

Writes:
    data/fixtures/replan_counts.json   class counts of the corridor demo
    data/fixtures/circle_point.svg     golden render of the circle scene

data/scenes/curve_polygon.json and data/fixtures/oracle_values.json are
written by hand: their distances have closed forms, so they need no run.

Run it once after a verified build, review the output, then commit it.
Until then the comparisons against these two files are skipped; the
property checks on the same runs do not depend on them.
"""

import json
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlib import Path  # noqa: E402

from harness.render import render_svg  # noqa: E402
from harness.replan import run_replan  # noqa: E402
from harness.runner import load_scene  # noqa: E402
from harness.schemas import ReplanSpec  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
SCENES = ROOT / "data" / "scenes"
FIXTURES = ROOT / "data" / "fixtures"


def generate_replan_counts() -> None:
    spec = ReplanSpec.model_validate_json((SCENES / "replan_corridor.json").read_text())
    summary = run_replan(spec)
    out = FIXTURES / "replan_counts.json"
    out.write_text(json.dumps({"seed": spec.seed, **summary.to_dict()}, indent=2) + "\n")
    print(f"✅ wrote {out}: {summary.to_dict()}")


def generate_golden_svg() -> None:
    scene = load_scene(SCENES / "circle_point.json").build()
    out = render_svg(scene.curves, scene.obstacles, FIXTURES / "circle_point.svg")
    print(f"✅ wrote {out}")


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    generate_replan_counts()
    generate_golden_svg()
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Generate CONFIG-SCHEMA.json from the experiment config models."""

import json
import sys
from pathlib import Path

# Add the repository root to the Python path
repo_dir = Path(__file__).parent.parent
sys.path.insert(0, str(repo_dir))

from app.schemas.experiment import ExperimentConfig, SweepGrid  # noqa: E402


def generate_schema() -> str:
    """JSON Schema of the experiment config and the sweep grid file."""
    schema = {
        "$comment": "Auto-generated from app/schemas. DO NOT EDIT MANUALLY.",
        "experiment": ExperimentConfig.model_json_schema(),
        "grid": SweepGrid.model_json_schema(),
    }
    return json.dumps(schema, indent=2) + "\n"


def main():
    """Generate docs/CONFIG-SCHEMA.json."""
    output_path = repo_dir / "docs" / "CONFIG-SCHEMA.json"
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(generate_schema(), encoding="utf-8")
    print(f"Generated {output_path}")


if __name__ == "__main__":
    main()

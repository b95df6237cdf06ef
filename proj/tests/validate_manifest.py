"""Runs `econqe batch` on the shipped models and validates the manifest."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, models, schema_path = sys.argv[1:4]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "manifest.json"
        subprocess.run([cli, "--engine", "builtin", "--timeout", "3000", "--workers", "2",
                        "batch", models, "--out", str(out)], check=True, stdout=subprocess.DEVNULL)
        manifest = json.loads(out.read_text())
    jsonschema.validate(manifest, schema)
    rows = {row["id"]: row for row in manifest["rows"]}
    assert rows["marshall"]["outcome"] == "TheoremTrue", rows["marshall"]
    assert manifest["summary"]["problems"] == len(manifest["rows"])
    # Violations must be caught, or the check above proves nothing.
    broken = dict(manifest, rows=[dict(manifest["rows"][0], outcome="Probably")])
    try:
        jsonschema.validate(broken, schema)
    except jsonschema.ValidationError:
        pass
    else:
        raise AssertionError("schema accepted an invalid outcome")
    print(f"manifest valid: {len(rows)} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run each JSON-emitting subcommand on the toy corpus and validate the
output against schemas/. Skips (exit 0, message) when jsonschema is absent.

usage: validate_schemas.py TSDIAG_BINARY SCHEMA_DIR TOY_DIR
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(0)


def main():
    tool, schemas, toy = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    manifest = str(toy / "toy.manifest")
    refs = [str(toy / f"test.ref{i}") for i in range(3)]
    tmp = Path(tempfile.mkdtemp())
    runs = [
        ("profile_summary", ["profile", "--manifest", manifest, "--out", str(tmp / "p")]),
        ("divergence_report", ["divergence", "--manifest", manifest, "--iterations", "200"]),
        ("permtest", ["permtest", "--manifest", manifest, "--a", "test", "--b", "dev",
                      "--iterations", "200"]),
        ("sari", ["sari", "--source", str(toy / "test.src"), "--output",
                  str(toy / "system_a.txt"), "--refs", *refs]),
        ("sari_permtest", ["sari-permtest", "--source", str(toy / "test.src"),
                           "--output-a", str(toy / "system_a.txt"), "--output-b",
                           str(toy / "system_b.txt"), "--iterations", "200", "--refs", *refs]),
        ("refine_manifest", ["refine", "--manifest", manifest, "--drop-percent", "5",
                             "--out", str(tmp / "r")]),
        ("refine_manifest", ["resplit", "--manifest", manifest, "--out", str(tmp / "s")]),
    ]
    failures = 0
    for schema_name, args in runs:
        schema = json.loads((schemas / f"{schema_name}.schema.json").read_text())
        proc = subprocess.run([tool, *args], capture_output=True, text=True)
        try:
            if proc.returncode != 0:
                raise RuntimeError(f"exit {proc.returncode}: {proc.stderr.strip()}")
            jsonschema.validate(json.loads(proc.stdout), schema)
            if args[0] in ("refine", "resplit"):
                written = json.loads((Path(args[-1]) / "manifest.json").read_text())
                jsonschema.validate(written, schema)
            print(f"ok    {args[0]} -> {schema_name}")
        except Exception as e:  # report and keep going
            failures += 1
            print(f"FAIL  {args[0]} -> {schema_name}: {e}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()

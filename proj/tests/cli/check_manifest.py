"""Runs every hqp mode once and validates the run manifests against the
published schema. Also checks that CSV output does not depend on the
thread count."""

import json
import pathlib
import subprocess
import sys

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(77)

RUNS = {
    "thresholds": ["thresholds", "--pi", "0.5,0.3,0.2"],
    "free-energy": ["free-energy", "--pi", "0.5,0.5", "--gamma-grid", "0.5:2:0.5", "--n", "8"],
    "collision": ["collision", "--random", "4", "--d", "3", "--max-entry", "5", "--mc-trials", "2000"],
    "simulate": ["simulate", "--n", "10", "--gamma-grid", "0.5:2:0.5", "--trials", "60", "--seed", "9"],
    "identity": ["identity", "--d", "3", "--trials", "5"],
    "rates": ["rates", "--w", "0,0.5;0.25,0", "--n-grid", "20:200:20"],
}


def main() -> int:
    hqp, schema_path, workdir = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    workdir.mkdir(parents=True, exist_ok=True)
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for name, args in RUNS.items():
        outputs = []
        for threads in ("1", "3"):
            out = workdir / f"{name}-{threads}.csv"
            proc = subprocess.run([hqp, *args, "--threads", threads, "--out", str(out)],
                                  capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"FAIL {name}: exit {proc.returncode}: {proc.stderr}")
                failures += 1
                continue
            manifest = json.loads(pathlib.Path(str(out) + ".manifest.json").read_text())
            errors = sorted(validator.iter_errors(manifest), key=str)
            for e in errors:
                print(f"FAIL {name}: {e.message}")
            failures += len(errors)
            outputs.append(out.read_bytes())
        if len(outputs) == 2 and outputs[0] != outputs[1]:
            print(f"FAIL {name}: CSV differs between thread counts")
            failures += 1
        elif len(outputs) == 2:
            print(f"ok   {name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

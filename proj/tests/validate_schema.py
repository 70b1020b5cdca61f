"""Runs `freqq analyze --format json` on a few inputs and validates the output against the schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
schema = json.loads(Path(schema_path).read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    sim = tmp / "sim.csv"
    subprocess.run([cli, "simulate", "--scenario", "high_noise_low_ramps", "--seed", "5", "--hours", "4",
                    "-o", str(sim)], check=True)
    const = tmp / "const.csv"
    const.write_text("time_s,frequency_hz\n" + "\n".join(f"{i},50.0" for i in range(200)) + "\n")
    short = tmp / "short.csv"
    short.write_text("time_s,frequency_hz\n" + "\n".join(f"{i},{50 + 0.01 * (i % 5)}" for i in range(100)) + "\n")

    cases = [
        ([str(sim)], 0),
        ([str(sim), "--window-offset", "100", "--window-len", "5000", "--bands", "50,100,200", "--unbiased"], 0),
        ([str(const)], 3),
        ([str(short)], 2),
    ]
    failures = 0
    for args, want in cases:
        run = subprocess.run([cli, "analyze", *args, "--format", "json"], capture_output=True, text=True)
        if run.returncode != want:
            print(f"FAIL exit {run.returncode} != {want}: {args}\n{run.stderr}")
            failures += 1
            continue
        errors = list(validator.iter_errors(json.loads(run.stdout)))
        for e in errors:
            print(f"FAIL {args}: {e.message} at {list(e.absolute_path)}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {' '.join(Path(a).name if '/' in a else a for a in args)}")

sys.exit(1 if failures else 0)

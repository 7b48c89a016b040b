"""Run each CLI command with JSON output and validate against the shipped schemas."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
report = json.loads((schema_dir / "report.schema.json").read_text())
surface = json.loads((schema_dir / "surface.schema.json").read_text())
tmp = pathlib.Path(tempfile.mkdtemp(prefix="slitgap_schema_"))

surf = tmp / "id.json"
surf.write_text(json.dumps({"g": [[1, 0], [0, 1]], "v": [0.5, 0]}))
jsonschema.validate(json.loads(surf.read_text()), surface)

runs = [
    (["gaps", "--surface", str(surf), "--slope-max", "5", "--format", "json"], 0),
    (["orbit", "--omega", "0.5,1,0.2,0.75", "--iters", "4", "--format", "json"], 0),
    (["mc-tail", "--samples", "2000", "--t-grid", "0:2:0.5", "--format", "json"], 0),
    (["closed-form", "--t-grid", "0:5:0.5", "--component", "density", "--format", "json"], 0),
    (["closed-form", "--t-grid", "10:20:5", "--component", "torsion:2", "--format", "json"], 0),
    (["difftest", "--region", "WslRho", "--samples", "2000", "--format", "json"], 0),
    (["difftest", "--region", "OmegaR", "--samples", "5000", "--format", "json"], 4),
]
failed = 0
for args, want in runs:
    p = subprocess.run([cli, *args], capture_output=True, text=True)
    try:
        assert p.returncode == want, f"exit {p.returncode}, expected {want}: {p.stderr}"
        jsonschema.validate(json.loads(p.stdout), report)
        print("ok  ", " ".join(args))
    except Exception as e:  # noqa: BLE001
        failed += 1
        print("FAIL", " ".join(args), "::", e)

# sidecars and side reports go through the same schema
csv = tmp / "tail.csv"
subprocess.run([cli, "mc-tail", "--samples", "2000", "--out", str(csv)], check=True)
mm = tmp / "mm.json"
subprocess.run([cli, "closed-form", "--t-grid", "0:1:1", "--mismatch-report", str(mm)], check=True,
               capture_output=True)
for path in (csv.with_suffix(".json"), mm):
    try:
        jsonschema.validate(json.loads(path.read_text()), report)
        print("ok  ", path.name)
    except Exception as e:  # noqa: BLE001
        failed += 1
        print("FAIL", path.name, "::", e)

sys.exit(1 if failed else 0)

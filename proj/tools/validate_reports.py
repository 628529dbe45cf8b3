"""Validate every report and JSON line in an output directory against schemas/."""
import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(__file__).resolve().parent.parent / "schemas"
out = pathlib.Path(sys.argv[1])
report = json.loads((root / "report.schema.json").read_text())
record = json.loads((root / "record.schema.json").read_text())

count = 0
for path in sorted(out.glob("*.json")):
    if path.name.endswith("-basis.json"):
        continue
    jsonschema.validate(json.loads(path.read_text()), report)
    count += 1
for line in (out / "reports.jsonl").read_text().splitlines():
    jsonschema.validate(json.loads(line), record)
    count += 1
if count == 0:
    sys.exit("no reports found in " + str(out))
print(f"{count} documents valid")

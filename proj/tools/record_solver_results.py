#!/usr/bin/env python3
"""Run z3 once over the golden VC documents and record the results."""
import json
import pathlib
import sys

import z3

root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
golden = root / "tests" / "golden" / "vc"
results = {}
for path in sorted(golden.rglob("*.vc.smt2")):
    solver = z3.Solver()
    solver.from_file(str(path))
    results[path.relative_to(golden).as_posix()] = {
        "result": str(solver.check()),
        "bytes": path.stat().st_size,
    }
record = {"solver": "z3 " + z3.get_version_string(), "results": results}
(golden / "solver_results.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
print(json.dumps(record, indent=2, sort_keys=True))

"""End to end through the command line: CSV in, JSON report out.

Run:  python demos/07_cli_pipeline.py
"""

import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

h = math.sqrt(3) / 2
hexagon = [[1, 0], [0.5, h], [-0.5, h], [-1, 0], [-0.5, -h], [0.5, -h]]

with tempfile.TemporaryDirectory() as td:
    csv = Path(td) / "hexagon.csv"
    csv.write_text("x,y\n" + "\n".join(f"{x!r},{y!r}" for x, y in hexagon) + "\n")
    print("input CSV:")
    print(csv.read_text())

    cmd = [sys.executable, "-m", "mvbetti.cli", str(csv),
           "--epsilon", "1.0", "--scales", "0.5,1.0",
           "--grid", "2,2", "--verify", "--no-timings"]
    print("$", " ".join(cmd[2:]))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print("exit code:", proc.returncode)

    report = json.loads(proc.stdout)
    print("\nscales reported:")
    for entry in report["scales"]:
        print(f"  scale {entry['scale']}: betti = {entry['betti']}")
    print("verify:", report["verify"])
    print("\nfull report keys:", list(report))
    print("(exit codes: 0 ok, 1 usage, 2 data, 3 budget, 4 verify mismatch)")

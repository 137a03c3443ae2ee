"""Write an NNet file, simplify it with the command-line tool, read the result."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from nnsimplify.fixtures import planted_dead_network
from nnsimplify.network import to_document
from nnsimplify.nnet_io import read_nnet_file, write_nnet_file

workdir = Path(tempfile.mkdtemp())
planted = planted_dead_network(np.random.default_rng(8), normalize=True)
write_nnet_file(workdir / "net.nnet", to_document(planted.net, ["// demo network"]))

cmd = [
    sys.executable, "-m", "nnsimplify", str(workdir / "net.nnet"),
    "--out", str(workdir / "small.nnet"),
    "--report", str(workdir / "report.json"),
    "--jobs", "1", "--budget", "100000", "-q",
]
proc = subprocess.run(cmd, capture_output=True, text=True)
print("exit status:", proc.returncode)
print(proc.stdout.strip())

report = json.loads((workdir / "report.json").read_text())
for row in report["verdicts"]:
    print(f"  {row['node']}: {row['verdict']} ({row['regions']} regions)")
print("before:", read_nnet_file(workdir / "net.nnet").layer_sizes)
print("after: ", read_nnet_file(workdir / "small.nnet").layer_sizes)
print("files in", workdir)

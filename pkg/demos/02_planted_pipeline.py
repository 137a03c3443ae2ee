"""Run the full pipeline on a random network with planted dead neurons."""

import json
import logging

import numpy as np

from nnsimplify.fixtures import planted_dead_network
from nnsimplify.pipeline import PipelineConfig, emit_report, run_network

logging.basicConfig(level=logging.INFO, format="  %(message)s")

planted = planted_dead_network(np.random.default_rng(3), hidden_sizes=[12, 10, 8], n_dead=3)
print("layer sizes:", planted.net.layer_sizes)
print("planted dead:", sorted(str(n) for n in planted.planted), flush=True)

print("per-query log:", flush=True)
result = run_network(planted.net, PipelineConfig(workers=1, timeout=None, budget=100_000))
report = json.loads(emit_report(result.report, timings=False))

totals = report["totals"]
print(
    f"candidates {totals['candidates']}, dead {totals['dead']}, alive {totals['alive']}, "
    f"unknown {totals['unknown']}, cascade {totals['cascade_removed']}"
)
print(f"hidden neurons {totals['original_hidden']} -> {totals['simplified_hidden']}")
print("simplified layer sizes:", result.network.layer_sizes)
print("max deviation:", report["equivalence"]["max_deviation"])

"""Walk a tiny network through the three stages by hand.

Two hidden neurons compute relu(x) twice, a third subtracts one copy from
the other, and the output reads that difference.  The difference is
always zero, so the whole network should shrink to the constant 0.
"""

import numpy as np

from nnsimplify.bounds import concrete_bounds, symbolic_bounds
from nnsimplify.fixtures import cancelling_network
from nnsimplify.network import evaluate_batch, truncate
from nnsimplify.simplifier import check_equivalence, simplify
from nnsimplify.simulation import SimulationConfig, filter_candidates
from nnsimplify.verifier import make_query, verify

net = cancelling_network()
print("layer sizes:", net.layer_sizes)
xs = np.linspace(-1, 1, 5)[:, None]
print("outputs on a grid:", evaluate_batch(net, xs)[:, 0])

# Stage 1: random inputs. v2 and v3 fire for x > 0; v4 never does.
candidates = filter_candidates(net, SimulationConfig(num_samples=1000, seed=0))
print("candidates after simulation:", [str(n) for n in candidates.sorted()])

# Plain intervals cannot see the cancellation; symbolic bounds can.
v4 = candidates.sorted()[0]
sub = truncate(net, v4)
conc = concrete_bounds(sub)
sym = symbolic_bounds(sub)
print(f"interval bound on v4:  [{conc.output_lower:.3g}, {conc.output_upper:.3g}]")
print(f"symbolic bound on v4:  [{sym.output_lower:.3g}, {sym.output_upper:.3g}]")

# Stage 2: prove it.
verdict = verify(make_query(net, v4))
print(f"verdict for {v4}: {verdict.kind} after {verdict.regions} region(s)")

# Stage 3: remove v4; v2 and v3 lose their only outgoing edges.
simplified, plan = simplify(net, {v4: verdict.kind})
for node, reason in plan.cascade_removed:
    print(f"cascade removed {node}: {reason}")
print("result:", plan.result_kind, plan.constant_output)
print("max deviation on 10^4 samples:", check_equivalence(net, simplified).max_deviation)

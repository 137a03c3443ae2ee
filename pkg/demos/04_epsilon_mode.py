"""Approximate removal: neurons that stay below a small epsilon.

Strict mode only removes neurons that are exactly zero everywhere, which
keeps the network's outputs bit-identical.  Epsilon mode also removes
neurons whose pre-activation never reaches epsilon.  The outputs can then
move, but never by more than a bound computed from the weights.
"""

import numpy as np

from nnsimplify.fixtures import random_network
from nnsimplify.simplifier import check_equivalence, epsilon_deviation_bound, simplify
from nnsimplify.verifier import Epsilon, Strict, make_query, verify

rng = np.random.default_rng(5)
net = random_network(rng, [3, 16, 16, 1], bias_scale=0.6)
# push a few neurons just barely positive
biases = [np.array(b) for b in net.biases]
biases[0][:4] -= 1.6
net = net.replace(biases=tuple(biases))

for mode in (Strict(), Epsilon(0.05), Epsilon(0.3)):
    dead = {n for n in net.hidden_nodes() if verify(make_query(net, n, mode)).is_dead}
    simplified, plan = simplify(net, dead)
    target = plan.constant_output if plan.result_kind == "constant" else simplified
    observed = check_equivalence(net, target).max_deviation
    eps = getattr(mode, "epsilon", 0.0)
    bound = epsilon_deviation_bound(net, dead, eps)[0]
    print(
        f"{str(mode):>14}: removed {plan.removed_count:2d} of {net.hidden_count}, "
        f"observed deviation {observed:.3g}, bound {bound:.3g}"
    )

"""Compare branch and bound verdicts with the exact oracle on random queries.

The oracle enumerates ReLU phase patterns and solves each with exact
rational arithmetic, so it is slow but never wrong.  The verifier works
in floating point with outward-rounded bounds.
"""

import time

import numpy as np

from nnsimplify.fixtures import random_query_network
from nnsimplify.oracle import oracle_verdict
from nnsimplify.verifier import Strict, make_query, verify

rng = np.random.default_rng(11)
print(f"{'node':>6} {'hidden':>6} {'verdict':>8} {'regions':>8} {'oracle':>7} {'exact max':>12}")
agree = 0
t_verify = t_oracle = 0.0
for _ in range(25):
    net, node = random_query_network(rng)
    query = make_query(net, node, Strict())
    t0 = time.perf_counter()
    verdict = verify(query)
    t1 = time.perf_counter()
    kind, exact = oracle_verdict(query)
    t2 = time.perf_counter()
    t_verify += t1 - t0
    t_oracle += t2 - t1
    agree += verdict.kind == kind
    print(
        f"{str(node):>6} {query.subnet.hidden_count:>6} {verdict.kind:>8} {verdict.regions:>8} "
        f"{kind:>7} {float(exact.value):>12.4g}"
    )
print(f"agreement {agree}/25; verifier {t_verify:.2f}s, oracle {t_oracle:.2f}s")

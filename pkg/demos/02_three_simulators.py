"""
Three exact simulators, one answer
==================================

State vector, full unitary and density matrix all produce the same output
distribution.  What differs is the cost: the matrix methods do O(4**n) work per gate.
"""

import time

from groverlab import GroverSpec, build_grover, print_program
from groverlab.distribution import total_variation
from groverlab.simulator import simulate

for n in range(2, 9):
    text = print_program(build_grover(GroverSpec.optimal(n, ["1" * n])))
    dists, times = {}, {}
    for method in ("sv", "unitary", "dm"):
        start = time.perf_counter()
        dists[method] = simulate(text, method)
        times[method] = time.perf_counter() - start
    tv = max(total_variation(dists["sv"], dists[m]) for m in ("unitary", "dm"))
    p = dists["sv"].probs["1" * n]
    print(
        f"n={n}  P(marked)={p:.4f}  max TV={tv:.1e}  "
        + "  ".join(f"{m}={times[m] * 1e3:7.1f} ms" for m in times)
    )

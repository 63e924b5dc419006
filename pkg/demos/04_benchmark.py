"""
A small benchmark sweep
=======================

Generate seeded oracle-only fragments, score the analyzer and the state-vector
simulator with search accuracy and classical fidelity, and time every method.
Degenerate instances, where even the ideal output leaves each marked state below
tau, are reported on their own rows.
"""

import sys

from groverlab import bench

config = bench.BenchConfig(n_min=2, n_max=6, samples=20, seed=7, mode="oracle_only", methods=("analyzer", "sv", "dm"))
samples = bench.build_samples(config)
print(len(samples), "samples")

records = []
for method in ("analyzer", "sv"):
    result = bench.evaluate_method(method, samples, config.tau)
    print(method, "degenerate configs:", result.degenerate)
    records += result.reports

records += bench.time_methods(config)
sys.stdout.write(bench.report_csv(records))

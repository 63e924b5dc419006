"""Acceptance criteria, each at its stated tolerance.

A one-line PASS/FAIL summary per criterion is printed at the end of the pytest run.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from groverlab import bench
from groverlab.analyzer import analyze, trace_distribution
from groverlab.circuits import FULL, ORACLE_ONLY, GroverSpec, all_specs, build_grover, optimal_iterations, sample_specs
from groverlab.cli import main as cli_main
from groverlab.distribution import Distribution, total_variation
from groverlab.metrics import classical_fidelity, classical_fidelity_arrays, search_accuracy, state_fidelity
from groverlab.qasm import GateCall, QasmProgram, print_program
from groverlab.simulator import circuit_unitary, dm_simulate, sv_simulate, unitary_simulate
from groverlab.tokenizer import char_count_baseline, line_level_tokenize, tokenize_line, tokenize_program

pytestmark = pytest.mark.slow

SEED = 42
TAU = 0.3


def _t_range(n):
    return range(1, min(n, 3) + 1)


def _specs(n, t, exhaustive_upto, count):
    if n <= exhaustive_upto:
        return list(all_specs(n, t))
    return sample_specs(n, t, min(count, math.comb(2**n, t)), bench.sub_seed(SEED, n, t))


def _formula(n, t, k):
    """Closed form, evaluated independently of the analyzer."""
    theta = math.asin(math.sqrt(t / 2**n))
    return math.sin((2 * k + 1) * theta) ** 2 / t, math.cos((2 * k + 1) * theta) ** 2 / (2**n - t)


@pytest.mark.acceptance(1, "worked example: n=4, marked {0111, 1101}, k=2")
def test_worked_example(record_property):
    start = time.perf_counter()
    trace = analyze(print_program(build_grover(GroverSpec(4, ("0111", "1101"), 2))), FULL)
    elapsed = time.perf_counter() - start

    assert set(trace.marked_states) == {"0111", "1101"}
    rounded = trace.results.probs
    assert len(rounded) == 16 and not trace.results.truncated
    assert rounded["0111"] == 0.4727 and rounded["1101"] == 0.4727
    assert all(p == 0.0039 for bits, p in rounded.items() if bits not in {"0111", "1101"})

    hit, miss = _formula(4, 2, 2)
    exact = trace_distribution(trace)
    for bits, p in exact.probs.items():
        expected = hit if bits in {"0111", "1101"} else miss
        assert abs(p - expected) <= 5e-5
        assert abs(rounded[bits] - p) <= 5e-5
    assert elapsed < 1.0
    record_property("detail", f"{elapsed * 1e3:.1f} ms")


@pytest.mark.acceptance(2, "analyzer vs state vector: exhaustive n<=5, 100 samples per (n,t) for n=6..9")
def test_analyzer_simulator_equivalence(record_property):
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    flagged = set()
    for n in range(2, 10):
        for t in _t_range(n):
            degenerate = bench.is_degenerate(n, t, optimal_iterations(n, t), TAU)
            for spec in _specs(n, t, exhaustive_upto=5, count=100):
                text = print_program(build_grover(spec, FULL))
                trace = analyze(text, FULL)
                assert trace.marked_states == spec.marked
                pred = trace_distribution(trace)
                truth = sv_simulate(text)[1]
                worst = max(worst, float(np.abs(pred.to_array() - truth.to_array()).max()))
                sa = search_accuracy(pred, spec.marked, TAU)
                if degenerate:
                    flagged.add((n, t))
                    assert sa == 0.0
                else:
                    assert sa == 1.0, spec
                checked += 1
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9
    # t/N = 1/2 at n=2, and 0.28125 < tau per marked state at n=3, t=3
    assert flagged == {(2, 2), (3, 3)}
    assert elapsed < 300
    record_property("detail", f"{checked} circuits, max |analytic-sv| {worst:.1e}, degenerate {sorted(flagged)}, {elapsed:.0f} s")


@pytest.mark.acceptance(3, "oracle-only sweep n=2..13, t<=3: sa_mean=1, cf_mean>=0.9999 per n")
def test_oracle_only_sweep(record_property):
    start = time.perf_counter()
    config = bench.BenchConfig(n_min=2, n_max=13, samples=100, seed=SEED, mode=ORACLE_ONLY)
    samples = bench.build_samples(config)
    result = bench.evaluate_method("analyzer", samples, TAU)
    elapsed = time.perf_counter() - start

    assert result.failures == []
    assert result.degenerate == [(2, 2), (3, 3)]
    for n, t in result.degenerate:
        assert result.report(n, t).sa_mean == 0.0
    worst_cf = 1.0
    for n in config.n_range:
        report = result.report(n)
        assert report.sa_mean == 1.0, report
        assert report.cf_mean >= 0.9999, report
        worst_cf = min(worst_cf, report.cf_mean)
    assert elapsed < 600
    record_property("detail", f"{len(samples)} fragments, min cf_mean {worst_cf:.12f}, {elapsed:.0f} s")


@pytest.mark.acceptance(4, "sv / unitary / dm pairwise total variation <= 1e-7 for n<=8")
def test_cross_simulator_agreement(record_property):
    worst = 0.0
    checked = 0
    for n in range(2, 9):
        count = 20 if n <= 6 else 8
        for t in _t_range(n):
            for spec in _specs(n, t, exhaustive_upto=4, count=count):
                text = print_program(build_grover(spec, FULL))
                dists = [sv_simulate(text)[1], unitary_simulate(text), dm_simulate(text)]
                for p, q in itertools.combinations(dists, 2):
                    worst = max(worst, total_variation(p, q))
                checked += 1
    assert worst <= 1e-7
    record_property("detail", f"{checked} circuits, max TV {worst:.1e}")


@pytest.mark.acceptance(5, "expanded oracle flips exactly the marked amplitudes (n<=5, t<=3)")
def test_oracle_phase(record_property):
    checked = 0
    for n in range(2, 6):
        for t in _t_range(n):
            for spec in _specs(n, t, exhaustive_upto=3, count=100):
                oracle_def = build_grover(spec, ORACLE_ONLY).gate_defs
                applied = QasmProgram(
                    gate_defs=oracle_def, qubit_decl=("q", n), statements=(GateCall("Oracle", tuple(range(n))),)
                )
                u = circuit_unitary(applied)
                expected = np.ones(2**n)
                expected[[int(s, 2) for s in spec.marked]] = -1
                np.testing.assert_allclose(u, np.diag(expected), atol=1e-12)
                checked += 1
    record_property("detail", f"{checked} oracles")


@pytest.mark.acceptance(6, "k_opt and success probabilities for (2,1), (3,1), (4,2)")
def test_analytic_formulas():
    cases = [(2, ("11",), 1, 1.0), (3, ("101",), 2, 0.9453), (4, ("0111", "1101"), 2, 0.4727)]
    for n, marked, k, p_each in cases:
        assert optimal_iterations(n, len(marked)) == k
        hit, _ = _formula(n, len(marked), k)
        assert abs(hit - p_each) <= 1e-4
        dist = sv_simulate(build_grover(GroverSpec(n, marked, k)))[1]
        for s in marked:
            assert abs(dist.probs[s] - p_each) <= 1e-4
        trace = analyze(build_grover(GroverSpec(n, marked, k)))
        assert all(abs(trace_distribution(trace).probs[s] - p_each) <= 1e-4 for s in marked)
    assert sum(sv_simulate(build_grover(GroverSpec(2, ("11",), 1)))[1].probs.values()) == pytest.approx(1.0)
    assert _formula(2, 1, 1)[0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.acceptance(7, "tokenizer examples, vocabulary <= 300, line-level vocabulary grows, compression >= 2")
def test_tokenizer_conformance(record_property):
    assert tokenize_line("gate Oracle _gate_q_0, _gate_q_1 {") == ["gate", "Oracle", "_gate_q_", "_gate_q_", "{"]
    assert tokenize_line("x _gate_q_3;") == ["x", "_gate_q_"]
    assert tokenize_line("rz(0.5) q[1];") == ["rz", "(", "0.5", ")", "q[1]"]
    assert tokenize_line("}") == ["}"]

    quantum_vocab = set()
    line_sizes = []
    worst_ratio = math.inf
    for n in range(2, 10):
        line_vocab = set()
        for t in _t_range(n):
            for spec in _specs(n, t, exhaustive_upto=0, count=100):
                text = print_program(build_grover(spec, FULL))
                tokens = tokenize_program(text)
                quantum_vocab.update(tokens)
                line_vocab.update(line_level_tokenize(text))
                worst_ratio = min(worst_ratio, char_count_baseline(text) / len(tokens))
        line_sizes.append(len(line_vocab))
    assert len(quantum_vocab) <= 300
    assert all(a < b for a, b in zip(line_sizes, line_sizes[1:]))
    assert worst_ratio >= 2.0
    record_property(
        "detail", f"quantum vocab {len(quantum_vocab)}, line vocab {line_sizes}, min compression {worst_ratio:.2f}"
    )


@pytest.mark.acceptance(8, "metric properties on 1000 seeded cases each")
def test_metric_properties():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        size = 2**n
        p = rng.dirichlet(np.full(size, 0.5))
        q = rng.dirichlet(np.full(size, 0.5))
        dp, dq = Distribution.from_array(p, n), Distribution.from_array(q, n)
        cf = classical_fidelity(dp, dq)
        assert 0.0 <= cf <= 1.0
        assert cf == classical_fidelity(dq, dp)
        assert abs(classical_fidelity(dp, dp) - 1.0) <= 1e-12

    for _ in range(1000):
        dim = 2 ** int(rng.integers(2, 7))
        a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        b = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        assert classical_fidelity_arrays(np.abs(a) ** 2, np.abs(b) ** 2) >= state_fidelity(a, b) - 1e-12

    for _ in range(1000):
        n = int(rng.integers(2, 7))
        p = Distribution.from_array(rng.dirichlet(np.full(2**n, 0.3)), n)
        t = int(rng.integers(1, 4))
        truth = {format(int(i), f"0{n}b") for i in rng.choice(2**n, size=t, replace=False)}
        lo, hi = np.sort(rng.random(2))
        assert search_accuracy(p, truth, float(hi)) <= search_accuracy(p, truth, float(lo))


@pytest.mark.acceptance(9, "timing trends: S(2)=1, dm slower than sv at n>=7, analyzer S(9)<=10")
def test_timing_trends(record_property):
    config = bench.BenchConfig(n_min=2, n_max=9, seed=SEED, mode=ORACLE_ONLY, methods=bench.METHOD_NAMES, repeats=3)
    failures = []
    for attempt in range(1, 4):
        records = bench.time_methods(config)
        by = {(r.method, r.n): r for r in records}
        problems = [f"S(2) of {m} is {by[(m, 2)].relative}" for m in config.methods if by[(m, 2)].relative != 1.0]
        problems += [f"dm not slower than sv at n={n}" for n in (7, 8, 9) if by[("dm", n)].mean <= by[("sv", n)].mean]
        s9 = by[("analyzer", 9)].relative
        if s9 > 10:
            problems.append(f"analyzer S(9) = {s9:.2f}")
        if not problems:
            break
        failures.append(problems)
    assert not problems, failures
    ratios = ", ".join(f"dm/sv@{n}={by[('dm', n)].mean / by[('sv', n)].mean:.0f}" for n in (7, 9))
    record_property("detail", f"attempt {attempt}, analyzer S(9)={s9:.2f}, {ratios}")


@pytest.mark.acceptance(10, "generate is byte-reproducible for a fixed config and seed")
def test_generate_reproducible(tmp_path, monkeypatch):
    monkeypatch.delenv(bench.SEED_ENV, raising=False)
    args = ["generate", "--n-min", "2", "--n-max", "6", "--samples", "10", "--seed", "123"]
    assert cli_main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli_main(args + ["--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "manifest.json").read_bytes()
    assert first == (tmp_path / "b" / "manifest.json").read_bytes()
    for entry in json.loads(first)["artifacts"]:
        assert (tmp_path / "a" / entry["path"]).read_bytes() == (tmp_path / "b" / entry["path"]).read_bytes()
    assert cli_main(args[:-1] + ["124", "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "manifest.json").read_bytes() != first

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groverlab.analyzer import (
    MarkBlock,
    OracleEntity,
    analytic_distribution,
    analytic_params,
    analyze,
    extract_oracle,
    grover_angle,
    infer_marked_state,
    parse_trace,
    render_trace,
    segment_blocks,
    trace_distribution,
    trace_json,
)
from groverlab.circuits import FULL, ORACLE_ONLY, GroverSpec, build_grover, formal
from groverlab.errors import DomainError, DuplicateMarkedState, MalformedOracle, OracleNotFound, QasmSyntaxError
from groverlab.qasm import GateCall, GateDef, QasmProgram, parse_program, print_program
from groverlab.simulator import sv_simulate

from conftest import WORKED_TRACE_HEAD

HEADER = 'OPENQASM 3.0;\ninclude "stdgates.inc";\n'


def _entity(n, body):
    return OracleEntity(tuple(formal(i) for i in range(n)), tuple(body))


def _x(i):
    return GateCall("x", (formal(i),))


def _mcmt(n):
    return GateCall("mcmt", tuple(formal(i) for i in range(n)))


@pytest.fixture
def worked_program():
    return build_grover(GroverSpec(4, ("0111", "1101"), 2))


def test_extract_worked_oracle(worked_program, worked_oracle):
    assert extract_oracle(worked_program).lines() == worked_oracle


def test_extract_prompt_oracle(prompt_listing):
    entity = extract_oracle(parse_program(prompt_listing))
    assert [s.name for s in entity.statements] == ["x", "x", "mcmt", "x", "x"]


def test_extract_errors():
    with pytest.raises(OracleNotFound):
        extract_oracle(parse_program(HEADER + "qubit[2] q;\nh q[0];"))
    bad = parse_program(HEADER + "gate Oracle a, b { h a; cz a, b; }")
    with pytest.raises(MalformedOracle):
        extract_oracle(bad)
    no_mcmt = QasmProgram(gate_defs=(GateDef("Oracle", ("a",), (), (GateCall("x", ("a",)),)),))
    with pytest.raises(MalformedOracle):
        extract_oracle(no_mcmt)


def test_segment_worked_oracle(worked_program):
    blocks = segment_blocks(extract_oracle(worked_program), 4)
    assert [(set(b.pre_x), b.mcmt_args, set(b.post_x)) for b in blocks] == [
        ({3}, (0, 1, 2, 3), {3}),
        ({1}, (0, 1, 2, 3), {1}),
    ]


def test_segment_lone_mcmt():
    (block,) = segment_blocks(_entity(3, [_mcmt(3)]))
    assert block.pre_x == block.post_x == frozenset()


@pytest.mark.parametrize(
    "body, n",
    [
        ([_x(0), _mcmt(2), _x(1)], 2),
        ([_x(0), _mcmt(2)], 2),
        ([_mcmt(2), _x(0)], 2),
        ([_x(0), _x(0), _mcmt(2), _x(0), _x(0)], 2),
        ([_x(0), _mcmt(2), _x(0), _x(1)], 2),
        ([_x(0), _mcmt(2), _x(0)], 3),
    ],
    ids=["asymmetric", "missing-post", "trailing-x", "repeated-x", "extra-trailing", "short-mcmt"],
)
def test_segment_malformed(body, n):
    with pytest.raises(MalformedOracle):
        segment_blocks(_entity(n, body))


@pytest.mark.parametrize("pre, n, state", [({3}, 4, "0111"), ({1}, 4, "1101"), (set(), 3, "111"), ({0, 1}, 2, "00")])
def test_infer_marked_state(pre, n, state):
    block = MarkBlock(frozenset(pre), tuple(range(n)), frozenset(pre))
    assert infer_marked_state(block, n) == state


def test_infer_rejects_mismatched_sets():
    with pytest.raises(MalformedOracle):
        infer_marked_state(MarkBlock(frozenset({0}), (0, 1), frozenset({1})), 2)


def test_grover_angle():
    assert grover_angle(2, 1) == pytest.approx(math.pi / 6)
    assert grover_angle(4, 2) == pytest.approx(0.361367, abs=1e-6)
    assert grover_angle(2, 2) == pytest.approx(math.pi / 4)
    for bad in [(2, 0), (2, 4)]:
        with pytest.raises(DomainError):
            grover_angle(*bad)


def test_analytic_examples():
    d = analytic_distribution(4, ["0111", "1101"], 2)
    assert d.probs["0111"] == pytest.approx(0.472656, abs=1e-6)
    assert d.probs["0000"] == pytest.approx(0.003906, abs=1e-6)
    d = analytic_distribution(2, ["00"], 1)
    assert d.probs["00"] == pytest.approx(1.0)
    assert all(d.probs[s] == pytest.approx(0.0, abs=1e-15) for s in ("01", "10", "11"))
    d = analytic_distribution(3, ["101"], 0)
    np.testing.assert_allclose(d.to_array(), np.full(8, 1 / 8))
    with pytest.raises(DomainError):
        analytic_params(3, 1, -1)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 20), st.integers(1, 3), st.integers(0, 50))
def test_analytic_params_bookkeeping(n, t, k):
    p = analytic_params(n, t, k)
    assert p.p_marked_total == pytest.approx(t * p.p_marked_each, abs=1e-15)
    assert p.p_marked_total + (2**n - t) * p.p_unmarked_each == pytest.approx(1.0, abs=1e-12)


def test_analyze_worked_example(worked_program):
    trace = analyze(worked_program)
    assert trace.marked_states == ("0111", "1101")
    assert trace.k == 2
    results = list(trace.results.probs.items())
    assert results[:2] == [("0111", 0.4727), ("1101", 0.4727)]
    assert [p for _, p in results[2:]] == [0.0039] * 14
    assert not trace.results.truncated


def test_render_worked_example(worked_program):
    text = render_trace(analyze(print_program(worked_program)))
    assert text.startswith(WORKED_TRACE_HEAD)
    assert text.endswith(" '1111': 0.0039,\n}\n")


def test_analyze_prompt_listing(prompt_listing):
    trace = analyze(prompt_listing)
    assert trace.marked_states == ("00",)
    assert trace.k == 1
    assert trace.results.probs["00"] == 1.0


def test_analyze_oracle_only():
    text = print_program(build_grover(GroverSpec.optimal(3, ["110"]), ORACLE_ONLY))
    trace = analyze(text, ORACLE_ONLY)
    assert trace.marked_states == ("110",)
    assert trace.k == 2
    assert trace.results.probs["110"] == 0.9453


def test_single_block_render_shape():
    text = render_trace(analyze(build_grover(GroverSpec.optimal(2, ["01"]))))
    assert text.count("=== ") == 4
    assert sum(line.startswith("x _gate_q_") and "then" in line for line in text.splitlines()) == 2


def test_results_truncated_and_ordered():
    trace = analyze(build_grover(GroverSpec.optimal(6, ["000011", "100000"]), ORACLE_ONLY), ORACLE_ONLY)
    items = list(trace.results.probs.items())
    assert len(items) == 30 and trace.results.truncated
    assert [b for b, _ in items[:2]] == ["000011", "100000"]
    for (b1, p1), (b2, p2) in zip(items, items[1:]):
        assert p1 > p2 or (p1 == p2 and int(b1, 2) < int(b2, 2))
    assert render_trace(trace).endswith("...\n}\n")


def test_results_keep_zero_entries():
    # k=1 at n=2 pushes all unmarked mass to exactly zero
    trace = analyze(build_grover(GroverSpec.optimal(2, ["10"])))
    assert list(trace.results.probs) == ["10", "00", "01", "11"]
    assert trace.results.probs["00"] == 0.0


def test_degenerate_results_tie_break():
    # t/N = 1/2 leaves the state uniform: everything ties and sorts by integer value
    trace = analyze(build_grover(GroverSpec.optimal(2, ["11", "01"])))
    assert list(trace.results.probs) == ["00", "01", "10", "11"]
    assert set(trace.results.probs.values()) == {0.25}


def test_duplicate_block_rejected():
    oracle = GateDef("Oracle", (formal(0), formal(1)), (), (_mcmt(2), _mcmt(2)))
    with pytest.raises(DuplicateMarkedState) as info:
        analyze(QasmProgram(gate_defs=(oracle,)), ORACLE_ONLY)
    assert info.value.stage == "infer"


def test_errors_carry_stage():
    with pytest.raises(QasmSyntaxError) as info:
        analyze("OPENQASM 3.0;\nbanana")
    assert info.value.stage == "parse"
    with pytest.raises(OracleNotFound) as info:
        analyze(HEADER + "qubit[1] q;\nh q[0];")
    assert info.value.stage == "extract"
    with pytest.raises(MalformedOracle) as info:
        analyze(HEADER + "gate Oracle a, b { x a; cz a, b; }")
    assert info.value.stage == "extract"
    with pytest.raises(MalformedOracle) as info:
        analyze(HEADER + "gate mcmt a, b { cz a, b; }\ngate Oracle a, b { x a; mcmt a, b; x b; }")
    assert info.value.stage == "segment"
    with pytest.raises(DomainError):
        analyze(HEADER, "sideways")


def test_parse_render_round_trip(worked_program):
    trace = analyze(worked_program)
    text = render_trace(trace)
    back = parse_trace(text)
    assert render_trace(back) == text
    assert back.marked_states == trace.marked_states
    assert back.blocks == trace.blocks
    big = render_trace(analyze(build_grover(GroverSpec.optimal(7, ["0000001"]), ORACLE_ONLY), ORACLE_ONLY))
    assert render_trace(parse_trace(big)) == big


def test_trace_json(worked_program):
    import json

    data = json.loads(trace_json(analyze(worked_program)))
    assert data["marked"] == ["0111", "1101"]
    assert data["k"] == 2
    assert data["results"]["0111"] == 0.4727
    assert len(data["blocks"]) == 2


specs = st.integers(2, 7).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(0, 2**n - 1), min_size=1, max_size=min(n, 3)))
)


@settings(max_examples=80, deadline=None)
@given(specs, st.sampled_from([FULL, ORACLE_ONLY]))
def test_end_to_end_marked_set(case, mode):
    n, ints = case
    marked = tuple(format(i, f"0{n}b") for i in ints)
    spec = GroverSpec.optimal(n, marked)
    trace = analyze(print_program(build_grover(spec, mode)), mode)
    assert trace.marked_states == marked
    assert trace.k == spec.k
    assert len(trace.blocks) == len(marked)
    assert all(len(b.final_state) == n for b in trace.blocks)


@settings(max_examples=40, deadline=None)
@given(specs)
def test_trace_distribution_matches_simulation(case):
    n, ints = case
    spec = GroverSpec.optimal(n, tuple(format(i, f"0{n}b") for i in ints))
    program = build_grover(spec)
    dist = trace_distribution(analyze(program))
    assert math.fsum(dist.probs.values()) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(dist.to_array(), sv_simulate(program)[1].to_array(), atol=1e-9, rtol=0)

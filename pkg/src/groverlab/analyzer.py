"""Deterministic symbolic analysis of Grover circuits.

The pipeline mirrors a human reading of the QASM: pull the ``Oracle``
definition out of the program, cut it into one block per ``mcmt``, read each
block's X pattern as a marked bitstring, then write down the output
distribution from the closed-form amplitude-amplification formulas instead of
evolving a state.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .circuits import FULL, MODES, ORACLE_ONLY, bitstring, optimal_iterations, validate_marked
from .distribution import Distribution
from .errors import (
    DomainError,
    DuplicateMarkedState,
    GroverLabError,
    MalformedOracle,
    OracleNotFound,
)
from .qasm import GateCall, QasmProgram, count_iterations, parse_program

RESULTS_LIMIT = 30
DECIMALS = 4
ARROW = "→"


@dataclass(frozen=True)
class OracleEntity:
    """Body of the oracle definition, still in formal-qubit form."""

    formal_qubits: tuple[str, ...]
    statements: tuple[GateCall, ...]

    @property
    def n(self) -> int:
        return len(self.formal_qubits)

    def lines(self) -> list[str]:
        return [statement_text(s) for s in self.statements]


@dataclass(frozen=True)
class MarkBlock:
    pre_x: frozenset[int]
    mcmt_args: tuple[int, ...]
    post_x: frozenset[int]
    statements: tuple[GateCall, ...] = ()


@dataclass(frozen=True)
class Step:
    qubit: int
    present: bool
    bit: str
    accumulated: str


@dataclass(frozen=True)
class TraceBlock:
    lines: tuple[str, ...]
    steps: tuple[Step, ...]
    final_state: str


@dataclass(frozen=True)
class AnalyticParams:
    theta: float
    k: int
    p_marked_total: float
    p_marked_each: float
    p_unmarked_each: float


@dataclass(frozen=True)
class ReasoningTrace:
    n: int
    k: int
    oracle_lines: tuple[str, ...]
    formal_qubits: tuple[str, ...]
    blocks: tuple[TraceBlock, ...]
    marked_states: tuple[str, ...]
    results: Distribution

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "oracle": list(self.oracle_lines),
            "blocks": [
                {
                    "lines": list(b.lines),
                    "steps": [
                        {"qubit": s.qubit, "present": s.present, "bit": s.bit, "state": s.accumulated}
                        for s in b.steps
                    ],
                    "final_state": b.final_state,
                }
                for b in self.blocks
            ],
            "marked": list(self.marked_states),
            "results": dict(self.results.probs),
            "truncated": self.results.truncated,
        }


def statement_text(call: GateCall) -> str:
    head = call.name if not call.args else f"{call.name}({', '.join(str(a) for a in call.args)})"
    return f"{head} {', '.join(str(q) for q in call.qubits)};"


# --------------------------------------------------------------------------
# extraction and segmentation


def extract_oracle(program: QasmProgram, name: str = "Oracle") -> OracleEntity:
    """Return the oracle definition body; a lone definition is accepted as the oracle."""
    g = program.gate(name)
    if g is None and len(program.gate_defs) == 1:
        g = program.gate_defs[0]
    if g is None:
        raise OracleNotFound(f"no gate definition named {name!r}")
    if not any(s.name == "mcmt" for s in g.body):
        raise MalformedOracle(f"{g.name} contains no mcmt")
    for s in g.body:
        if s.name not in ("x", "mcmt"):
            raise MalformedOracle(f"{g.name} body contains {s.name!r}; only x and mcmt are allowed")
    return OracleEntity(g.formal_qubits, g.body)


def segment_blocks(entity: OracleEntity, n: int | None = None) -> list[MarkBlock]:
    """Split the oracle at each ``mcmt``; the x gates after it must mirror the ones before it."""
    n = entity.n if n is None else n
    index = {q: i for i, q in enumerate(entity.formal_qubits)}
    body = list(entity.statements)
    blocks: list[MarkBlock] = []
    i = 0
    while i < len(body):
        start = i
        pre: list[int] = []
        while i < len(body) and body[i].name == "x":
            pre.append(index[body[i].qubits[0]])
            i += 1
        if i == len(body):
            raise MalformedOracle(f"trailing x gates on qubits {pre} with no mcmt")
        if len(set(pre)) != len(pre):
            raise MalformedOracle(f"repeated x on the same qubit before mcmt: {pre}")
        args = tuple(index[q] for q in body[i].qubits)
        if sorted(args) != list(range(n)):
            raise MalformedOracle(f"mcmt acts on {args}, expected all {n} qubits")
        i += 1
        post = [index[s.qubits[0]] for s in body[i:i + len(pre)] if s.name == "x"]
        if len(post) != len(pre) or set(post) != set(pre):
            raise MalformedOracle(f"x gates around mcmt do not mirror: before {pre}, after {post}")
        i += len(pre)
        blocks.append(MarkBlock(frozenset(pre), args, frozenset(post), tuple(body[start:i])))
    return blocks


def state_construction(block: MarkBlock, n: int) -> list[Step]:
    """Walk qubits 0..n-1: an X means bit 0, none means 1; each bit is prepended."""
    acc = ""
    steps = []
    for q in range(n):
        present = q in block.pre_x
        bit = "0" if present else "1"
        acc = bit + acc
        steps.append(Step(q, present, bit, acc))
    return steps


def infer_marked_state(block: MarkBlock, n: int) -> str:
    if block.pre_x != block.post_x:
        raise MalformedOracle("block x sets differ")
    return state_construction(block, n)[-1].accumulated


# --------------------------------------------------------------------------
# closed-form distribution


def grover_angle(n: int, t: int) -> float:
    N = 2**n
    if not 1 <= t < N:
        raise DomainError(f"need 1 <= t < N={N}, got t={t}")
    return math.asin(math.sqrt(t / N))


def analytic_params(n: int, t: int, k: int) -> AnalyticParams:
    if k < 0:
        raise DomainError(f"iteration count must be >= 0, got {k}")
    theta = grover_angle(n, t)
    angle = (2 * k + 1) * theta
    hit = math.sin(angle) ** 2
    miss = math.cos(angle) ** 2
    return AnalyticParams(theta, k, hit, hit / t, miss / (2**n - t))


def analytic_distribution(n: int, marked: Sequence[str], k: int) -> Distribution:
    """Full distribution: sin^2((2k+1)theta)/t per marked state, cos^2((2k+1)theta)/(N-t) elsewhere."""
    marked = validate_marked(n, marked)
    params = analytic_params(n, len(marked), k)
    hits = set(marked)
    probs = {}
    for i in range(2**n):
        bits = bitstring(i, n)
        probs[bits] = params.p_marked_each if bits in hits else params.p_unmarked_each
    return Distribution(n, probs)


def top_results(n: int, marked: Sequence[str], params: AnalyticParams, limit: int = RESULTS_LIMIT) -> Distribution:
    """Rounded, ranked, truncated view of the analytic distribution without materialising 2**n entries.

    Ranking is by rounded probability, ties by ascending integer value.
    """
    pm = round(params.p_marked_each, DECIMALS)
    pu = round(params.p_unmarked_each, DECIMALS)
    hit_ints = sorted(int(s, 2) for s in marked)
    hit_set = set(hit_ints)
    N = 2**n

    def unmarked() -> Iterator[int]:
        return (i for i in range(N) if i not in hit_set)

    if pm > pu:
        order: Iterator[int] = itertools.chain(hit_ints, unmarked())
    elif pm < pu:
        order = itertools.chain(unmarked(), hit_ints)
    else:
        order = iter(range(N))
    probs = {}
    for i in itertools.islice(order, limit):
        probs[bitstring(i, n)] = pm if i in hit_set else pu
    return Distribution(n, probs, truncated=N > limit)


# --------------------------------------------------------------------------
# pipeline


def _stage(stage: str, fn, *args):
    try:
        return fn(*args)
    except GroverLabError as exc:
        exc.stage = stage
        raise


def analyze(program: QasmProgram | str, mode: str = FULL, limit: int = RESULTS_LIMIT) -> ReasoningTrace:
    """Extract, segment, infer and price a Grover circuit.

    Full mode counts (Oracle; Diffuser) pairs in the program for ``k``;
    oracle-only mode uses the optimal iteration count for the inferred ``t``.
    Errors keep their type and gain a ``stage`` attribute naming the failing step.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if isinstance(program, str):
        program = _stage("parse", parse_program, program)
    entity = _stage("extract", extract_oracle, program)
    n = entity.n
    if mode == FULL and program.qubit_decl is not None and program.qubit_decl[1] != n:
        exc = MalformedOracle(f"oracle acts on {n} qubits but the register has {program.qubit_decl[1]}")
        exc.stage = "extract"
        raise exc
    blocks = _stage("segment", segment_blocks, entity, n)

    trace_blocks = []
    marked: list[str] = []
    for block in blocks:
        steps = state_construction(block, n)
        state = steps[-1].accumulated
        if state in marked:
            exc = DuplicateMarkedState(f"state {state} is marked by more than one block")
            exc.stage = "infer"
            raise exc
        marked.append(state)
        trace_blocks.append(TraceBlock(tuple(statement_text(s) for s in block.statements), tuple(steps), state))

    t = len(marked)
    if mode == FULL:
        k = count_iterations(program)
    else:
        k = _stage("distribution", optimal_iterations, n, t)
    params = _stage("distribution", analytic_params, n, t, k)
    results = top_results(n, marked, params, limit)
    return ReasoningTrace(n, k, tuple(entity.lines()), entity.formal_qubits, tuple(trace_blocks), tuple(marked), results)


def trace_distribution(trace: ReasoningTrace) -> Distribution:
    """Unrounded full distribution implied by a trace."""
    return analytic_distribution(trace.n, trace.marked_states, trace.k)


# --------------------------------------------------------------------------
# text form


def render_trace(trace: ReasoningTrace) -> str:
    out = ["=== Analysis ===", "The Oracle entity is extracted below:"]
    out += [f"  {line}" for line in trace.oracle_lines]
    for number, block in enumerate(trace.blocks, 1):
        out += ["", f"=== Block {number} ===", "Operation sequence:"]
        out += list(block.lines)
        out.append("State construction:")
        for s in block.steps:
            word = "Present" if s.present else "Absent"
            out.append(f"x {trace.formal_qubits[s.qubit]}: {word} {ARROW} {s.bit}, then {ARROW} {s.accumulated}")
        out.append(f"Final state: {block.final_state}")
    out += ["", "=== Final Marked States ==="]
    out += list(trace.marked_states)
    out += ["", "=== Results ===", "{"]
    out += [f" '{bits}': {p:.{DECIMALS}f}," for bits, p in trace.results.probs.items()]
    if trace.results.truncated:
        out.append("...")
    out.append("}")
    return "\n".join(out) + "\n"


_STEP_RE = re.compile(rf"^x (\S+): (Present|Absent) {ARROW} ([01]), then {ARROW} ([01]+)$")
_RESULT_RE = re.compile(r"^ '([01]+)': ([0-9.]+),$")
_CALL_RE = re.compile(r"^(\w+) ([^;]+);$")


def _parse_call(line: str) -> GateCall:
    m = _CALL_RE.match(line.strip())
    if m is None:
        raise MalformedOracle(f"cannot read oracle line {line!r}")
    return GateCall(m.group(1), tuple(q.strip() for q in m.group(2).split(",")))


def parse_trace(text: str) -> ReasoningTrace:
    """Inverse of :func:`render_trace` (``k`` is not part of the text and is read back as 0)."""
    lines = text.splitlines()
    try:
        i = lines.index("The Oracle entity is extracted below:") + 1
    except ValueError:
        raise MalformedOracle("not a rendered trace") from None
    oracle = []
    while i < len(lines) and lines[i].startswith("  "):
        oracle.append(lines[i].strip())
        i += 1
    formals: list[str] = []
    blocks = []
    while i < len(lines):
        line = lines[i]
        if line.startswith("=== Block "):
            i += 2
            ops = []
            while lines[i] != "State construction:":
                ops.append(lines[i])
                i += 1
            i += 1
            steps = []
            while not lines[i].startswith("Final state: "):
                m = _STEP_RE.match(lines[i])
                if m is None:
                    raise MalformedOracle(f"bad state-construction line {lines[i]!r}")
                if len(steps) >= len(formals):
                    formals.append(m.group(1))
                steps.append(Step(len(steps), m.group(2) == "Present", m.group(3), m.group(4)))
                i += 1
            blocks.append(TraceBlock(tuple(ops), tuple(steps), lines[i].split(": ", 1)[1]))
        elif line == "=== Final Marked States ===":
            break
        i += 1
    i += 1
    marked = []
    while i < len(lines) and lines[i]:
        marked.append(lines[i])
        i += 1
    probs = {}
    truncated = False
    for line in lines[i:]:
        m = _RESULT_RE.match(line)
        if m:
            probs[m.group(1)] = float(m.group(2))
        elif line == "...":
            truncated = True
    if not formals and oracle:
        formals = list(_parse_call(oracle[0]).qubits)
    n = len(formals)
    return ReasoningTrace(n, 0, tuple(oracle), tuple(formals), tuple(blocks), tuple(marked), Distribution(n, probs, truncated))


def trace_json(trace: ReasoningTrace) -> str:
    return json.dumps(trace.to_json(), indent=2)

"""Grover circuit construction: phase oracle, diffuser, full algorithm and marked-set sampling."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DomainError, InvalidMarkedState
from .qasm import GateCall, GateDef, Measure, QasmProgram

FULL = "full"
ORACLE_ONLY = "oracle_only"
MODES = (FULL, ORACLE_ONLY)

DEFAULT_T_CAP = 3


def formal(i: int) -> str:
    return f"_gate_q_{i}"


def bitstring(index: int, n: int) -> str:
    """Basis index -> bitstring with qubit ``n - 1`` leftmost."""
    return format(index, f"0{n}b")


def validate_marked(n: int, marked: Sequence[str]) -> tuple[str, ...]:
    marked = tuple(marked)
    if n < 1:
        raise InvalidMarkedState(f"qubit count must be positive, got {n}")
    if not marked:
        raise InvalidMarkedState("at least one marked state is required")
    for s in marked:
        if not isinstance(s, str) or len(s) != n or set(s) - {"0", "1"}:
            raise InvalidMarkedState(f"{s!r} is not a {n}-bit string")
    if len(set(marked)) != len(marked):
        raise InvalidMarkedState(f"duplicate marked states in {marked}")
    if len(marked) >= 2**n:
        raise InvalidMarkedState(f"t={len(marked)} must be below N={2**n}")
    return marked


@dataclass(frozen=True)
class GroverSpec:
    """Generation request: ``n`` qubits, ordered distinct ``marked`` bitstrings, ``k`` iterations."""

    n: int
    marked: tuple[str, ...]
    k: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"Grover circuits need n >= 2, got {self.n}")
        object.__setattr__(self, "marked", validate_marked(self.n, self.marked))
        if self.k < 0:
            raise DomainError(f"iteration count must be >= 0, got {self.k}")

    @property
    def t(self) -> int:
        return len(self.marked)

    @classmethod
    def optimal(cls, n: int, marked: Sequence[str]) -> "GroverSpec":
        return cls(n, tuple(marked), optimal_iterations(n, len(marked)))


def optimal_iterations(n: int, t: int) -> int:
    """floor((pi/4) * sqrt(N/t)) with N = 2**n."""
    N = 2**n
    if not 1 <= t < N:
        raise DomainError(f"need 1 <= t < N={N}, got t={t}")
    return math.floor(math.pi / 4 * math.sqrt(N / t))


def create_oracle(n: int, marked: Sequence[str]) -> GateDef:
    """Phase oracle: one (x on zero bits, mcmt over all qubits, same x) block per marked state."""
    marked = validate_marked(n, marked)
    qubits = tuple(formal(i) for i in range(n))
    body: list[GateCall] = []
    for state in marked:
        zero_inds = [i for i, ch in enumerate(state[::-1]) if ch == "0"]
        flips = [GateCall("x", (formal(i),)) for i in zero_inds]
        body += flips
        body.append(GateCall("mcmt", qubits))
        body += flips
    return GateDef("Oracle", qubits, (), tuple(body))


def create_mcmt(n: int) -> GateDef:
    """Definition of the all-qubit controlled-Z used by the oracle.

    Two qubits lower to ``cz``; wider registers to ``h``-conjugated ``mcx`` on the last qubit.
    """
    if n < 2:
        raise DomainError("mcmt definition needs at least 2 qubits")
    qubits = tuple(formal(i) for i in range(n))
    if n == 2:
        body = (GateCall("cz", qubits),)
    else:
        last = (qubits[-1],)
        body = (GateCall("h", last), GateCall("mcx", qubits), GateCall("h", last))
    return GateDef("mcmt", qubits, (), body)


def create_diffuser(n: int) -> GateDef:
    if n < 2:
        raise DomainError(f"diffuser needs n >= 2, got {n}")
    qubits = tuple(formal(i) for i in range(n))
    layer = lambda name: [GateCall(name, (q,)) for q in qubits]  # noqa: E731
    last = (qubits[-1],)
    flip = GateCall("cx", qubits) if n == 2 else GateCall("mcx", qubits)
    body = layer("h") + layer("x") + [GateCall("h", last), flip, GateCall("h", last)] + layer("x") + layer("h")
    return GateDef("Diffuser", qubits, (), tuple(body))


def build_grover(spec: GroverSpec, mode: str = FULL) -> QasmProgram:
    """Full Grover program, or the oracle-only fragment (header, ``mcmt`` and ``Oracle`` definitions)."""
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    n = spec.n
    oracle = create_oracle(n, spec.marked)
    mcmt = create_mcmt(n)
    if mode == ORACLE_ONLY:
        return QasmProgram(gate_defs=(mcmt, oracle))
    every = tuple(range(n))
    statements: list = [GateCall("h", (i,)) for i in range(n)]
    for _ in range(spec.k):
        statements += [GateCall("Oracle", every), GateCall("Diffuser", every)]
    statements += [Measure(i, i) for i in range(n)]
    return QasmProgram(
        gate_defs=(mcmt, oracle, create_diffuser(n)),
        qubit_decl=("q", n),
        clbit_decl=("c", n),
        statements=tuple(statements),
    )


def _check_t(n: int, t: int, t_cap: int | None) -> None:
    if t < 1 or t >= 2**n:
        raise DomainError(f"need 1 <= t < 2**n, got n={n}, t={t}")
    if t_cap is not None and t > min(n, t_cap):
        raise DomainError(f"t={t} exceeds min(n, {t_cap}) for n={n}")


def all_specs(n: int, t: int, t_cap: int | None = DEFAULT_T_CAP) -> Iterator[GroverSpec]:
    """Every t-subset of n-bit strings, in lexicographic combination order, with k = k_opt."""
    _check_t(n, t, t_cap)
    k = optimal_iterations(n, t)
    for combo in itertools.combinations(range(2**n), t):
        yield GroverSpec(n, tuple(bitstring(i, n) for i in combo), k)


def sample_specs(n: int, t: int, count: int, seed: int, t_cap: int | None = DEFAULT_T_CAP) -> list[GroverSpec]:
    """``count`` distinct marked sets drawn uniformly from the t-subsets, deterministic in ``seed``."""
    _check_t(n, t, t_cap)
    N = 2**n
    total = math.comb(N, t)
    if count > total:
        raise DomainError(f"count={count} exceeds the {total} distinct {t}-subsets for n={n}")
    rng = random.Random(seed)
    k = optimal_iterations(n, t)
    picks: list[tuple[int, ...]] = []
    if 2 * count >= total:
        combos = list(itertools.combinations(range(N), t))
        for combo in rng.sample(combos, count):
            combo = list(combo)
            rng.shuffle(combo)
            picks.append(tuple(combo))
    else:
        seen: set[frozenset] = set()
        while len(picks) < count:
            combo = tuple(rng.sample(range(N), t))
            key = frozenset(combo)
            if key not in seen:
                seen.add(key)
                picks.append(combo)
    return [GroverSpec(n, tuple(bitstring(i, n) for i in combo), k) for combo in picks]


def default_sample_count(n: int, cap: int = 1024) -> int:
    """max(100, 2**n), capped."""
    return min(max(100, 2**n), cap)

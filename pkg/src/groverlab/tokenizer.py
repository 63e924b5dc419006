"""Quantum-native QASM tokenization, reference tokenizers and corpus statistics."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import QasmSyntaxError

_SUFFIX_RE = re.compile(r"^(_gate_q_|unitary_|mcx_vchain_)\d+$")
_GATE_DEF_RE = re.compile(r"gate\s+(\w+)(?:\s*\((.*?)\))?\s+([^{]+)\s*{")
_OPERATION_RE = re.compile(r"^(\w+)(?:\((.*?)\))?\s+([^;]+);")
# register declarations and measurement assignments, e.g. "qubit[4] q;" and "c[0] = measure q[0];"
_DECL_RE = re.compile(r"^(\w+\[\d+\])\s+(\w+);")
_MEASURE_RE = re.compile(r"^(\w+\[\d+\])\s*=\s*(measure)\s+(\w+\[\d+\]);")


def normalize_token(token: str) -> str:
    """Drop the numeric suffix of ``_gate_q_N``, ``unitary_N`` and ``mcx_vchain_N`` names."""
    return _SUFFIX_RE.sub(r"\1", token)


def tokenize_line(command: str, strip_indices: bool = True) -> list[str]:
    """Tokenize one QASM line.

    Gate headers give ``["gate", name, params..., qubits..., "{"]``, operations give
    ``[name, "(", params..., ")", targets...]``, a closing brace gives ``["}"]`` and a blank
    line gives ``[]``.  ``strip_indices=False`` keeps formal-qubit suffixes intact.
    """
    norm = normalize_token if strip_indices else (lambda t: t)
    command = command.strip()
    if not command:
        return []

    if command.startswith("gate"):
        m = _GATE_DEF_RE.match(command)
        if not m:
            raise QasmSyntaxError(f"Invalid gate definition: {command}")
        params = [p.strip() for p in (m.group(2) or "").split(",") if p.strip()]
        qubits = [q.strip() for q in m.group(3).split(",") if q.strip()]
        return [norm(t) for t in ["gate", m.group(1), *params, *qubits, "{"]]

    m = _OPERATION_RE.match(command)
    if m:
        tokens = [m.group(1)]
        if m.group(2):
            tokens += ["(", *(p.strip() for p in m.group(2).split(",")), ")"]
        tokens += [t.strip() for t in m.group(3).split(",")]
        return [norm(t) for t in tokens if t]

    if command == "}":
        return ["}"]

    m = _DECL_RE.match(command)
    if m:
        return [m.group(1), m.group(2)]
    m = _MEASURE_RE.match(command)
    if m:
        return [m.group(1), "=", m.group(2), m.group(3)]

    raise QasmSyntaxError(f"Unrecognized command: {command}")


def tokenize_program(text: str, strip_indices: bool = True) -> list[str]:
    tokens: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        try:
            tokens += tokenize_line(line, strip_indices)
        except QasmSyntaxError as exc:
            raise QasmSyntaxError(exc.message, lineno, 1) from None
    return tokens


def line_level_tokenize(text: str) -> list[str]:
    """One token per non-blank line (the line-as-token reference scheme)."""
    return [line.strip() for line in text.splitlines() if line.strip()]


def char_count_baseline(text: str) -> int:
    """Non-whitespace character count, the default stand-in for a subword base tokenizer."""
    return sum(1 for ch in text if not ch.isspace())


@dataclass
class Vocabulary:
    """Insertion-ordered bijection between token text and dense integer ids."""

    token_to_id: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        ids = sorted(self.token_to_id.values())
        if ids != list(range(len(ids))):
            raise ValueError("vocabulary ids must be dense from 0")
        self.id_to_token = [None] * len(ids)
        for tok, i in self.token_to_id.items():
            self.id_to_token[i] = tok

    def __len__(self) -> int:
        return len(self.token_to_id)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def add(self, token: str) -> int:
        if token not in self.token_to_id:
            self.token_to_id[token] = len(self.id_to_token)
            self.id_to_token.append(token)
        return self.token_to_id[token]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.token_to_id[t] for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.id_to_token[i] for i in ids]

    def to_json(self) -> str:
        return json.dumps(self.token_to_id, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        return cls({str(k): int(v) for k, v in json.loads(text).items()})


def build_vocabulary(corpus: Iterable[Sequence[str]]) -> Vocabulary:
    vocab = Vocabulary()
    for tokens in corpus:
        for tok in tokens:
            vocab.add(tok)
    return vocab


@dataclass(frozen=True)
class CorpusRow:
    n: int
    compression_ratio: float
    sequence_reduction_ratio: float
    vocab_quantum: int
    vocab_line: int
    programs: int


@dataclass(frozen=True)
class CorpusStats:
    rows: tuple[CorpusRow, ...]

    def row(self, n: int) -> CorpusRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "compression_ratio", "sequence_reduction_ratio", "vocab_quantum", "vocab_line"])
        for r in self.rows:
            writer.writerow([r.n, repr(r.compression_ratio), repr(r.sequence_reduction_ratio), r.vocab_quantum, r.vocab_line])
        return buf.getvalue()


def sequence_ratios(l_base: int, l_quantum: int) -> tuple[float, float]:
    """(L_base / L_quantum, (L_base - L_quantum) / L_base) for one program."""
    return l_base / l_quantum, (l_base - l_quantum) / l_base


def corpus_stats(
    corpus: Mapping[int, Sequence[str]],
    base_counter: Callable[[str], int] = char_count_baseline,
    tokenizer: Callable[[str], list[str]] = tokenize_program,
) -> CorpusStats:
    """Per-n mean compression ratio and sequence reduction ratio, plus per-n vocabulary sizes
    for the quantum-native and line-level tokenizers."""
    rows = []
    for n in sorted(corpus):
        programs = corpus[n]
        ratios, reductions = [], []
        quantum_vocab, line_vocab = Vocabulary(), Vocabulary()
        for text in programs:
            tokens = tokenizer(text)
            comp, red = sequence_ratios(base_counter(text), len(tokens))
            ratios.append(comp)
            reductions.append(red)
            for tok in tokens:
                quantum_vocab.add(tok)
            for tok in line_level_tokenize(text):
                line_vocab.add(tok)
        m = len(programs)
        rows.append(CorpusRow(n, sum(ratios) / m, sum(reductions) / m, len(quantum_vocab), len(line_vocab), m))
    return CorpusStats(tuple(rows))

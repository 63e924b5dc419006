"""Parse, print and rewrite the OpenQASM 3.0 subset used by Grover circuits.

The accepted grammar is deliberately small: a version header, ``include``
lines, ``gate`` definitions, one ``qubit`` and at most one ``bit`` register,
gate calls, ``c[i] = measure q[j];`` and ``barrier``.  Anything else is a
:class:`~groverlab.errors.QasmSyntaxError`.

Bit convention used everywhere in the package: basis index ``i`` has qubit
``j`` equal to ``(i >> j) & 1`` and is written as ``format(i, f"0{n}b")``, so
qubit ``n - 1`` is the leftmost character.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Union

from .errors import ArityMismatch, QasmSyntaxError, RecursionDetected, UnknownGate

# name -> (qubit count or None for variadic, minimum qubits, parameter count)
PRIMITIVES: dict[str, tuple[int | None, int, int]] = {
    "h": (1, 1, 0),
    "x": (1, 1, 0),
    "z": (1, 1, 0),
    "rz": (1, 1, 1),
    "cx": (2, 2, 0),
    "cz": (2, 2, 0),
    "mcmt": (None, 1, 0),
    "mcx": (None, 2, 0),
}

Arg = Union[float, str]


@dataclass(frozen=True)
class GateCall:
    """A gate application.

    ``qubits`` holds integer indices at top level and formal names inside a
    gate body.  ``args`` are floats, or expression strings when they refer to
    parameters of the enclosing definition.
    """

    name: str
    qubits: tuple
    args: tuple = ()


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int


@dataclass(frozen=True)
class Barrier:
    qubits: tuple = ()


Statement = Union[GateCall, Measure, Barrier]


@dataclass(frozen=True)
class GateDef:
    name: str
    formal_qubits: tuple[str, ...]
    params: tuple[str, ...] = ()
    body: tuple[GateCall, ...] = ()


@dataclass(frozen=True)
class QasmProgram:
    version: str = "3.0"
    includes: tuple[str, ...] = ("stdgates.inc",)
    gate_defs: tuple[GateDef, ...] = ()
    qubit_decl: tuple[str, int] | None = None
    clbit_decl: tuple[str, int] | None = None
    statements: tuple[Statement, ...] = field(default=())

    @property
    def num_qubits(self) -> int:
        """Register size, or the widest gate definition for declaration-free fragments."""
        if self.qubit_decl is not None:
            return self.qubit_decl[1]
        return max((len(g.formal_qubits) for g in self.gate_defs), default=0)

    def gate(self, name: str) -> GateDef | None:
        for g in self.gate_defs:
            if g.name == name:
                return g
        return None


# --------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r\n]+)
  | (?P<LCOMMENT>//[^\n]*)
  | (?P<BCOMMENT>/\*.*?\*/)
  | (?P<NUMBER>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ID>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<STRING>"[^"\n]*")
  | (?P<SYM>[{}\[\]();,=+\-*/])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("WS", "LCOMMENT", "BCOMMENT"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("EOF", "", line, pos - line_start + 1))
    return toks


# --------------------------------------------------------------------------
# arithmetic for gate arguments


class _Expr:
    """Recursive-descent evaluator for ``+ - * /``, unary minus, ``pi`` and parameter names."""

    def __init__(self, toks: list[_Tok], env: dict[str, float] | None = None):
        self.toks = toks
        self.i = 0
        self.env = env or {}

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expr(self) -> float:
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> float:
        tok = self.take()
        if tok.text == "-":
            return -self.factor()
        if tok.text == "+":
            return self.factor()
        if tok.kind == "NUMBER":
            return float(tok.text)
        if tok.kind == "ID":
            if tok.text in ("pi", "π"):
                return math.pi
            if tok.text in self.env:
                return self.env[tok.text]
            raise QasmSyntaxError(f"unknown identifier {tok.text!r} in expression", tok.line, tok.col)
        if tok.text == "(":
            value = self.expr()
            closing = self.take()
            if closing.text != ")":
                raise QasmSyntaxError("expected ')'", closing.line, closing.col)
            return value
        raise QasmSyntaxError(f"unexpected {tok.text or 'end of input'!r} in expression", tok.line, tok.col)


def eval_arg(arg: Arg, env: dict[str, float] | None = None) -> float:
    """Evaluate a stored gate argument, binding definition parameters from ``env``."""
    if not isinstance(arg, str):
        return float(arg)
    toks = _lex(arg)
    parser = _Expr(toks, env)
    value = parser.expr()
    if parser.peek().kind != "EOF":
        tok = parser.peek()
        raise QasmSyntaxError(f"trailing tokens in expression {arg!r}", tok.line, tok.col)
    return value


# --------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.defs: dict[str, GateDef] = {}
        self.def_order: list[GateDef] = []
        self.qubit_decl: tuple[str, int] | None = None
        self.clbit_decl: tuple[str, int] | None = None
        self.includes: list[str] = []
        self.statements: list[Statement] = []

    # token helpers
    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def error(self, message: str, tok: _Tok | None = None) -> QasmSyntaxError:
        tok = tok or self.peek()
        return QasmSyntaxError(message, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        tok = self.take()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def expect_kind(self, kind: str, what: str) -> _Tok:
        tok = self.take()
        if tok.kind != kind:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def int_literal(self) -> int:
        tok = self.expect_kind("NUMBER", "integer")
        if not tok.text.isdigit():
            raise self.error(f"expected integer, found {tok.text!r}", tok)
        return int(tok.text)

    # grammar
    def program(self) -> QasmProgram:
        self.expect("OPENQASM")
        ver = self.expect_kind("NUMBER", "version number")
        if ver.text not in ("3", "3.0"):
            raise self.error(f"unsupported OpenQASM version {ver.text}", ver)
        self.expect(";")
        while self.peek().kind != "EOF":
            self.top_level()
        return QasmProgram(
            version=ver.text,
            includes=tuple(self.includes),
            gate_defs=tuple(self.def_order),
            qubit_decl=self.qubit_decl,
            clbit_decl=self.clbit_decl,
            statements=tuple(self.statements),
        )

    def top_level(self) -> None:
        tok = self.peek()
        if tok.kind != "ID":
            raise self.error(f"unexpected {tok.text!r}")
        word = tok.text
        if word == "include":
            self.take()
            path = self.expect_kind("STRING", "include path")
            self.expect(";")
            self.includes.append(path.text[1:-1])
        elif word == "gate":
            self.gate_def()
        elif word in ("qubit", "bit"):
            self.declaration()
        elif word == "barrier":
            self.take()
            qubits: tuple = ()
            if self.peek().text != ";":
                if self.peek().kind == "ID" and self.peek(1).text != "[":
                    self.register_name(self.take())
                else:
                    qubits = tuple(self.qubit_refs())
            self.expect(";")
            self.statements.append(Barrier(qubits))
        elif word in ("pragma", "OPENQASM", "defcal", "def", "if", "for", "while", "reset", "let", "const"):
            raise self.error(f"unsupported construct {word!r}")
        elif self.peek(1).text == "[" and self.clbit_decl is not None and word == self.clbit_decl[0]:
            self.measurement()
        else:
            self.gate_call_top()

    def declaration(self) -> None:
        kind_tok = self.take()
        self.expect("[")
        size = self.int_literal()
        self.expect("]")
        name = self.expect_kind("ID", "register name")
        self.expect(";")
        if size < 1:
            raise self.error("register size must be positive", name)
        if kind_tok.text == "qubit":
            if self.qubit_decl is not None:
                raise self.error("only one qubit register is supported", kind_tok)
            self.qubit_decl = (name.text, size)
        else:
            if self.clbit_decl is not None:
                raise self.error("only one bit register is supported", kind_tok)
            self.clbit_decl = (name.text, size)
        if self.qubit_decl and self.clbit_decl and self.qubit_decl[0] == self.clbit_decl[0]:
            raise self.error(f"register name {name.text!r} declared twice", name)

    def register_name(self, tok: _Tok) -> None:
        if self.qubit_decl is None or tok.text != self.qubit_decl[0]:
            raise self.error(f"unknown qubit register {tok.text!r}", tok)

    def qubit_ref(self) -> int:
        reg = self.expect_kind("ID", "qubit reference")
        self.register_name(reg)
        self.expect("[")
        idx_tok = self.peek()
        idx = self.int_literal()
        self.expect("]")
        if not 0 <= idx < self.qubit_decl[1]:
            raise self.error(f"qubit index {idx} out of range for {reg.text}[{self.qubit_decl[1]}]", idx_tok)
        return idx

    def qubit_refs(self) -> list[int]:
        refs = [self.qubit_ref()]
        while self.peek().text == ",":
            self.take()
            refs.append(self.qubit_ref())
        return refs

    def measurement(self) -> None:
        self.take()
        self.expect("[")
        ctok = self.peek()
        clbit = self.int_literal()
        self.expect("]")
        if not 0 <= clbit < self.clbit_decl[1]:
            raise self.error(f"bit index {clbit} out of range", ctok)
        self.expect("=")
        self.expect("measure")
        qubit = self.qubit_ref()
        self.expect(";")
        self.statements.append(Measure(qubit, clbit))

    def call_args(self, params: tuple[str, ...]) -> tuple:
        if self.peek().text != "(":
            return ()
        self.take()
        args = []
        while True:
            start = self.i
            depth = 0
            while True:
                tok = self.peek()
                if tok.kind == "EOF":
                    raise self.error("unterminated argument list")
                if depth == 0 and tok.text in (",", ")"):
                    break
                depth += tok.text == "("
                depth -= tok.text == ")"
                self.take()
            toks = self.toks[start:self.i]
            if not toks:
                raise self.error("empty argument")
            args.append(self.argument(toks, params))
            if self.take().text == ")":
                break
        return tuple(args)

    def argument(self, toks: list[_Tok], params: tuple[str, ...]) -> Arg:
        symbolic = any(t.kind == "ID" and t.text in params for t in toks)
        env = {p: 1.0 for p in params}
        parser = _Expr(toks + [_Tok("EOF", "", toks[-1].line, toks[-1].col)], env)
        value = parser.expr()
        if parser.peek().kind != "EOF":
            raise self.error("malformed argument expression", parser.peek())
        if symbolic:
            return "".join(t.text for t in toks)
        return value

    def check_call(self, name_tok: _Tok, n_qubits: int, n_args: int, current: str | None = None) -> None:
        name = name_tok.text
        if current is not None and name == current:
            raise RecursionDetected(f"gate {current!r} calls itself (line {name_tok.line})")
        if name in self.defs:
            g = self.defs[name]
            want_q, want_p = len(g.formal_qubits), len(g.params)
            if n_qubits != want_q or n_args != want_p:
                raise ArityMismatch(
                    f"{name} expects {want_q} qubits and {want_p} parameters, "
                    f"got {n_qubits} and {n_args} (line {name_tok.line})"
                )
            return
        if name not in PRIMITIVES:
            raise UnknownGate(f"undeclared gate {name!r} (line {name_tok.line}, column {name_tok.col})")
        fixed, minimum, n_params = PRIMITIVES[name]
        if (fixed is not None and n_qubits != fixed) or n_qubits < minimum or n_args != n_params:
            raise ArityMismatch(f"wrong operands for primitive {name!r} (line {name_tok.line})")

    def gate_call_top(self) -> None:
        name_tok = self.take()
        args = self.call_args(())
        if self.qubit_decl is None:
            raise self.error("gate call before qubit declaration", name_tok)
        qubits = self.qubit_refs()
        self.expect(";")
        if len(set(qubits)) != len(qubits):
            raise self.error(f"duplicate qubit operand in {name_tok.text}", name_tok)
        self.check_call(name_tok, len(qubits), len(args))
        self.statements.append(GateCall(name_tok.text, tuple(qubits), args))

    def ident_list(self, what: str) -> list[str]:
        names = [self.expect_kind("ID", what).text]
        while self.peek().text == ",":
            self.take()
            names.append(self.expect_kind("ID", what).text)
        return names

    def gate_def(self) -> None:
        self.take()
        name_tok = self.expect_kind("ID", "gate name")
        params: list[str] = []
        if self.peek().text == "(":
            self.take()
            if self.peek().text != ")":
                params = self.ident_list("parameter name")
            self.expect(")")
        formals = self.ident_list("qubit name")
        if len(set(formals)) != len(formals) or len(set(params)) != len(params) or set(formals) & set(params):
            raise self.error(f"duplicate formal name in gate {name_tok.text!r}", name_tok)
        if name_tok.text in self.defs:
            raise self.error(f"gate {name_tok.text!r} redefined", name_tok)
        self.expect("{")
        body = []
        while self.peek().text != "}":
            if self.peek().kind == "EOF":
                raise self.error(f"unterminated body of gate {name_tok.text!r}")
            call_tok = self.expect_kind("ID", "gate call")
            args = self.call_args(tuple(params))
            qubits = self.ident_list("qubit name")
            self.expect(";")
            for q in qubits:
                if q not in formals:
                    raise self.error(f"{q!r} is not a qubit of gate {name_tok.text!r}", call_tok)
            if len(set(qubits)) != len(qubits):
                raise self.error(f"duplicate qubit operand in {call_tok.text}", call_tok)
            self.check_call(call_tok, len(qubits), len(args), current=name_tok.text)
            body.append(GateCall(call_tok.text, tuple(qubits), args))
        self.take()
        g = GateDef(name_tok.text, tuple(formals), tuple(params), tuple(body))
        self.defs[g.name] = g
        self.def_order.append(g)


def parse_program(text: str) -> QasmProgram:
    """Parse QASM text into a :class:`QasmProgram`.

    Raises :class:`QasmSyntaxError` (with line and column), :class:`UnknownGate`
    or :class:`ArityMismatch`.
    """
    return _Parser(text).program()


# --------------------------------------------------------------------------
# printer


def _format_arg(arg: Arg) -> str:
    return arg if isinstance(arg, str) else repr(float(arg))


def _format_call(name: str, args: tuple, operands: Iterable[str]) -> str:
    head = name if not args else f"{name}({', '.join(_format_arg(a) for a in args)})"
    return f"{head} {', '.join(operands)};"


def print_program(program: QasmProgram) -> str:
    """Canonical text: header, gate definitions, ``bit`` then ``qubit`` declarations, statements."""
    lines = [f"OPENQASM {program.version};"]
    lines += [f'include "{inc}";' for inc in program.includes]
    lines.append("")
    for g in program.gate_defs:
        head = g.name if not g.params else f"{g.name}({', '.join(g.params)})"
        lines.append(f"gate {head} {', '.join(g.formal_qubits)} {{")
        lines += ["  " + _format_call(c.name, c.args, c.qubits) for c in g.body]
        lines.append("}")
    if program.clbit_decl is not None:
        lines.append(f"bit[{program.clbit_decl[1]}] {program.clbit_decl[0]};")
    if program.qubit_decl is not None:
        lines.append(f"qubit[{program.qubit_decl[1]}] {program.qubit_decl[0]};")
    qreg = program.qubit_decl[0] if program.qubit_decl else "q"
    creg = program.clbit_decl[0] if program.clbit_decl else "c"
    for s in program.statements:
        if isinstance(s, GateCall):
            lines.append(_format_call(s.name, s.args, (f"{qreg}[{q}]" for q in s.qubits)))
        elif isinstance(s, Measure):
            lines.append(f"{creg}[{s.clbit}] = measure {qreg}[{s.qubit}];")
        else:
            operands = ", ".join(f"{qreg}[{q}]" for q in s.qubits) if s.qubits else qreg
            lines.append(f"barrier {operands};")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# rewrites


def expand_gate_calls(program: QasmProgram) -> list[GateCall]:
    """Inline every user gate down to primitives acting on concrete qubit indices.

    Measurements and barriers are dropped.  A user definition takes precedence
    over a primitive of the same name.
    """
    defs = {g.name: g for g in program.gate_defs}
    out: list[GateCall] = []

    def emit(call: GateCall, qubit_map: dict | None, env: dict[str, float], stack: tuple[str, ...]) -> None:
        qubits = tuple(qubit_map[q] for q in call.qubits) if qubit_map is not None else call.qubits
        args = tuple(eval_arg(a, env) for a in call.args)
        g = defs.get(call.name)
        if g is None:
            if call.name not in PRIMITIVES:
                raise UnknownGate(f"undeclared gate {call.name!r}")
            fixed, minimum, n_params = PRIMITIVES[call.name]
            if (fixed is not None and len(qubits) != fixed) or len(qubits) < minimum or len(args) != n_params:
                raise ArityMismatch(f"wrong operands for primitive {call.name!r}")
            out.append(GateCall(call.name, qubits, args))
            return
        if g.name in stack:
            raise RecursionDetected(" -> ".join(stack + (g.name,)))
        if len(qubits) != len(g.formal_qubits) or len(args) != len(g.params):
            raise ArityMismatch(f"{g.name} expects {len(g.formal_qubits)} qubits and {len(g.params)} parameters")
        inner_map = dict(zip(g.formal_qubits, qubits))
        inner_env = dict(zip(g.params, args))
        for inner in g.body:
            emit(inner, inner_map, inner_env, stack + (g.name,))

    for s in program.statements:
        if isinstance(s, GateCall):
            emit(s, None, {}, ())
    return out


def strip_measurements(program: QasmProgram) -> QasmProgram:
    return replace(program, statements=tuple(s for s in program.statements if not isinstance(s, Measure)))


def count_iterations(program: QasmProgram, oracle: str = "Oracle", diffuser: str = "Diffuser") -> int:
    """Number of top-level ``Oracle`` calls immediately followed by a ``Diffuser`` call."""
    calls = [s.name for s in program.statements if isinstance(s, GateCall)]
    return sum(1 for a, b in zip(calls, calls[1:]) if a == oracle and b == diffuser)

"""Exact brute-force simulation of expanded QASM programs.

Three independent routes produce the same output distribution:

* :func:`sv_simulate` keeps the 2**n amplitude vector and updates it gate by
  gate with strided kernels, O(G * 2**n).
* :func:`unitary_simulate` accumulates the full 2**n x 2**n circuit matrix and
  applies it to ``|0...0>``.
* :func:`dm_simulate` evolves the density matrix ``rho -> U rho U^dagger``
  and reads probabilities off its real diagonal.

Measurements are stripped before simulation.  Nothing here is random.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distribution import Distribution
from .errors import GroverLabError, SizeLimit, UnknownGate, UnsupportedGate
from .qasm import GateCall, QasmProgram, expand_gate_calls, parse_program, strip_measurements

UNITARY_MAX_QUBITS = 12
DM_MAX_QUBITS = 10
NORM_TOL = 1e-9

_S = 1 / np.sqrt(2)
_KERNELS = ("h", "x", "z", "rz", "cz", "mcmt", "cx", "mcx")


class NumericalDrift(GroverLabError, AssertionError):
    """An invariant (norm, trace, hermiticity) drifted beyond tolerance mid-simulation."""


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@lru_cache(maxsize=256)
def _all_ones(n: int, mask: int) -> np.ndarray:
    idx = np.arange(2**n)
    return np.flatnonzero((idx & mask) == mask)


@lru_cache(maxsize=256)
def _flip_pairs(n: int, controls: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(2**n)
    tbit = 1 << target
    lo = np.flatnonzero(((idx & controls) == controls) & ((idx & tbit) == 0))
    return lo, lo | tbit


def apply_gate_inplace(a: np.ndarray, n: int, gate: GateCall, conj: bool = False) -> None:
    """Apply a primitive gate in place along the middle axis of ``a``.

    ``a`` must be C-contiguous with shape ``(L, 2**n, R)``: ``(1, 2**n, 1)`` for a state,
    ``(1, 2**n, 2**n)`` to act on matrix rows, ``(2**n, 2**n, 1)`` to act on columns.
    ``conj`` applies the complex-conjugated gate.
    """
    name, qubits = gate.name, gate.qubits
    if name in ("h", "x", "z", "rz"):
        q = qubits[0]
        v = a.reshape(a.shape[0], 2 ** (n - 1 - q), 2, 2**q, a.shape[2])
        v0, v1 = v[:, :, 0], v[:, :, 1]
        if name == "x":
            tmp = v0.copy()
            v0[...] = v1
            v1[...] = tmp
        elif name == "z":
            v1 *= -1
        elif name == "h":
            tmp = v0 + v1
            np.subtract(v0, v1, out=v1)
            np.multiply(tmp, _S, out=v0)
            v1 *= _S
        else:
            phase = np.exp(0.5j * gate.args[0])
            if conj:
                phase = phase.conjugate()
            v0 *= phase.conjugate()
            v1 *= phase
        return
    if name in ("cz", "mcmt"):
        mask = 0
        for q in qubits:
            mask |= 1 << q
        a[:, _all_ones(n, mask), :] *= -1
        return
    if name in ("cx", "mcx"):
        controls = 0
        for q in qubits[:-1]:
            controls |= 1 << q
        lo, hi = _flip_pairs(n, controls, qubits[-1])
        tmp = a[:, lo, :]
        a[:, lo, :] = a[:, hi, :]
        a[:, hi, :] = tmp
        return
    raise UnsupportedGate(f"no simulation kernel for {name!r}")


def apply_gate(a: np.ndarray, n: int, gate: GateCall, conj: bool = False) -> np.ndarray:
    """Apply a primitive gate along axis 0 of ``a`` (shape ``(2**n, ...)``), returning a new array."""
    out = np.array(a, dtype=complex, order="C", copy=True)
    apply_gate_inplace(out.reshape(1, 2**n, -1), n, gate, conj)
    return out


def _primitive_ops(program: QasmProgram | str) -> tuple[int, list[GateCall]]:
    if isinstance(program, str):
        program = parse_program(program)
    program = strip_measurements(program)
    try:
        ops = expand_gate_calls(program)
    except UnknownGate as exc:
        raise UnsupportedGate(str(exc)) from exc
    for op in ops:
        if op.name not in _KERNELS:
            raise UnsupportedGate(f"no simulation kernel for {op.name!r}")
    return program.num_qubits, ops


def _distribution(probs: np.ndarray, n: int) -> Distribution:
    return Distribution.from_array(np.clip(probs, 0.0, None), n)


def sv_simulate(program: QasmProgram | str, validate: bool = False) -> tuple[StateVector, Distribution]:
    """State-vector simulation from ``|0...0>``.

    With ``validate`` the norm is checked after every gate (tolerance 1e-9).
    """
    n, ops = _primitive_ops(program)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    view = psi.reshape(1, 2**n, 1)
    for op in ops:
        apply_gate_inplace(view, n, op)
        if validate:
            norm = float(np.vdot(psi, psi).real)
            if abs(norm - 1) > NORM_TOL:
                raise NumericalDrift(f"norm {norm!r} after {op}")
    return StateVector(n, psi), _distribution(np.abs(psi) ** 2, n)


def circuit_unitary(program: QasmProgram | str, max_qubits: int = UNITARY_MAX_QUBITS) -> np.ndarray:
    n, ops = _primitive_ops(program)
    if n > max_qubits:
        raise SizeLimit(f"unitary simulation capped at {max_qubits} qubits, got {n}")
    u = np.eye(2**n, dtype=complex)
    rows = u.reshape(1, 2**n, 2**n)
    for op in ops:
        apply_gate_inplace(rows, n, op)
    return u


def unitary_simulate(program: QasmProgram | str, max_qubits: int = UNITARY_MAX_QUBITS) -> Distribution:
    u = circuit_unitary(program, max_qubits)
    n = u.shape[0].bit_length() - 1
    initial = np.zeros(2**n, dtype=complex)
    initial[0] = 1.0
    return _distribution(np.abs(u @ initial) ** 2, n)


def dm_simulate(program: QasmProgram | str, max_qubits: int = DM_MAX_QUBITS, validate: bool = False) -> Distribution:
    """Density-matrix simulation; ``validate`` checks unit trace and hermiticity after every gate."""
    n, ops = _primitive_ops(program)
    if n > max_qubits:
        raise SizeLimit(f"density-matrix simulation capped at {max_qubits} qubits, got {n}")
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1.0
    rows = rho.reshape(1, 2**n, 2**n)
    cols = rho.reshape(2**n, 2**n, 1)
    for op in ops:
        apply_gate_inplace(rows, n, op)
        apply_gate_inplace(cols, n, op, conj=True)
        if validate:
            trace = complex(np.trace(rho))
            herm = float(np.abs(rho - rho.conj().T).max())
            if abs(trace - 1) > NORM_TOL or herm > NORM_TOL:
                raise NumericalDrift(f"trace {trace!r}, hermiticity error {herm:.3g} after {op}")
    return _distribution(np.real(np.diag(rho)), n)


METHODS = {
    "sv": lambda program: sv_simulate(program)[1],
    "unitary": unitary_simulate,
    "dm": dm_simulate,
}


def simulate(program: QasmProgram | str, method: str = "sv") -> Distribution:
    try:
        run = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown simulation method {method!r}; choose from {sorted(METHODS)}") from None
    return run(program)

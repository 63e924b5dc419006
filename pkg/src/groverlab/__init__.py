"""Symbolic analysis, simulation and benchmarking of Grover-search circuits in a QASM 3.0 subset."""

from .analyzer import analyze, analytic_distribution, render_trace
from .circuits import GroverSpec, build_grover, create_diffuser, create_oracle, optimal_iterations
from .distribution import Distribution
from .metrics import classical_fidelity, search_accuracy, state_fidelity
from .qasm import QasmProgram, parse_program, print_program
from .simulator import dm_simulate, sv_simulate, unitary_simulate

__version__ = "0.1.0"

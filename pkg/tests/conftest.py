import pytest

# Verbatim circuit from the benchmarking prompt listing (n=2, marked 00, one iteration).
PROMPT_LISTING = """\
OPENQASM 3.0;
include "stdgates.inc";

gate mcmt _gate_q_0, _gate_q_1 {
  cz _gate_q_0, _gate_q_1;
}
gate Oracle _gate_q_0, _gate_q_1 {
  x _gate_q_0;
  x _gate_q_1;
  mcmt _gate_q_0, _gate_q_1;
  x _gate_q_0;
  x _gate_q_1;
}
gate Diffuser _gate_q_0, _gate_q_1 {
  h _gate_q_0;
  h _gate_q_1;
  x _gate_q_0;
  x _gate_q_1;
  h _gate_q_1;
  cx _gate_q_0, _gate_q_1;
  h _gate_q_1;
  x _gate_q_0;
  x _gate_q_1;
  h _gate_q_0;
  h _gate_q_1;
}
bit[2] c;
qubit[2] q;
h q[0];
h q[1];
Oracle q[0], q[1];
Diffuser q[0], q[1];
c[0] = measure q[0];
c[1] = measure q[1];
"""

# Oracle entity of the 4-qubit, two-marked-state worked example.
WORKED_ORACLE = [
    "x _gate_q_3;",
    "mcmt _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3;",
    "x _gate_q_3;",
    "x _gate_q_1;",
    "mcmt _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3;",
    "x _gate_q_1;",
]

# The worked-example trace as printed, with its trailing elision dropped (Results stop at '0110').
WORKED_TRACE_HEAD = """\
=== Analysis ===
The Oracle entity is extracted below:
  x _gate_q_3;
  mcmt _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3;
  x _gate_q_3;
  x _gate_q_1;
  mcmt _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3;
  x _gate_q_1;

=== Block 1 ===
Operation sequence:
x _gate_q_3;
mcmt _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3;
x _gate_q_3;
State construction:
x _gate_q_0: Absent → 1, then → 1
x _gate_q_1: Absent → 1, then → 11
x _gate_q_2: Absent → 1, then → 111
x _gate_q_3: Present → 0, then → 0111
Final state: 0111

=== Block 2 ===
Operation sequence:
x _gate_q_1;
mcmt _gate_q_0, _gate_q_1, _gate_q_2, _gate_q_3;
x _gate_q_1;
State construction:
x _gate_q_0: Absent → 1, then → 1
x _gate_q_1: Present → 0, then → 01
x _gate_q_2: Absent → 1, then → 101
x _gate_q_3: Absent → 1, then → 1101
Final state: 1101

=== Final Marked States ===
0111
1101

=== Results ===
{
 '0111': 0.4727,
 '1101': 0.4727,
 '0000': 0.0039,
 '0001': 0.0039,
 '0010': 0.0039,
 '0011': 0.0039,
 '0100': 0.0039,
 '0101': 0.0039,
 '0110': 0.0039,
"""


@pytest.fixture
def prompt_listing():
    return PROMPT_LISTING


@pytest.fixture
def worked_oracle():
    return list(WORKED_ORACLE)


# --------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion at the end of the run

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    details = [str(v) for k, v in item.user_properties if k == "detail"]
    if report.failed or report.when == "call":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _ACCEPTANCE[number] = (status, title, details)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, details = _ACCEPTANCE[number]
        suffix = f" ({'; '.join(details)})" if details else ""
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}{suffix}")

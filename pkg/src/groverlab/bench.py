"""Dataset generation, method evaluation, timing sweeps and report files."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import statistics
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analyzer, simulator
from .circuits import FULL, MODES, ORACLE_ONLY, GroverSpec, build_grover, default_sample_count, sample_specs
from .distribution import Distribution
from .errors import DomainError, GroverLabError, SizeLimit
from .metrics import DEFAULT_TAU, MetricReport, aggregate, classical_fidelity, search_accuracy
from .qasm import print_program

log = logging.getLogger(__name__)

SEED_ENV = "GROVERLAB_SEED"
METHOD_NAMES = ("analyzer", "sv", "unitary", "dm")


@dataclass(frozen=True)
class BenchConfig:
    n_min: int = 2
    n_max: int = 7
    t_max: int = 3
    t_values: tuple[int, ...] | None = None
    samples: int | None = None
    sample_cap: int = 1024
    seed: int = 42
    mode: str = FULL
    methods: tuple[str, ...] = ("analyzer",)
    repeats: int = 3
    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if self.n_min < 2 or self.n_max < self.n_min:
            raise DomainError(f"invalid qubit range {self.n_min}..{self.n_max}")
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.repeats < 1:
            raise DomainError("repeats must be >= 1")
        unknown = set(self.methods) - set(METHOD_NAMES)
        if unknown:
            raise DomainError(f"unknown methods {sorted(unknown)}")
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.t_values is not None:
            object.__setattr__(self, "t_values", tuple(self.t_values))

    @property
    def n_range(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def ts(self, n: int) -> tuple[int, ...]:
        if self.t_values is not None:
            return self.t_values
        return tuple(range(1, min(self.t_max, n) + 1))

    def count(self, n: int, t: int) -> int:
        wanted = self.samples if self.samples is not None else default_sample_count(n, self.sample_cap)
        return min(wanted, math.comb(2**n, t))

    @classmethod
    def from_json(cls, data: dict) -> "BenchConfig":
        data = dict(data)
        for key in ("methods", "t_values"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        known = {f for f in cls.__dataclass_fields__}
        cfg = cls(**{k: v for k, v in data.items() if k in known})
        return with_env_seed(cfg)

    def to_json(self) -> dict:
        out = asdict(self)
        out["methods"] = list(self.methods)
        out["t_values"] = list(self.t_values) if self.t_values is not None else None
        return out


def with_env_seed(config: BenchConfig) -> BenchConfig:
    """Apply the ``GROVERLAB_SEED`` override, if set."""
    raw = os.environ.get(SEED_ENV)
    return replace(config, seed=int(raw)) if raw not in (None, "") else config


def sub_seed(master: int, *key) -> int:
    """Deterministic per-configuration seed derived from the master seed."""
    digest = hashlib.sha256(":".join(map(str, (master, *key))).encode()).digest()
    return int.from_bytes(digest[:8], "big")


# --------------------------------------------------------------------------
# dataset


@dataclass(frozen=True)
class Sample:
    id: str
    spec: GroverSpec
    mode: str
    qasm: str
    label: Distribution

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def t(self) -> int:
        return self.spec.t

    def label_json(self) -> dict:
        return {
            "n": self.spec.n,
            "t": self.spec.t,
            "marked": list(self.spec.marked),
            "k": self.spec.k,
            "distribution": self.label.to_json(),
        }


def label_distribution(spec: GroverSpec) -> Distribution:
    """Ground truth: state-vector simulation of the full circuit."""
    return simulator.sv_simulate(build_grover(spec, FULL))[1]


def make_sample(spec: GroverSpec, mode: str, ident: str) -> Sample:
    return Sample(ident, spec, mode, print_program(build_grover(spec, mode)), label_distribution(spec))


def build_samples(config: BenchConfig) -> list[Sample]:
    samples = []
    for n in config.n_range:
        for t in config.ts(n):
            specs = sample_specs(n, t, config.count(n, t), sub_seed(config.seed, n, t))
            for idx, spec in enumerate(specs):
                samples.append(make_sample(spec, config.mode, f"n{n}_t{t}_{idx:04d}"))
    return samples


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def generate_dataset(config: BenchConfig, out_dir: str | os.PathLike) -> dict:
    """Write QASM files, JSON labels, a JSONL of (qasm, trace) pairs and a hashed manifest.

    Output is byte-identical for identical (config, seed).
    """
    out = Path(out_dir)
    (out / "qasm").mkdir(parents=True, exist_ok=True)
    (out / "labels").mkdir(exist_ok=True)
    artifacts = []
    jsonl = []

    def write(rel: str, text: str) -> None:
        data = text.encode()
        (out / rel).write_bytes(data)
        artifacts.append({"path": rel, "sha256": _sha256(data)})

    for sample in build_samples(config):
        trace = analyzer.analyze(sample.qasm, sample.mode)
        write(f"qasm/{sample.id}.qasm", sample.qasm)
        write(f"labels/{sample.id}.json", _dump(sample.label_json()))
        jsonl.append(
            json.dumps(
                {
                    "id": sample.id,
                    "qasm": sample.qasm,
                    "mode": sample.mode,
                    "trace_text": analyzer.render_trace(trace),
                    "results": trace.results.probs,
                },
                sort_keys=True,
            )
        )
    write("dataset.jsonl", "".join(line + "\n" for line in jsonl))
    manifest = {"config": config.to_json(), "count": len(jsonl), "artifacts": artifacts}
    (out / "manifest.json").write_text(_dump(manifest))
    return manifest


def load_dataset(out_dir: str | os.PathLike) -> list[Sample]:
    out = Path(out_dir)
    manifest = json.loads((out / "manifest.json").read_text())
    mode = manifest["config"]["mode"]
    samples = []
    for entry in manifest["artifacts"]:
        path = entry["path"]
        if not path.startswith("labels/"):
            continue
        ident = Path(path).stem
        label = json.loads((out / path).read_text())
        spec = GroverSpec(label["n"], tuple(label["marked"]), label["k"])
        qasm = (out / "qasm" / f"{ident}.qasm").read_text()
        samples.append(Sample(ident, spec, mode, qasm, Distribution.from_json(label["distribution"])))
    return samples


# --------------------------------------------------------------------------
# evaluation


def predict(method: str, sample: Sample) -> Distribution:
    """Distribution a method produces for one sample.

    The analyzer is scored on its unrounded analytic distribution; simulators run the
    full circuit (rebuilt from the label when the sample is an oracle-only fragment).
    """
    if method == "analyzer":
        return analyzer.trace_distribution(analyzer.analyze(sample.qasm, sample.mode))
    text = sample.qasm if sample.mode == FULL else print_program(build_grover(sample.spec, FULL))
    return simulator.simulate(text, method)


def is_degenerate(n: int, t: int, k: int, tau: float = DEFAULT_TAU) -> bool:
    """True when even the ideal output leaves each marked state below ``tau`` (e.g. n=2, t=2)."""
    return analyzer.analytic_params(n, t, k).p_marked_each < tau


@dataclass(frozen=True)
class Evaluation:
    reports: list[MetricReport]
    failures: list[dict] = field(default_factory=list)
    degenerate: list[tuple[int, int]] = field(default_factory=list)

    def report(self, n: int, t: int | None = None) -> MetricReport:
        for r in self.reports:
            if r.n == n and r.t == t:
                return r
        raise KeyError((n, t))


def evaluate_method(method: str, dataset: Sequence[Sample], tau: float = DEFAULT_TAU) -> Evaluation:
    """Score SA and CF per sample, then aggregate per (n, t) and per n.

    Failures are logged with their pipeline stage and excluded from the means.
    Degenerate configurations are listed in ``Evaluation.degenerate``; they keep their own
    per-(n, t) report but are left out of the per-n aggregate.
    """
    if method not in METHOD_NAMES:
        raise DomainError(f"unknown method {method!r}")
    scores: dict[tuple[int, int], tuple[list[float], list[float]]] = {}
    failed: dict[tuple[int, int], int] = {}
    failures = []
    degenerate = set()
    for sample in dataset:
        key = (sample.n, sample.t)
        sa_list, cf_list = scores.setdefault(key, ([], []))
        if is_degenerate(sample.n, sample.t, sample.spec.k, tau):
            degenerate.add(key)
        try:
            pred = predict(method, sample)
        except GroverLabError as exc:
            stage = getattr(exc, "stage", method)
            log.warning("%s failed on %s at %s: %s", method, sample.id, stage, exc)
            failures.append({"id": sample.id, "stage": stage, "error": f"{type(exc).__name__}: {exc}"})
            failed[key] = failed.get(key, 0) + 1
            continue
        sa_list.append(search_accuracy(pred, sample.spec.marked, tau))
        cf_list.append(classical_fidelity(pred, sample.label))

    reports = []
    for n in sorted({n for n, _ in scores}):
        all_sa, all_cf, all_failed = [], [], 0
        for (nn, t) in sorted(k for k in scores if k[0] == n):
            sa_list, cf_list = scores[(nn, t)]
            if sa_list:
                reports.append(aggregate(n, t, sa_list, cf_list, method, failed.get((nn, t), 0)))
            if (nn, t) in degenerate:
                continue
            all_sa += sa_list
            all_cf += cf_list
            all_failed += failed.get((nn, t), 0)
        if all_sa:
            reports.append(aggregate(n, None, all_sa, all_cf, method, all_failed))
    return Evaluation(reports, failures, sorted(degenerate))


# --------------------------------------------------------------------------
# timing


@dataclass(frozen=True)
class TimingRecord:
    method: str
    n: int
    durations: tuple[float, ...]
    mean: float
    std: float
    relative: float

    def to_json(self) -> dict:
        out = asdict(self)
        out["durations"] = list(self.durations)
        return out


def _runner(method: str, text: str, mode: str) -> Callable[[], object]:
    if method == "analyzer":
        return lambda: analyzer.render_trace(analyzer.analyze(text, mode))
    return lambda: simulator.simulate(text, method)


def _time_once(fn: Callable[[], object], number: int) -> float:
    start = time.perf_counter()
    for _ in range(number):
        fn()
    return (time.perf_counter() - start) / number


def time_call(fn: Callable[[], object], repeats: int = 3, min_run: float = 0.02) -> list[float]:
    """Per-call wall time for ``repeats`` runs after one discarded warm-up.

    Fast calls are looped so each run lasts at least ``min_run`` seconds.
    """
    start = time.perf_counter()
    fn()
    first = time.perf_counter() - start
    number = max(1, math.ceil(min_run / first)) if first > 0 else 1
    return [_time_once(fn, number) for _ in range(repeats)]


def timing_input(method: str, n: int, seed: int, mode: str) -> str:
    spec = sample_specs(n, 1, 1, sub_seed(seed, "timing", n))[0]
    build_mode = mode if method == "analyzer" else FULL
    return print_program(build_grover(spec, build_mode))


def time_methods(config: BenchConfig, min_run: float = 0.02) -> list[TimingRecord]:
    """Wall-clock each method end to end (QASM text in, distribution or trace out) per n.

    Size-capped simulators leave the point out.  ``relative`` is mean(n) / mean(n_min).
    """
    records = []
    for method in config.methods:
        base = None
        for n in config.n_range:
            text = timing_input(method, n, config.seed, config.mode)
            fn = _runner(method, text, config.mode)
            try:
                durations = time_call(fn, config.repeats, min_run)
            except SizeLimit:
                log.info("%s skipped at n=%d (size limit)", method, n)
                continue
            mean = statistics.fmean(durations)
            if base is None:
                base = mean
            records.append(
                TimingRecord(method, n, tuple(durations), mean, statistics.pstdev(durations), mean / base)
            )
    return records


def fit_log_linear(ns: Sequence[int], times: Sequence[float]) -> tuple[float, float]:
    """Least-squares fit of log(time) = slope * n + intercept, for extrapolation plots."""
    slope, intercept = np.polyfit(np.asarray(ns, dtype=float), np.log(np.asarray(times, dtype=float)), 1)
    return float(slope), float(intercept)


# --------------------------------------------------------------------------
# reports

REPORT_COLUMNS = [
    "kind", "method", "n", "t", "sa_mean", "sa_std", "cf_mean", "cf_std", "count", "failures",
    "time_mean", "time_std", "relative",
]


def _row(record) -> dict:
    if isinstance(record, MetricReport):
        return {
            "kind": "metric", "method": record.method, "n": record.n, "t": record.t,
            "sa_mean": record.sa_mean, "sa_std": record.sa_std, "cf_mean": record.cf_mean,
            "cf_std": record.cf_std, "count": record.count, "failures": record.failures,
        }
    if isinstance(record, TimingRecord):
        return {
            "kind": "timing", "method": record.method, "n": record.n, "count": len(record.durations),
            "time_mean": record.mean, "time_std": record.std, "relative": record.relative,
        }
    raise TypeError(f"cannot report {type(record).__name__}")


def report_csv(records: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow({k: ("" if v is None else v) for k, v in _row(r).items()})
    return buf.getvalue()


def report_json(records: Iterable) -> str:
    out = []
    for r in records:
        entry = r.to_json()
        entry["kind"] = "metric" if isinstance(r, MetricReport) else "timing"
        out.append(entry)
    return json.dumps(out, indent=1, sort_keys=True)


def load_report_json(text: str) -> list:
    records = []
    for entry in json.loads(text):
        kind = entry.pop("kind")
        if kind == "metric":
            records.append(MetricReport(**entry))
        else:
            entry["durations"] = tuple(entry["durations"])
            records.append(TimingRecord(**entry))
    return records


def emit_report(records: Sequence, path: str | os.PathLike, fmt: str = "csv") -> Path:
    path = Path(path)
    if fmt == "csv":
        path.write_text(report_csv(records))
    elif fmt == "json":
        path.write_text(report_json(records))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path

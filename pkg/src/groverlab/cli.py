"""Command-line entry point: ``groverlab <subcommand>``.

Exit codes: 0 success, 1 usage, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analyzer, bench, simulator, tokenizer
from .circuits import FULL, ORACLE_ONLY
from .distribution import Distribution
from .errors import GroverLabError
from .metrics import DEFAULT_TAU, classical_fidelity, search_accuracy

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_generate(args) -> int:
    cfg = bench.BenchConfig(
        n_min=args.n_min,
        n_max=args.n_max,
        t_max=args.t_max,
        samples=args.samples,
        seed=42 if args.seed is None else args.seed,
        mode=args.mode,
    )
    if args.seed is None:
        cfg = bench.with_env_seed(cfg)
    manifest = bench.generate_dataset(cfg, args.out)
    print(f"wrote {manifest['count']} circuits to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    trace = analyzer.analyze(_read(args.file), ORACLE_ONLY if args.oracle_only else FULL)
    if args.json:
        print(analyzer.trace_json(trace))
    else:
        sys.stdout.write(analyzer.render_trace(trace))
    return EXIT_OK


def cmd_simulate(args) -> int:
    dist = simulator.simulate(_read(args.file), args.method)
    if args.json:
        print(dist.dumps())
    else:
        for bits, p in dist.probs.items():
            print(f"|{bits}>: {p:.10f}")
    return EXIT_OK


def cmd_tokenize(args) -> int:
    text = _read(args.file)
    tokens = tokenizer.tokenize_program(text)
    if args.vocab:
        Path(args.vocab).write_text(tokenizer.build_vocabulary([tokens]).to_json())
    if args.stats:
        base = tokenizer.char_count_baseline(text)
        ratio, reduction = tokenizer.sequence_ratios(base, len(tokens))
        print(json.dumps({
            "tokens": len(tokens),
            "base_length": base,
            "line_tokens": len(tokenizer.line_level_tokenize(text)),
            "compression_ratio": ratio,
            "sequence_reduction_ratio": reduction,
        }, indent=1))
    else:
        print(" ".join(tokens))
    return EXIT_OK


def cmd_bench(args) -> int:
    data = json.loads(_read(args.config))
    cfg = bench.BenchConfig.from_json(data)
    samples = bench.build_samples(cfg)
    records: list = []
    for method in cfg.methods:
        result = bench.evaluate_method(method, samples, cfg.tau)
        records += result.reports
        for n, t in result.degenerate:
            print(f"note: (n={n}, t={t}) is degenerate for tau={cfg.tau}", file=sys.stderr)
    if data.get("timing", False):
        records += bench.time_methods(cfg)
    bench.emit_report(records, args.csv, "csv")
    if args.json:
        bench.emit_report(records, args.json, "json")
    print(f"wrote {len(records)} rows to {args.csv}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    pred = Distribution.from_json(json.loads(_read(args.pred)))
    truth = json.loads(_read(args.truth))
    truth_dist = Distribution.from_json(truth["distribution"])
    print(json.dumps({
        "sa": search_accuracy(pred, truth["marked"], args.tau),
        "cf": classical_fidelity(pred, truth_dist),
    }))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="groverlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a seeded dataset of Grover circuits")
    g.add_argument("--n-min", type=int, default=2)
    g.add_argument("--n-max", type=int, default=7)
    g.add_argument("--t-max", type=int, default=3)
    g.add_argument("--samples", type=int, default=None)
    g.add_argument("--seed", type=int, default=None, help=f"master seed (default ${bench.SEED_ENV} or 42)")
    g.add_argument("--mode", choices=[FULL, ORACLE_ONLY], default=FULL)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="symbolic analysis of a QASM file")
    a.add_argument("file")
    a.add_argument("--oracle-only", action="store_true")
    out = a.add_mutually_exclusive_group()
    out.add_argument("--trace", action="store_true", help="reasoning trace text (default)")
    out.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="brute-force simulation of a QASM file")
    s.add_argument("file")
    s.add_argument("--method", choices=sorted(simulator.METHODS), default="sv")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("tokenize", help="quantum-native tokenization of a QASM file")
    t.add_argument("file")
    t.add_argument("--vocab", metavar="PATH")
    t.add_argument("--stats", action="store_true")
    t.set_defaults(func=cmd_tokenize)

    b = sub.add_parser("bench", help="evaluate methods over a generated sweep")
    b.add_argument("--config", required=True)
    b.add_argument("--csv", required=True)
    b.add_argument("--json", default=None)
    b.set_defaults(func=cmd_bench)

    m = sub.add_parser("metrics", help="score a predicted distribution against a label")
    m.add_argument("--pred", required=True)
    m.add_argument("--truth", required=True)
    m.add_argument("--tau", type=float, default=DEFAULT_TAU)
    m.set_defaults(func=cmd_metrics)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"groverlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (GroverLabError, OSError, json.JSONDecodeError, KeyError, UnicodeDecodeError) as exc:
        print(f"groverlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"groverlab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

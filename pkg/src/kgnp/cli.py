"""Command-line entry point.

Subcommands: run (programs/queries over a network), train / classify /
import-vectors (embedding spaces), argue (preference competition),
stats (bad-attribute rates), sweep-k (chance-by-K tables), gain.

Exit codes: 1 usage error, 2 data error, 3 engine error.  All randomized
paths take --seed with a fixed default, so identical invocations produce
byte-identical output; timing appears only on lines prefixed `# time:`.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from typing import List, Optional

from . import embedding
from .argue import competitor_profiles, parse_order, parse_session, rank_competitors
from .engine import Engine, Session
from .errors import DataError, EngineError, KgnpError, ParseError, UsageError
from .mtuples import (
    DEFAULT_BAD_SPEC,
    bad_attribute_rates,
    cardio_schema,
    ingest_mtuples,
)
from .network import load_network
from .parser import parse_program, parse_query

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DEFAULT_SEED = 42

log = logging.getLogger("kgnp")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _schema(args):
    return cardio_schema(kaggle_units=getattr(args, "kaggle_units", False))


def _require_file(path: str):
    if not os.path.exists(path):
        raise DataError("file not found: %s" % path)
    return path


def _read(path: str) -> str:
    with open(_require_file(path), encoding="utf-8") as fh:
        return fh.read()


# -- run ------------------------------------------------------------------


def _format_solutions(solutions, fmt, out):
    if fmt == "json":
        payload = [
            {
                "bindings": {k: str(v) for k, v in s.bindings.items()},
                "annotation": list(s.annotation),
                **({"trace": s.trace} if s.trace is not None else {}),
            }
            for s in solutions
        ]
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    if fmt == "csv":
        names = sorted({k for s in solutions for k in s.bindings})
        writer = csv.writer(out, lineterminator="\n")
        header = names + (["annotation"] if any(s.annotation for s in solutions) else [])
        writer.writerow(header)
        for s in solutions:
            row = [str(s.bindings.get(n, "")) for n in names]
            if len(header) > len(names):
                row.append(" ".join(repr(x) for x in s.annotation))
            writer.writerow(row)
        return
    if not solutions:
        out.write("no\n")
        return
    for s in solutions:
        if s.bindings:
            line = ", ".join("%s = %s" % (k, v) for k, v in sorted(s.bindings.items()))
        else:
            line = "yes"
        if s.annotation:
            line += "  @(%s)" % ", ".join(repr(x) for x in s.annotation)
        out.write(line + "\n")
        if s.trace is not None:
            for t in s.trace:
                out.write("  proved %s\n" % t)


def cmd_run(args) -> int:
    network = load_network(args.network) if args.network else None
    program_text = "\n".join(_read(p) for p in args.program)
    program = parse_program(program_text)
    session = Session(seed=args.seed)
    if args.data:
        schema = _schema(args)
        session.datasets["default"] = ingest_mtuples(args.data, schema)
        session.schema = schema
        session.bad_spec = DEFAULT_BAD_SPEC
    for spec in args.space or []:
        name, _, path = spec.partition("=")
        if not path:
            raise UsageError("--space needs name=path, got %r" % spec)
        session.spaces[name] = embedding.load_space(_require_file(path))
    engine = Engine(program, network=network, session=session, max_depth=args.max_depth)
    goals, _ = parse_query(args.query)
    solutions = list(engine.solve(goals, max_solutions=args.max_solutions, trace=args.trace))
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for line in session.sink:
            out.write(line + "\n")
        _format_solutions(solutions, args.format, out)
    finally:
        if args.output:
            out.close()
    return 0


# -- embedding subcommands ------------------------------------------------


def _load_config(args, m: int) -> embedding.EmbedConfig:
    table = {}
    if args.config:
        with open(_require_file(args.config), "rb") as fh:
            table = tomllib.load(fh)
    known = {
        "n", "weights", "margin", "learning_rate", "norm", "c", "epochs",
        "seed", "j_range", "threads", "dim_sample",
    }
    unknown = set(table) - known
    if unknown:
        raise DataError("unknown config keys: %s" % sorted(unknown))
    if args.threads is not None:
        table["threads"] = args.threads
    if args.dim_sample is not None:
        table["dim_sample"] = args.dim_sample
    if args.epochs is not None:
        table["epochs"] = args.epochs
    if args.seed is not None:
        table["seed"] = args.seed
    table.setdefault("seed", DEFAULT_SEED)
    if "j_range" in table:
        table["j_range"] = tuple(table["j_range"])
    return embedding.EmbedConfig(m=m, **table)


def cmd_train(args) -> int:
    schema = _schema(args)
    data = ingest_mtuples(_require_file(args.data), schema)
    if not data:
        raise DataError("no records in %s" % args.data)
    config = _load_config(args, schema.m)
    t0 = time.perf_counter()
    if config.threads > 1 or (
        config.dim_sample is not None and config.dim_sample < config.n
    ):
        space = embedding.train_transcmeth(data, config, schema)
    else:
        space = embedding.train_transmeth(data, config, schema)
    elapsed = time.perf_counter() - t0
    embedding.save_space(space, args.out)
    if args.export_jsonl:
        embedding.export_jsonl(space, args.export_jsonl)
    print("trained %d records into %s (%s)" % (len(data), args.out, space.provenance))
    print("# time: train %.3fs" % elapsed)
    return 0


def cmd_classify(args) -> int:
    space = embedding.load_space(_require_file(args.space))
    schema = _schema(args)
    records = ingest_mtuples(_require_file(args.record), schema, require_label=False)
    if not records:
        raise DataError("no records in %s" % args.record)
    print("id;chance")
    for mt in records:
        chance = embedding.classify(space, mt, args.J, args.K)
        print("%s;%s" % (mt.id, repr(chance)))
    return 0


def cmd_import_vectors(args) -> int:
    space = embedding.import_vectors(
        _require_file(args.vectors), _require_file(args.labels)
    )
    embedding.save_space(space, args.out)
    print("imported %d vectors (n=%d) into %s" % (len(space.hh), space.n, args.out))
    return 0


def cmd_sweep_k(args) -> int:
    space = embedding.load_space(_require_file(args.space))
    schema = _schema(args)
    records = ingest_mtuples(_require_file(args.records), schema, require_label=False)
    if not records:
        raise DataError("no records in %s" % args.records)
    try:
        k_values = [int(k) for k in args.K.split(",")]
    except ValueError:
        raise UsageError("-K takes a comma-separated integer list") from None
    vectors = {
        mt.id: embedding.construct_virtual_vector(space, mt, args.J).vector
        for mt in records
    }
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["K", *vectors.keys(), "average"])
    per_sample = {rid: [] for rid in vectors}
    averages = []
    for k in k_values:
        chances = [embedding.knn_chance(space, v, k) for v in vectors.values()]
        for rid, c in zip(vectors, chances):
            per_sample[rid].append(c)
        avg = sum(chances) / len(chances)
        averages.append(avg)
        writer.writerow([k, *[repr(c) for c in chances], repr(avg)])
    if args.plot:
        from .report import plot_sweep

        plot_sweep(k_values, per_sample, averages, args.plot)
    return 0


def cmd_gain(args) -> int:
    print(repr(embedding.gain(args.acc_1, args.acc_p, args.time_1, args.time_p)))
    return 0


# -- argumentation --------------------------------------------------------


def cmd_argue(args) -> int:
    session = parse_session(_read(args.session))
    order = parse_order(_read(args.order)) if args.order else None
    sorts = set(order.sorts.values()) if order and order.sorts else None
    profiles = competitor_profiles(session, merge=args.merge, sorts=sorts)
    graph = rank_competitors(profiles, order, preference=args.prefer, mode=args.mode)
    sys.stdout.write(graph.to_edge_list())
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(graph.to_dot())
    return 0


# -- statistics -----------------------------------------------------------


def cmd_stats(args) -> int:
    schema = _schema(args)
    data = ingest_mtuples(_require_file(args.data), schema)
    t0 = time.perf_counter()
    rates = bad_attribute_rates(data, DEFAULT_BAD_SPEC, args.sample, args.seed, schema)
    elapsed = time.perf_counter() - t0
    for attr, rate in sorted(rates.items(), key=lambda kv: (-kv[1], kv[0])):
        print("%s;%s" % (attr, repr(rate)))
    print("# time: stats %.3fs" % elapsed)
    if args.plot:
        from .report import plot_rates

        plot_rates(rates, args.plot)
    return 0


# -- wiring ---------------------------------------------------------------


def _build_parser() -> _Parser:
    p = _Parser(prog="kgnp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a query against programs and a network")
    run.add_argument("program", nargs="*", help="program files")
    run.add_argument("--network", help="network description (TOML)")
    run.add_argument("--query", required=True, help="goal sequence, e.g. \"? p(X).\"")
    run.add_argument("--max-solutions", type=int, default=None)
    run.add_argument("--max-depth", type=int, default=10000)
    run.add_argument("--trace", action="store_true", help="show proved query goals")
    run.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    run.add_argument("--output", help="write results to this file instead of stdout")
    run.add_argument("--data", help="attribute-record CSV exposed to Input")
    run.add_argument("--kaggle-units", action="store_true",
                     help="CSV stores age in days and height in cm")
    run.add_argument("--space", action="append", metavar="NAME=PATH",
                     help="mount a stored vector space under NAME")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run.set_defaults(func=cmd_run)

    train = sub.add_parser("train", help="train an embedding space")
    train.add_argument("--data", required=True)
    train.add_argument("--kaggle-units", action="store_true")
    train.add_argument("--config", help="TOML with embedding hyperparameters")
    train.add_argument("--threads", type=int, default=None)
    train.add_argument("--dim-sample", type=int, default=None,
                       help="per-worker dimension subset size")
    train.add_argument("--epochs", type=int, default=None)
    train.add_argument("--seed", type=int, default=None)
    train.add_argument("--out", required=True)
    train.add_argument("--export-jsonl", help="also dump the record index as JSONL")
    train.set_defaults(func=cmd_train)

    cls = sub.add_parser("classify", help="chance that records are positive")
    cls.add_argument("--space", required=True)
    cls.add_argument("--record", required=True, help="CSV of records (label optional)")
    cls.add_argument("--kaggle-units", action="store_true")
    cls.add_argument("-J", type=int, default=10, help="per-attribute neighbors")
    cls.add_argument("-K", type=int, default=5, help="kNN vote size")
    cls.set_defaults(func=cmd_classify)

    imp = sub.add_parser("import-vectors", help="build a space from external vectors")
    imp.add_argument("--vectors", required=True)
    imp.add_argument("--labels", required=True)
    imp.add_argument("--out", required=True)
    imp.set_defaults(func=cmd_import_vectors)

    argue = sub.add_parser("argue", help="rank competitors from a transcript")
    argue.add_argument("--session", required=True)
    argue.add_argument("--order", help="element order / sort declarations")
    argue.add_argument("--prefer", help="preferred characteristic sort")
    argue.add_argument("--mode", choices=("angelic", "demonic", "complete"),
                       default="angelic")
    argue.add_argument("--merge", choices=("latest-wins", "union"),
                       default="latest-wins")
    argue.add_argument("--dot", help="also write the comparison graph as dot")
    argue.set_defaults(func=cmd_argue)

    stats = sub.add_parser("stats", help="bad-attribute rates among positives")
    stats.add_argument("--data", required=True)
    stats.add_argument("--kaggle-units", action="store_true")
    stats.add_argument("--sample", type=int, default=5000)
    stats.add_argument("--seed", type=int, default=DEFAULT_SEED)
    stats.add_argument("--plot", help="render the rate bar chart to this file")
    stats.set_defaults(func=cmd_stats)

    sweep = sub.add_parser("sweep-k", help="chance-by-K table for test records")
    sweep.add_argument("--space", required=True)
    sweep.add_argument("--records", required=True)
    sweep.add_argument("--kaggle-units", action="store_true")
    sweep.add_argument("-J", type=int, default=5)
    sweep.add_argument("-K", default="5,10,20,30,40,50")
    sweep.add_argument("--plot", help="render the chance-by-K figure to this file")
    sweep.set_defaults(func=cmd_sweep_k)

    gain = sub.add_parser("gain", help="preciseness-times-speedup metric")
    gain.add_argument("acc_1", type=float)
    gain.add_argument("acc_p", type=float)
    gain.add_argument("time_1", type=float)
    gain.add_argument("time_p", type=float)
    gain.set_defaults(func=cmd_gain)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    level = os.environ.get("KGNP_LOG", "").lower()
    if level in ("debug", "info"):
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if level == "debug" else logging.INFO,
            format="kgnp %(levelname)s: %(message)s",
        )
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except (DataError, ParseError) as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return 2
    except KgnpError as exc:
        print("engine error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: compress, decompress, stats, compare, gen-corpus.

Exit codes: 0 success, 2 usage/configuration error, 3 input format
error, 4 container error.  The TERCODE_SEED environment variable is the
fallback for --seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
import time
from dataclasses import dataclass

from . import baseline9c, codec, container, core, corpus, ea
from .errors import (
    ContainerError,
    InvalidConfig,
    OddK,
    ParseError,
    TercodeError,
)

SEED_ENV_VAR = "TERCODE_SEED"


@dataclass
class RunReport:
    """One compression run in reportable form.

    ``duration_seconds`` appears only in the human-readable table; the
    JSON rendering omits it so that fixed seeds yield byte-identical
    reports.
    """

    method: str
    k: int
    l: int
    original_bits: int
    payload_bits: int
    compression_rate: float
    mv_usage: list[dict]
    duration_seconds: float
    ea_stats: dict | None = None
    container_bytes: int | None = None

    def to_jsonable(self) -> dict:
        data = dataclasses.asdict(self)
        del data["duration_seconds"]
        return data


def _mv_usage(
    mvs, covering: codec.Covering, codebook: codec.Codebook
) -> list[dict]:
    usage = []
    for index, freq in enumerate(covering.frequencies):
        if freq == 0:
            continue
        usage.append(
            {
                "mv": mvs[index].symbols,
                "frequency": freq,
                "codeword_length": len(codebook.codeword(index)),
            }
        )
    return usage


def _print_report(report: RunReport, mode: str) -> None:
    if mode == "json":
        print(json.dumps(report.to_jsonable(), indent=2))
        return
    print(f"method            {report.method}")
    print(f"block length K    {report.k}")
    print(f"vector count L    {report.l}")
    print(f"original bits     {report.original_bits}")
    print(f"payload bits      {report.payload_bits}")
    print(f"compression rate  {report.compression_rate:.2f}%")
    if report.container_bytes is not None:
        print(f"container bytes   {report.container_bytes}")
    print(f"duration          {report.duration_seconds:.3f}s")
    if report.ea_stats:
        rates = ", ".join(f"{r:.2f}" for r in report.ea_stats["run_rates"])
        print(f"ea runs           [{rates}]")
        print(f"ea mean rate      {report.ea_stats['mean_rate']:.2f}%")
        print(f"ea best rate      {report.ea_stats['best_rate']:.2f}%")
        print(f"ea generations    {report.ea_stats['generations']}")
        print(f"ea evaluations    {report.ea_stats['evaluations']}")
    if report.mv_usage:
        print("used vectors (mv, frequency, codeword length):")
        for row in report.mv_usage:
            print(f"  {row['mv']}  {row['frequency']}  {row['codeword_length']}")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvalidConfig(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    return 0


def _fill_rng(seed: int) -> random.Random:
    return random.Random(f"fill-{seed}")


def _ea_config(args, seed: int) -> ea.EaConfig:
    if args.config:
        cfg = ea.EaConfig.from_file(args.config)
    else:
        cfg = ea.EaConfig()
    overrides = dict(
        k=args.k,
        l=args.l,
        population_size=args.population,
        children_per_generation=args.children,
        p_crossover=args.p_crossover,
        p_mutation=args.p_mutation,
        p_inversion=args.p_inversion,
        stagnation_limit=args.stagnation,
        max_evaluations=args.max_evals,
        reserve_all_u=args.reserve_all_u,
        runs=args.runs,
        subsume=args.subsume,
        uniform_crossover=args.uniform_crossover,
        seed_nine_code=args.seed_nine_code,
        rng_seed=seed,
    )
    values = {key: val for key, val in overrides.items() if val is not None}
    return dataclasses.replace(cfg, **values)


def _load_test_set(path: str) -> core.TestSet:
    with open(path, encoding="utf-8") as handle:
        return core.parse_test_set(handle)


def _compress_pipeline(args, ts: core.TestSet, seed: int):
    """Run one method over a parsed test set.

    Returns (stream, rate, mv usage, ea stats or None, resolved config).
    Explicit flags override the config file; flags left at their None
    default fall back to the file and then to the built-in defaults.
    """
    cfg = _ea_config(args, seed)
    original_bits = core.original_size_bits(ts)
    blocks = core.partition(core.flatten(ts), cfg.k)
    fill_rng = _fill_rng(seed) if args.fill == "random" else None
    if args.method in ("9c", "9c-hc"):
        mvs = baseline9c.nine_mvs(cfg.k)
        covering = codec.cover(blocks, mvs)
        codebook = (
            codec.build_huffman(covering.frequencies)
            if args.method == "9c-hc"
            else baseline9c.nine_codebook()
        )
        stream = codec.encode_all(
            blocks,
            covering,
            codebook,
            mvs,
            fill=args.fill,
            rng=fill_rng,
            original_length=original_bits,
            pattern_width=ts.width,
        )
        usage = _mv_usage(mvs, covering, codebook)
        rate = codec.compression_rate(original_bits, stream.payload_bits)
        return stream, rate, usage, None, cfg
    stats = codec.BlockStats(blocks)
    report = ea.run_many(stats, original_bits, cfg)
    mvs = [codec.MatchingVector(s) for s in report.best.vector_symbols()]
    covering = codec.cover(stats, mvs)
    if cfg.subsume:
        covering, _ = codec.subsume_merge(covering, mvs, cfg.k)
    codebook = codec.build_huffman(covering.frequencies)
    stream = codec.encode_all(
        blocks,
        covering,
        codebook,
        mvs,
        fill=args.fill,
        rng=fill_rng,
        original_length=original_bits,
        pattern_width=ts.width,
    )
    usage = _mv_usage(mvs, covering, codebook)
    rate = codec.compression_rate(original_bits, stream.payload_bits)
    ea_stats = {
        "run_rates": report.run_rates,
        "mean_rate": report.mean_rate,
        "best_rate": report.best_rate,
        "generations": report.generations,
        "evaluations": report.evaluations,
        "per_run": [dataclasses.asdict(r) for r in report.per_run],
    }
    return stream, rate, usage, ea_stats, cfg


def cmd_compress(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    ts = _load_test_set(args.input)
    stream, rate, usage, ea_stats, cfg = _compress_pipeline(args, ts, seed)
    data = container.write_container(stream)
    with open(args.output, "wb") as handle:
        handle.write(data)
    report = RunReport(
        method=args.method,
        k=cfg.k,
        l=cfg.l if args.method == "ea" else 9,
        original_bits=core.original_size_bits(ts),
        payload_bits=stream.payload_bits,
        compression_rate=rate,
        mv_usage=usage,
        duration_seconds=time.perf_counter() - started,
        ea_stats=ea_stats,
        container_bytes=len(data),
    )
    _print_report(report, args.report)
    return 0


def cmd_decompress(args) -> int:
    with open(args.input, "rb") as handle:
        stream = container.read_container(handle.read())
    bits = codec.decode(stream)
    width = args.width if args.width is not None else stream.pattern_width
    if width is None:
        raise InvalidConfig(
            "pattern width unknown: pass --width (container has no width record)"
        )
    if width < 1 or stream.original_length % width:
        raise ParseError(
            f"width {width} does not divide the decoded length "
            f"{stream.original_length}"
        )
    rows = tuple(bits[i : i + width] for i in range(0, len(bits), width))
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(core.write_test_set(core.TestSet(rows)))
    print(f"wrote {len(rows)} patterns of width {width} to {args.output}")
    return 0


def cmd_stats(args) -> int:
    with open(args.input, "rb") as handle:
        data = handle.read()
    stream = container.read_container(data)
    payload_bytes = (stream.payload_bits + 7) // 8
    info = {
        "container_bytes": len(data),
        "payload_bits": stream.payload_bits,
        "payload_bytes": payload_bytes,
        "header_overhead_bytes": len(data) - payload_bytes,
        "k": stream.k,
        "effective_vectors": len(stream.mv_table),
        "block_count": stream.block_count,
        "original_bits": stream.original_length,
        "compression_rate": codec.compression_rate(
            stream.original_length, stream.payload_bits
        ),
        "pattern_width": stream.pattern_width,
    }
    if args.report == "json":
        print(json.dumps(info, indent=2))
    else:
        for key, value in info.items():
            if key == "compression_rate":
                print(f"{key:22} {value:.2f}%")
            else:
                print(f"{key:22} {value}")
    return 0


def cmd_compare(args) -> int:
    seed = _resolve_seed(args)
    ts = _load_test_set(args.input)
    reports = []
    resolved = None
    for method in ("9c", "9c-hc", "ea"):
        started = time.perf_counter()
        sub = argparse.Namespace(**vars(args))
        sub.method = method
        stream, rate, usage, ea_stats, resolved = _compress_pipeline(sub, ts, seed)
        reports.append(
            RunReport(
                method=method,
                k=resolved.k,
                l=resolved.l if method == "ea" else 9,
                original_bits=core.original_size_bits(ts),
                payload_bits=stream.payload_bits,
                compression_rate=rate,
                mv_usage=usage,
                duration_seconds=time.perf_counter() - started,
                ea_stats=ea_stats,
            )
        )
    if args.report == "json":
        print(json.dumps([r.to_jsonable() for r in reports], indent=2))
        return 0
    ea_report = reports[2]
    print(
        f"original bits {reports[0].original_bits}   "
        f"K={resolved.k}  L={resolved.l}  seed={seed}"
    )
    print(f"{'method':10} {'payload':>10} {'rate':>8}")
    for r in reports[:2]:
        print(f"{r.method:10} {r.payload_bits:>10} {r.compression_rate:7.2f}%")
    print(
        f"{'ea (mean)':10} {'-':>10} {ea_report.ea_stats['mean_rate']:7.2f}%"
    )
    print(
        f"{'ea (best)':10} {ea_report.payload_bits:>10} "
        f"{ea_report.ea_stats['best_rate']:7.2f}%"
    )
    return 0


def cmd_gen_corpus(args) -> int:
    spec = corpus.CorpusSpec(
        patterns=args.patterns,
        width=args.width,
        x_density=args.x_density,
        templates=args.templates,
        flip_probability=args.flip_prob,
        template_width=args.template_width,
        rng_seed=_resolve_seed(args),
    )
    ts = corpus.generate_corpus(spec)
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(core.write_test_set(ts))
    print(
        f"wrote {ts.pattern_count} patterns of width {ts.width} "
        f"({core.original_size_bits(ts)} bits) to {args.output}"
    )
    return 0


def _add_ea_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--runs", type=int, default=None, help="EA repetitions (default 5)")
    parser.add_argument("--population", type=int, default=None, help="population size S")
    parser.add_argument("--children", type=int, default=None, help="children per generation C")
    parser.add_argument("--p-crossover", type=float, default=None)
    parser.add_argument("--p-mutation", type=float, default=None)
    parser.add_argument("--p-inversion", type=float, default=None)
    parser.add_argument("--stagnation", type=int, default=None,
                        help="stop after this many generations without improvement")
    parser.add_argument("--max-evals", type=int, default=None,
                        help="cap on fitness evaluations per run")
    parser.add_argument("--reserve-all-u", action=argparse.BooleanOptionalAction,
                        default=None, help="pin the last vector to all U")
    parser.add_argument("--subsume", action="store_true", default=None,
                        help="fold subsumed vectors when it shrinks the payload")
    parser.add_argument("--uniform-crossover", action="store_true", default=None)
    parser.add_argument("--seed-9c", dest="seed_nine_code", action="store_true",
                        default=None,
                        help="inject the nine fixed vectors into the initial population")
    parser.add_argument("--config", default=None, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tercode",
        description="Block-code compression for ternary test sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a test-set file into a container")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--method", choices=("ea", "9c", "9c-hc"), default="ea")
    p.add_argument("-K", dest="k", type=int, default=None,
                   help="input block length (default 12)")
    p.add_argument("-L", dest="l", type=int, default=None,
                   help="number of vectors for ea (default 64)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--fill", choices=codec.FILL_CHOICES, default="zero",
                   help="value taken by X at transmitted fill positions")
    p.add_argument("--report", choices=("table", "json"), default="table")
    _add_ea_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="restore the fully specified test set")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--width", type=int, default=None,
                   help="pattern width (defaults to the container's record)")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("stats", help="show size and table facts of a container")
    p.add_argument("--input", required=True)
    p.add_argument("--report", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("compare", help="run 9c, 9c-hc and ea side by side")
    p.add_argument("--input", required=True)
    p.add_argument("--method", help=argparse.SUPPRESS, default=None)
    p.add_argument("-K", dest="k", type=int, default=None)
    p.add_argument("-L", dest="l", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--fill", choices=codec.FILL_CHOICES, default="zero")
    p.add_argument("--report", choices=("table", "json"), default="table")
    _add_ea_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-corpus", help="generate a clustered synthetic test set")
    p.add_argument("--output", required=True)
    p.add_argument("--patterns", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--x-density", type=float, default=0.0)
    p.add_argument("--templates", type=int, default=4)
    p.add_argument("--flip-prob", type=float, default=0.0)
    p.add_argument("--template-width", type=int, default=12)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_gen_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfig, OddK) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TercodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``entropylab <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O or input-data error,
3 verification failure under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone

from . import __version__
from .bitio import BitstreamError
from .bounds import (
    FAMILIES,
    REFERENCE_MU,
    convergence_csv,
    convergence_experiment,
    klv_bound,
    noiseless_interval_check,
    verify_manzini,
)
from .compressors import bwt_pipeline_encode, decode, encode
from .compressors.container import ALGORITHMS, CompressedBlob
from .core import CapacityError, Sequence, UndeclaredSymbolError, frequencies, ingest, read_alphabet_file
from .entropy import Distribution, hk, model_table_bits
from .generators import KINDS, GeneratorSpec, generate

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3
SIG_DIGITS = 12


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_k_range(text: str) -> list[int]:
    """``"3"``, ``"0..3"`` (inclusive) or ``"0,2,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k range {text!r}") from None
    if not ks or min(ks) < 0:
        raise argparse.ArgumentTypeError(f"k range {text!r} must be non-empty and non-negative")
    return ks


def _lambda(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid lambda {text!r}") from None
    if not value > 1:
        raise argparse.ArgumentTypeError(f"lambda must be greater than 1 (zeta diverges), got {text}")
    return value


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if value < 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _round(obj):
    if isinstance(obj, float):
        return obj if not math.isfinite(obj) else float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _document(args, command: str, body: dict) -> dict:
    doc = {"tool": "entropylab", "version": __version__, "command": command}
    if not args.no_timestamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc.update(body)
    return _round(doc)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _read_input(path: str, args) -> Sequence:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    if not raw:
        raise InputError(f"{path}: empty input")
    try:
        if getattr(args, "alphabet_file", None):
            return ingest(raw, "explicit", read_alphabet_file(args.alphabet_file))
        if getattr(args, "infer_alphabet", False):
            return ingest(raw, "infer")
        return ingest(raw, "bytes")
    except UndeclaredSymbolError as exc:
        raise InputError(f"{path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read alphabet file: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise InputError(f"invalid alphabet: {exc}") from None


def _map_files(args, fn):
    """Apply ``fn`` to every input path, possibly concurrently; results keep input order."""
    if args.jobs > 1 and len(args.inputs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(fn, args.inputs))
    return [fn(p) for p in args.inputs]


# entropy ---------------------------------------------------------------

def cmd_entropy(args) -> int:
    def profile(path):
        s = _read_input(path, args)
        rows = [{"k": k, "H_k": hk(s, k), "table_bits": model_table_bits(s.sigma, k, s.n)} for k in args.k]
        return {"file": path, "n": s.n, "sigma": s.sigma, "profile": rows}

    results = _map_files(args, profile)
    if args.format == "json":
        _emit(args, _dump_json(_document(args, "entropy", {"results": results})))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["file", "n", "sigma", "k", "H_k", "table_bits"])
        for r in results:
            for row in r["profile"]:
                w.writerow([r["file"], r["n"], r["sigma"], row["k"], f"{row['H_k']:.{SIG_DIGITS}g}", row["table_bits"]])
        _emit(args, buf.getvalue())
    else:
        lines = []
        for r in results:
            lines.append(f"{r['file']}: n={r['n']} sigma={r['sigma']}")
            for row in r["profile"]:
                lines.append(f"  H_{row['k']} = {row['H_k']:.{SIG_DIGITS}g}  (table {row['table_bits']} bits)")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


# generate --------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                spec = GeneratorSpec.from_json(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc.strerror or exc}") from None
        except (ValueError, TypeError) as exc:
            raise UsageError(f"invalid generator config: {exc}") from None
    else:
        if not args.kind:
            raise UsageError("give a generator kind or --config")
        spec = GeneratorSpec(args.kind, n=args.n, base=args.base, sigma=args.sigma, k=args.k,
                             seed=args.seed, corpus=args.corpus, start=args.start)
    try:
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    corpus = _read_input(spec.corpus, args) if spec.kind == "markov-sample" else None
    try:
        seq, meta = generate(spec, corpus)
    except CapacityError as exc:
        raise UsageError(f"{exc} (reduce {_limiting(spec)})") from None
    try:
        data = seq.to_bytes()
    except ValueError:
        raise UsageError(f"{spec.kind} output over {seq.sigma} symbols cannot be written as bytes") from None
    try:
        with open(args.output, "wb") as fh:
            fh.write(data)
        with open(args.output + ".json", "w", encoding="utf-8") as fh:
            fh.write(_dump_json(_document(args, "generate", meta)))
    except OSError as exc:
        raise InputError(f"cannot write {args.output}: {exc.strerror or exc}") from None
    print(f"wrote {seq.n} symbols to {args.output}", file=sys.stderr)
    return EXIT_OK


def _limiting(spec: GeneratorSpec) -> str:
    if spec.kind == "de-bruijn":
        return "--sigma or --k"
    return "--n"


# compress / decompress -------------------------------------------------

def cmd_compress(args) -> int:
    s = _read_input(args.input, args)
    blob = encode(s, args.algo)
    out = args.output or args.input + ".elab"
    try:
        with open(out, "wb") as fh:
            fh.write(blob.to_bytes())
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None
    body = {"input": args.input, "output": out, **blob.accounting()}
    if args.report:
        body["accounting_check"] = (
            sum(blob.sections.values()) == blob.payload_bits
            and blob.header_bits + blob.payload_bits + blob.padding_bits == blob.total_bits
            and blob.total_bits == len(blob.to_bytes()) * 8
        )
        body["bits_per_symbol"] = blob.total_bits / s.n
    sys.stdout.write(_dump_json(_document(args, "compress", body)))
    return EXIT_OK


def cmd_decompress(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    try:
        s = decode(CompressedBlob.from_bytes(raw))
    except BitstreamError as exc:
        raise InputError(f"corrupt blob: {exc}") from None
    out = args.output or (args.input[:-5] if args.input.endswith(".elab") else args.input + ".out")
    try:
        with open(out, "wb") as fh:
            fh.write(s.to_bytes())
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None
    print(f"restored {s.n} symbols to {out}", file=sys.stderr)
    return EXIT_OK


# verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    reports = []
    if args.bound == "noiseless":
        if args.random:
            rng = random.Random(args.seed)
            for i in range(args.random):
                sigma = rng.randint(1, args.max_sigma)
                weights = [rng.random() for _ in range(sigma)]
                total = math.fsum(weights)
                P = Distribution(tuple(w / total for w in weights))
                reports.append({"source": f"random[{i}]", **noiseless_interval_check(P).to_dict()})
        for path in args.inputs:
            s = _read_input(path, args)
            P = Distribution.from_counts(c for c in frequencies(s).counts if c)
            reports.append({"source": path, **noiseless_interval_check(P).to_dict()})
        if not reports:
            raise UsageError("noiseless check needs input files or --random N")
    else:
        if not args.inputs:
            raise UsageError(f"{args.bound} check needs at least one input file")

        def run(path):
            s = _read_input(path, args)
            if args.bound == "manzini":
                mu = None if args.mu == "auto" else _non_negative(args.mu)
                return [{"source": path, **r.to_dict()} for r in verify_manzini(s, args.k, mu)]
            measured = bwt_pipeline_encode(s).total_bits
            return [{"source": path, **klv_bound(s, k, lam, args.c, measured).to_dict()}
                    for k in args.k for lam in args.lambdas]

        for rs in _map_files(args, run):
            reports.extend(rs)
    failed = sum(1 for r in reports if r["satisfied"] is False)
    body = {"bound": args.bound, "reference_mu": REFERENCE_MU, "reports": reports,
            "summary": {"reports": len(reports), "violations": failed}}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "bound", "parameters", "formula_bits", "measured_bits", "slack", "satisfied"])
        for r in _round(reports):
            w.writerow([r["source"], r["bound"], json.dumps(r["parameters"]), r["formula_bits"],
                        r["measured_bits"], r["slack"], r["satisfied"]])
        _emit(args, buf.getvalue())
    elif args.format == "text":
        lines = [f"{r['source']} {r['bound']} {json.dumps(_round(r['parameters']))}: measured "
                 f"{_round(r['measured_bits'])} vs {_round(r['formula_bits'])} -> "
                 f"{'ok' if r['satisfied'] else 'VIOLATED'}" for r in reports]
        lines.append(f"{len(reports)} reports, {failed} violations")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, _dump_json(_document(args, "verify", body)))
    if failed and args.strict:
        return EXIT_VERIFY
    return EXIT_OK


# convergence -----------------------------------------------------------

def cmd_convergence(args) -> int:
    rows = convergence_experiment(args.family, args.sizes, args.k[0])
    if args.format == "csv":
        _emit(args, convergence_csv(rows, SIG_DIGITS))
    else:
        body = {"family": args.family, "k": args.k[0], "rows": [asdict(r) for r in rows]}
        _emit(args, _dump_json(_document(args, "convergence", body)))
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if any(x < 1 for x in sizes) or sizes != sorted(set(sizes)):
        raise argparse.ArgumentTypeError("sizes must be positive and strictly increasing")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the report/output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generated_at field")
    alpha = common.add_mutually_exclusive_group()
    alpha.add_argument("--alphabet-file", help="declared alphabet, one symbol per line")
    alpha.add_argument("--infer-alphabet", action="store_true", help="use the sorted set of observed bytes")
    common.add_argument("--jobs", type=int, default=1, help="process input files concurrently")

    parser = _Parser(prog="entropylab", description="Empirical entropy and compression laboratory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("entropy", parents=[common], help="H_0..H_k profile of input files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--k", type=parse_k_range, default=[0], help="k, k1..k2 or k1,k2,...")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("generate", parents=[common], help="write a generated sequence")
    p.add_argument("kind", nargs="?", choices=KINDS)
    p.add_argument("--config", help="JSON generator spec")
    p.add_argument("--sigma", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--base", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--corpus")
    p.add_argument("--start", help="initial context for markov-sample")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compress", parents=[common], help="compress a file into a blob")
    p.add_argument("input")
    p.add_argument("--algo", choices=tuple(ALGORITHMS), default="bwt")
    p.add_argument("--report", action="store_true", help="add the accounting identity check")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", parents=[common], help="restore a blob")
    p.add_argument("input")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("verify", parents=[common], help="check bounds against measured sizes")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--bound", choices=("manzini", "klv", "noiseless"), default="manzini")
    p.add_argument("--k", type=parse_k_range, default=[0, 1, 2])
    p.add_argument("--lambda", dest="lambdas", type=_lambda, action="append",
                   help="KLV lambda > 1; repeat for several (default 2)")
    p.add_argument("--mu", default="auto", help="'auto' (measured) or a value")
    p.add_argument("--c", type=_non_negative, default=1.0, help="constant for the KLV table term")
    p.add_argument("--random", type=int, default=0, help="noiseless: number of random distributions")
    p.add_argument("--max-sigma", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true", help="exit 3 if any bound is violated")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", parents=[common], help="entropy vs compression ratio table")
    p.add_argument("family", choices=tuple(FAMILIES))
    p.add_argument("--sizes", type=_sizes, required=True, help="comma-separated family parameters")
    p.add_argument("--k", type=parse_k_range, default=[0])
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_args(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"entropylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"entropylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"entropylab: error: {exc}", file=sys.stderr)
        return EXIT_IO


def _check_args(parser, args) -> None:
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    if args.command == "verify" and not args.lambdas:
        args.lambdas = [2.0]
    if args.command == "verify" and args.mu != "auto":
        try:
            _non_negative(args.mu)
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    if args.command == "generate" and not args.output:
        parser.error("generate needs --output")


if __name__ == "__main__":
    sys.exit(main())

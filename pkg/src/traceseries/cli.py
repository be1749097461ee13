"""Command line front end: ``traceseries {series,flows,schur,decompose,verify}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

from . import verify
from .cocharacter import groups_by_slot, schur_decompose
from .errors import (
    ConfigError, ConnectivityError, DecompositionError, MalformedSeriesError, ReconstructionResidualError,
    SpecializationPoleError, TraceSeriesError, TreeFormulaInapplicable, VerificationFailure,
)
from .exactpoly import RationalSeries, expand_box, expand_truncated, t
from .molien import MIXED, PURE, block_repeat_integrand, block_repeat_series, build_integrand, poincare_series
from .oracle import FlowMatrix, flow_coefficient, molien_series_truncated
from .quiver import BlockStructure
from .schur import Partition, boxtimes_eval, lambda_plus, schur_eval

log = logging.getLogger("traceseries")

METHODS = ("auto", "tree", "reconstruct", "oracle")
OUTPUTS = ("text", "json")
ORACLE_DEFAULT_DEGREE = 6

# module and failed assumption reported for each error type
DIAGNOSTICS = {
    ConfigError: ("cli", "job configuration"),
    ConnectivityError: ("quiver", "every vertex reaches the root along a spanning in-tree"),
    ReconstructionResidualError: ("molien", "the simple-cycle product is a denominator"),
    TreeFormulaInapplicable: ("molien", "the spanning-tree sum is a power series"),
    DecompositionError: ("cocharacter", "symmetric input with non-negative integer multiplicities"),
    SpecializationPoleError: ("exactpoly", "specialization keeps every denominator factor nonconstant"),
    MalformedSeriesError: ("exactpoly", "denominator factors have positive degree"),
    VerificationFailure: ("verify", "every reproduction check passes"),
}


@dataclass
class JobConfig:
    blocks: Tuple[int, ...] = (1,)
    generics: Dict[Tuple[int, int], int] = field(default_factory=dict)
    kind: str = PURE
    method: str = "auto"
    degree: Optional[int] = None
    repeat: Optional[Tuple[int, int, int]] = None
    output: str = "text"
    seed: int = 0
    margin: int = 3
    block_labels: bool = True

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - {"blocks", "generics", "kind", "method", "degree", "repeat", "output", "seed", "margin",
                               "block_labels"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        blocks = raw.get("blocks", [1])
        if not isinstance(blocks, list) or not blocks or not all(isinstance(b, int) and b > 0 for b in blocks):
            raise ConfigError(f"blocks must be a non-empty list of positive integers, got {blocks!r}")
        nb = len(blocks)
        gen = raw.get("generics", 1)
        if isinstance(gen, int):
            if gen < 0:
                raise ConfigError("generics must be non-negative")
            generics = {(a, b): gen for a in range(1, nb + 1) for b in range(1, nb + 1)}
        elif isinstance(gen, dict):
            generics = {}
            for key, k in gen.items():
                try:
                    a, b = (int(x) for x in str(key).split(","))
                except ValueError:
                    raise ConfigError(f"generics key {key!r} is not of the form 'i,j'") from None
                if not isinstance(k, int) or k < 0:
                    raise ConfigError(f"generics[{key!r}] must be a non-negative integer")
                generics[(a, b)] = k
        else:
            raise ConfigError("generics must be an integer or a map 'i,j' -> count")
        kind = raw.get("kind", PURE)
        if kind not in (PURE, MIXED):
            raise ConfigError(f"kind must be pure or mixed, got {kind!r}")
        method = raw.get("method", "auto")
        if method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {method!r}")
        degree = raw.get("degree")
        if degree is not None and (not isinstance(degree, int) or degree < 0):
            raise ConfigError("degree must be a non-negative integer")
        repeat = raw.get("repeat")
        if repeat is not None:
            if not (isinstance(repeat, list) and len(repeat) == 3 and all(isinstance(x, int) and x > 0 for x in repeat)):
                raise ConfigError("repeat must be a triple [a, b, k] of positive integers")
            repeat = tuple(repeat)
        output = raw.get("output", "text")
        if output not in OUTPUTS:
            raise ConfigError(f"output must be text or json, got {output!r}")
        seed, margin = raw.get("seed", 0), raw.get("margin", 3)
        if not isinstance(seed, int) or not isinstance(margin, int) or margin < 0:
            raise ConfigError("seed and margin must be integers (margin >= 0)")
        block_labels = raw.get("block_labels", True)
        if not isinstance(block_labels, bool):
            raise ConfigError("block_labels must be true or false")
        cfg = cls(tuple(blocks), generics, kind, method, degree, repeat, output, seed, margin, block_labels)
        cfg.block_structure()  # validates block pairs
        return cfg

    def block_structure(self) -> BlockStructure:
        return BlockStructure(self.blocks, self.generics)


def load_config(spec: Optional[str]) -> dict:
    if spec is None:
        return {}
    text = spec
    if not spec.lstrip().startswith("{"):
        path = Path(spec)
        if not path.is_file():
            raise ConfigError(f"config file {spec} not found")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def job_from_args(args) -> JobConfig:
    raw = load_config(args.config)
    for name in ("degree", "method", "output", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = value
    return JobConfig.from_dict(raw)


def emit(obj, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj.to_json() if hasattr(obj, "to_json") else obj, indent=2, sort_keys=True))
    else:
        print(obj.to_text() if hasattr(obj, "to_text") else obj)


# commands -------------------------------------------------------------------


def compute_series(cfg: JobConfig):
    """RationalSeries for tree/reconstruct, TruncatedSeries for oracle jobs."""
    oracle = cfg.method == "oracle" or (cfg.method == "auto" and cfg.degree is not None)
    if cfg.degree is not None and not oracle:
        log.warning("degree is ignored by the %s method; the result is exact", cfg.method)
    cap = cfg.degree if cfg.degree is not None else ORACLE_DEFAULT_DEGREE
    if cfg.repeat is not None:
        a, b, k = cfg.repeat
        if oracle:
            integrand = block_repeat_integrand(a, b, k, cfg.kind, cfg.block_labels)
            return molien_series_truncated(integrand, cap)
        return block_repeat_series(a, b, k, cfg.kind, cfg.method, cfg.margin, cfg.block_labels)
    bs = cfg.block_structure()
    if oracle:
        integrand = build_integrand(bs, cfg.kind, distinct_labels=not cfg.block_labels)
        return molien_series_truncated(integrand, cap)
    return poincare_series(bs, cfg.kind, cfg.method, cfg.margin, cfg.block_labels)


def cmd_series(args) -> int:
    cfg = job_from_args(args)
    emit(compute_series(cfg), cfg.output)
    return 0


def parse_matrix(text: str) -> FlowMatrix:
    try:
        rows = json.loads(text)
        return FlowMatrix(tuple(tuple(r) for r in rows))
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed flow matrix {text!r}: {exc}") from None


def cmd_flows(args) -> int:
    c = parse_matrix(args.matrix)
    value = flow_coefficient(c)
    if args.monomial:
        m = c.monomial()
        bound = max((x for r in c.c for x in r), default=0)
        series = poincare_series(BlockStructure.uniform((1,) * c.n))
        coeff = expand_box(series, bound).coefficient(m)
        out = {"indicator": value, "monomial": str(m) if not m.is_one() else "1", "series_coefficient": coeff}
        if args.output == "json":
            print(json.dumps(out, sort_keys=True))
        else:
            print(f"{value}\n{out['monomial']} : {coeff}")
    else:
        print(json.dumps({"indicator": value}) if args.output == "json" else value)
    return 0


def cmd_schur(args) -> int:
    try:
        lam = Partition.parse(args.partition)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.vars < 0:
        raise ConfigError("--vars must be non-negative")
    variables = [t(1, 1, a) for a in range(1, args.vars + 1)]
    result = {"partition": str(lam)}
    if args.plus is not None:
        result["lambda_plus"] = [str(p) for p in lambda_plus(lam, args.plus)]
    if args.boxtimes is not None:
        if args.boxtimes < 1:
            raise ConfigError("--boxtimes must be positive")
        poly = boxtimes_eval(lam, variables, args.boxtimes)
    else:
        poly = schur_eval(lam, variables)
    if args.output == "json":
        result["polynomial"] = poly.to_json()
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(poly.to_text())
        if "lambda_plus" in result:
            print("plus: " + " ".join(result["lambda_plus"]))
    return 0


def cmd_decompose(args) -> int:
    cfg = job_from_args(args)
    cap = cfg.degree if cfg.degree is not None else ORACLE_DEFAULT_DEGREE
    series = compute_series(cfg)
    if isinstance(series, RationalSeries):
        series = expand_truncated(series, cap)
    groups = groups_by_slot(v for m in series.poly for v in m.variables())
    emit(schur_decompose(series, groups), cfg.output)
    return 0


def cmd_verify(args) -> int:
    results = verify.run_suite(args.suite, seed=args.seed or 0)
    if args.output == "json":
        print(json.dumps([r.to_json() for r in results], indent=2))
    else:
        for r in results:
            print(r.line())
    failed = [r.key for r in results if not r.ok]
    if failed:
        raise VerificationFailure(f"criteria {', '.join(failed)} failed")
    return 0


# parser ---------------------------------------------------------------------


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file, or an inline JSON object")
    common.add_argument("--degree", type=int, help="degree cap for truncated (oracle) results")
    common.add_argument("--method", choices=METHODS)
    common.add_argument("--output", choices=OUTPUTS)
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=positive_int, default=os.cpu_count() or 1,
                        help="worker bound (computations currently run in one process)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="traceseries", description="Exact Poincare series of trace rings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[common], help="rational or truncated Poincare series")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("flows", parents=[common], help="balanced-flow indicator of an exponent matrix")
    p.add_argument("matrix", help="square JSON matrix, e.g. [[0,1],[1,0]]")
    p.add_argument("--monomial", action="store_true", help="also print the monomial and its series coefficient")
    p.set_defaults(func=cmd_flows)

    p = sub.add_parser("schur", parents=[common], help="Schur polynomial, lambda-plus and repeated-variable evaluation")
    p.add_argument("partition", help="e.g. (2,1)")
    p.add_argument("--vars", type=int, default=3, help="number of variables t(1,1,a)")
    p.add_argument("--plus", type=int, metavar="N", help="also list partitions with one added box, height <= N")
    p.add_argument("--boxtimes", type=int, metavar="B", help="repeat every variable B times")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("decompose", parents=[common], help="Schur multiplicity table of a series")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", parents=[common], help="run the reproduction checks")
    p.add_argument("--suite", choices=verify.SUITES, default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def report(exc: TraceSeriesError) -> str:
    for cls in type(exc).__mro__:
        if cls in DIAGNOSTICS:
            module, assumption = DIAGNOSTICS[cls]
            return f"traceseries.{module}: {exc} (failed assumption: {assumption})"
    return f"traceseries: {exc}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TraceSeriesError as exc:
        print(report(exc), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

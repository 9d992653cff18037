"""``fkdet`` command line.

Subcommands: mahler, szego, folner, quotient, lawton, markdist, probe.
Options may also come from a JSON file given with ``--config``; keys are
the long option names with dashes or underscores, and explicit flags win.

Exit codes: 0 ok, 2 usage, 3 parse, 4 precondition, 5 numeric,
6 resource, 7 I/O, 1 other package errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import determinants as det
from . import probes
from .errors import (
    FkdetError,
    NumericError,
    ParameterError,
    ParseError,
    PreconditionError,
    ResourceError,
)
from .groupring import GroupRingElement, positive_square
from .groups import (
    CyclicImage,
    Heisenberg,
    IntegerLattice,
    ModularLattice,
    load_table,
    quotient_hom,
)
from .laurent import LaurentPolynomial, grid_eval, q_of_r, specialize
from .marked import MarkedGroup, ball_distance, delta_distance
from .report import FORMATS, ReportRecord, emit, grid_to_csv, ordered, table

EXIT_OK, EXIT_OTHER, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3
EXIT_PRECONDITION, EXIT_NUMERIC, EXIT_RESOURCE, EXIT_IO = 4, 5, 6, 7

DEFAULTS = {
    "model": "Z",
    "format": "json",
    "folner_sizes": "8,16,32,64",
    "quotients": "2,4,8,16,32",
    "n": 32,
    "lmax": 10,
    "metric": "delta",
    "kind": "noninvertible",
    "mesh": "0.0625,0.015625,0.00390625",
    "segment": "0,3",
    "shape": "box",
    "method": "auto",
    "scheme": "all",
}

HELP = {
    "mahler": "m(P) by torus quadrature and, in one variable, Jensen's formula",
    "szego": "Toeplitz determinants D_n of a nonnegative one-variable polynomial",
    "folner": "Folner truncation estimates of log det for a positive element",
    "quotient": "log det along finite quotients Z^d -> (Z/n)^d or H3 -> H3(Z/n)",
    "lawton": "q(r) and m(P_r) for one-variable specialisations of P",
    "markdist": "distance between two marked groups (delta and/or ball metric)",
    "probe": "exploratory runs on open questions (logged, never asserted)",
}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument helpers


def parse_model(name: str):
    """``Z``, ``Z2``, ``Zmod:5``, ``Zmod:5,7``, ``cyclic:1,3``, ``H3``, ``H3mod:5``, ``table:PATH``."""
    text = name.strip()
    head, _, arg = text.partition(":")
    key = head.lower()
    try:
        if key == "z" or (key.startswith("z") and key[1:].isdigit()):
            return IntegerLattice(int(key[1:] or 1))
        if key == "zmod":
            moduli = tuple(int(x) for x in arg.split(","))
            return ModularLattice(moduli)
        if key in ("cyclic", "dr"):
            return CyclicImage(tuple(int(x) for x in arg.split(",")))
        if key == "h3":
            return Heisenberg()
        if key == "h3mod":
            return Heisenberg(int(arg))
        if key == "table":
            return load_table(arg)
    except ValueError as exc:
        if isinstance(exc, FkdetError):
            raise
        raise UsageError(f"bad model {name!r}: {exc}") from None
    raise UsageError(f"unknown model {name!r}")


def int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def r_vectors(text: str, ns: list[int]) -> list[tuple]:
    """``"1,n"`` expands over ``ns``; ``"1,4;1,8"`` lists vectors explicitly."""
    out = []
    for chunk in str(text).split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if "n" in parts:
            for n in ns:
                out.append(tuple(n if p == "n" else int(p) for p in parts))
        else:
            try:
                out.append(tuple(int(p) for p in parts))
            except ValueError:
                raise UsageError(f"bad r-vector {chunk!r}") from None
    return out


def element(args, model=None) -> GroupRingElement:
    if not args.expr:
        raise UsageError("--expr is required")
    model = model or parse_model(args.model)
    f = GroupRingElement.parse(args.expr, model)
    if not f:
        raise PreconditionError("expression is zero")
    return positive_square(f) if args.square else f


def polynomial(args) -> LaurentPolynomial:
    if not args.expr:
        raise UsageError("--expr is required")
    model = parse_model(args.model) if args.model_given else None
    d = model.d if isinstance(model, IntegerLattice) else None
    P = LaurentPolynomial.parse(args.expr, d)
    if args.square:
        P = P.conj_reflect() * P
    return P


class Runner:
    def __init__(self, args):
        self.args = args
        self.records: list[ReportRecord] = []

    def add(self, series, scheme, size, value, certificate="none", excluded=None, note="", started=None):
        wall = None
        if self.args.timing and started is not None:
            wall = time.perf_counter() - started
        self.records.append(
            ReportRecord(series, scheme, size, float(value), certificate, excluded, wall, note)
        )


# --------------------------------------------------------------------------
# subcommands


def cmd_mahler(args, run: Runner):
    P = polynomial(args)
    sizes = int_list(args.grid_N) if args.grid_N else [2**16 if P.d == 1 else 512 if P.d == 2 else 64]
    schemes = {"all": ("quadrature", "jensen")}.get(args.scheme, (args.scheme,))
    if "jensen" in schemes and P.d != 1 and args.scheme == "jensen":
        raise PreconditionError("Jensen's formula needs a one-variable polynomial")
    for N in sizes if "quadrature" in schemes else []:
        t0 = time.perf_counter()
        est = det.mahler_quadrature(P, N)
        run.add("quadrature", "quadrature", N, est.value, excluded=est.excluded, started=t0)
    if args.grid_out:
        N = sizes[-1]
        Path(args.grid_out).write_text(grid_to_csv(grid_eval(P, N, offset=True)), encoding="utf-8", newline="")
    if P.d == 1 and "jensen" in schemes:
        t0 = time.perf_counter()
        est = det.mahler_jensen(P)
        run.add("jensen", "jensen", est.size, est.value, note="value of record", started=t0)


def cmd_szego(args, run: Runner):
    P = polynomial(args)
    t0 = time.perf_counter()
    terms = det.szego_sequence(P, int(args.n))
    for t in terms:
        run.add("toeplitz-ratio", "toeplitz", t.n, t.log_ratio, note="log D_{n+1}/D_n", started=t0)
    for t in terms:
        run.add("toeplitz-root", "toeplitz", t.n, t.log_root, note="log D_n^(1/n)", started=t0)


def cmd_folner(args, run: Runner):
    f = element(args)
    for n in int_list(args.folner_sizes):
        t0 = time.perf_counter()
        est = det.folner_det_sequence(f, [n], args.shape)[0]
        run.add("folner", "folner", n, est.value, note=est.note, started=t0)


def _quotient_maps(model, ns):
    if isinstance(model, IntegerLattice):
        return [quotient_hom(model, moduli=n) for n in ns]
    if isinstance(model, Heisenberg) and model.n is None:
        return [quotient_hom(model, n=n) for n in ns]
    raise PreconditionError(f"no finite quotient family for {model!r}")


def cmd_quotient(args, run: Runner):
    f = element(args)
    ns = int_list(args.quotients)
    cert = det.find_certificate(f) if args.certify else None
    if args.certify and cert is None:
        raise PreconditionError("--certify: no invertibility certificate found; only the upper bound holds")
    seq = det.quotient_det_sequence(_quotient_maps(f.model, ns), f, certificate=cert, labels=ns, method=args.method)
    status = cert.describe() if cert else "none"
    for n, est in zip(ns, seq.estimates):
        run.add("quotient", "quotient", n, est.value, status, note=seq.relation)


def cmd_lawton(args, run: Runner):
    P = polynomial(args)
    if P.d < 2:
        raise PreconditionError("specialisation needs at least two variables")
    ns = int_list(args.quotients)
    vectors = r_vectors(args.r_vector or "1,n", ns)
    for r in vectors:
        t0 = time.perf_counter()
        q = q_of_r(r)
        Pr = specialize(P, r)
        value = det.mahler_jensen(Pr).value if Pr.coeffs else -math.inf
        note = f"r={','.join(map(str, r))} q={q.value:g}" + (f" ({q.flag})" if q.flag else "")
        run.add("lawton", "jensen", q.value, value, note=note, started=t0)
    if args.grid_N:
        for N in int_list(args.grid_N):
            est = det.mahler_quadrature(P, N)
            run.add("reference", "quadrature", N, est.value, excluded=est.excluded, note="m(P) reference")


def cmd_markdist(args, run: Runner):
    if not args.target:
        raise UsageError("--target is required for markdist")
    a, b = MarkedGroup(parse_model(args.model)), MarkedGroup(parse_model(args.target))
    L = int(args.lmax)
    metrics = ["delta", "ball"] if args.metric == "both" else [args.metric]
    for metric in metrics:
        t0 = time.perf_counter()
        dist = delta_distance(a, b, L) if metric == "delta" else ball_distance(a, b, L)
        note = f"{dist.flag}; 2^-{dist.exponent}"
        run.add(metric, metric, L, dist.value, note=note, started=t0)


def cmd_probe(args, run: Runner):
    kind = args.kind
    if kind == "noninvertible":
        f = element(args) if args.expr else None
        res = probes.non_invertible_quotients(f, int_list(args.quotients))
        for row in res.rows:
            run.add("quotient", "quotient", row["n"], row["quotient"], note=res.label)
        run.add("jensen", "jensen", 0, res.rows[0]["jensen"], note=f"{res.label}; {res.summary}")
    elif kind == "folner-shape":
        f = element(args, Heisenberg()) if args.expr else None
        res = probes.folner_shape_dependence(f, int_list(args.folner_sizes))
        for row in res.rows:
            run.add("folner-box", "folner", row["n"], row["box"], note=res.label)
            run.add("folner-tall", "folner", row["n"], row["tall"], note=res.label)
    elif kind == "heisenberg-chain":
        res = probes.heisenberg_orthogonal()
        row = res.rows[0]
        run.add("orthogonal", "folner", row["folner"], row["log_det"], note=f"{res.label}; {res.summary}")
    elif kind == "boyd":
        P = polynomial(args) if args.expr else LaurentPolynomial.parse("x + x^-1")
        z0, z1 = (complex(x) for x in float_list(args.segment))
        N = int_list(args.grid_N)[0] if args.grid_N else 4096
        res = probes.continuity_scan(P, z0, z1, float_list(args.mesh), N)
        for row in res.rows:
            run.add("boyd", "quadrature", row["mesh"], row["max_jump"],
                    note=f"{res.label}; max adjacent jump; {res.summary}")
    else:
        raise UsageError(f"unknown probe {kind!r}")


COMMANDS = {
    "mahler": cmd_mahler,
    "szego": cmd_szego,
    "folner": cmd_folner,
    "quotient": cmd_quotient,
    "lawton": cmd_lawton,
    "markdist": cmd_markdist,
    "probe": cmd_probe,
}


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--expr", help="polynomial / group-ring expression, e.g. '5 - 2x - 2x^-1'")
    common.add_argument("--model", help="group model: Z, Z2, Zmod:5, cyclic:1,3, H3, H3mod:5, table:PATH")
    common.add_argument("--scheme", choices=["all", "quadrature", "jensen"],
                        help="mahler only: which estimator(s) to run (default all)")
    common.add_argument("--square", action="store_true", default=None, help="use f* f (|Q|^2) instead of f")
    common.add_argument("--grid-N", dest="grid_N", help="quadrature grid size(s), comma separated")
    common.add_argument("--folner-sizes", dest="folner_sizes", help="Folner sizes n, comma separated")
    common.add_argument("--shape", choices=["box", "tall"], help="Heisenberg Folner shape")
    common.add_argument("--quotients", help="quotient indices n, comma separated")
    common.add_argument("--method", choices=["auto", "dense", "fft"], help="quotient determinant method")
    common.add_argument("--r-vector", dest="r_vector", help="'1,n' (expanded over --quotients) or '1,4;1,8'")
    common.add_argument("--n", help="largest Toeplitz order")
    common.add_argument("--target", help="second marked group for markdist")
    common.add_argument("--metric", choices=["delta", "ball", "both"])
    common.add_argument("--lmax", help="word length / radius budget for markdist")
    common.add_argument("--kind", choices=["noninvertible", "folner-shape", "heisenberg-chain", "boyd"], help="probe to run")
    common.add_argument("--mesh", help="Boyd scan mesh sizes, strictly decreasing")
    common.add_argument("--segment", help="Boyd scan segment 'z0,z1' (real)")
    common.add_argument("--certify", action="store_true", default=None,
                        help="require an invertibility certificate before equality claims")
    common.add_argument("--grid-out", dest="grid_out",
                        help="mahler: write P on the last quadrature grid as row-major CSV")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--timing", action="store_true", default=None, help="record wall times")

    parser = _Parser(prog="fkdet", description="Mahler measures and Fuglede-Kadison determinants")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def resolve(args) -> argparse.Namespace:
    """Merge config file and defaults into ``args`` (explicit flags win)."""
    args.model_given = args.model is not None
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
    known = set(vars(args))
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)
            if dest == "model":
                args.model_given = True
    for key, value in DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    for flag in ("square", "certify", "timing"):
        setattr(args, flag, bool(getattr(args, flag)))
    if isinstance(args.grid_N, int):
        args.grid_N = str(args.grid_N)
    return args


def _exit_code(exc) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ResourceError):
        return EXIT_RESOURCE
    if isinstance(exc, (PreconditionError, ParameterError)):
        return EXIT_PRECONDITION
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    return EXIT_OTHER


def main(argv=None) -> int:
    try:
        args = resolve(build_parser().parse_args(argv))
        run = Runner(args)
        COMMANDS[args.command](args, run)
        text = emit(run.records, args.format, args.out)
        if args.out is None:
            sys.stdout.write(text)
        else:
            sys.stdout.write(table(ordered(run.records)))
        return EXIT_OK
    except UsageError as exc:
        print(f"fkdet: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FkdetError as exc:
        print(f"fkdet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"fkdet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

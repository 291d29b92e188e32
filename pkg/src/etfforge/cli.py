"""``etfforge`` command line: build, verify, enumerate, and write reproducible JSON runs.

Every command prints a run report (command echo, input digests, certificates,
result, version, wall time) to stdout.  ``enumerate`` prints JSON lines
instead.  Frames written with ``--out`` get a sibling ``*.cert.json``.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 failed certificate
under ``--strict``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .construct import (
    EtfParams,
    gmw_check,
    main_result_construct,
    main_result_params,
    pos_neg_enumerate,
    tensor_checks,
    tensor_etf,
)
from .errors import DomainError
from .field import finite_field
from .fixtures import FIXTURES, fixture_text
from .frames import (
    DEFAULT_TOL,
    Frame,
    certify,
    dumps,
    frame_to_json,
    harmonic_frame,
    import_frame,
    naimark_complement,
)
from .groups import AbelianGroup
from .muetf import export_bundle, harmonic_muetf, import_bundle, verify_muetf
from .rds import RdsSpec, load_rds, quadratic_rds, quotient_rds, singer_rds, verify_rds

EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_STRICT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument parsing helpers ----------------------------------------------------

def parse_group(text: str) -> AbelianGroup:
    """``"15"`` -> Z_15, ``"3x3"`` -> Z_3 x Z_3."""
    try:
        return AbelianGroup(tuple(int(n) for n in text.lower().split("x")))
    except ValueError as exc:
        raise UsageError(f"bad group spec {text!r}") from exc


def parse_elements(text: str) -> list[tuple[int, ...]]:
    """Comma-separated elements; coordinates inside an element are colon-separated."""
    if not text.strip():
        return []
    try:
        return [tuple(int(c) for c in item.split(":")) for item in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad element list {text!r}") from exc


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def resolve_tol(arg: float | None) -> float:
    if arg is not None:
        return arg
    env = os.environ.get("ETFFORGE_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        tol = float(env)
    except ValueError as exc:
        raise UsageError(f"ETFFORGE_TOL={env!r} is not a number") from exc
    if not tol > 0:
        raise UsageError("ETFFORGE_TOL must be positive")
    return tol


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cert_path(out: str) -> Path:
    p = Path(out)
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    return p.with_name(stem + ".cert.json")


# -- run context -------------------------------------------------------------------

class Run:
    """Collects what a command read, certified and wrote."""

    def __init__(self, argv: Sequence[str], args: argparse.Namespace):
        self.argv = list(argv)
        self.args = args
        self.inputs: dict[str, str] = {}
        self.certificates: dict[str, Any] = {}
        self.outputs: list[str] = []
        self.failed = False
        self.start = time.perf_counter()

    def read(self, path: str) -> str:
        if not Path(path).is_file():
            raise UsageError(f"no such file: {path}")
        self.inputs[path] = sha256_file(path)
        return path

    def certificate(self, name: str, cert: dict, ok: bool) -> None:
        self.certificates[name] = cert
        if not ok:
            self.failed = True

    def write(self, path: str, text: str) -> None:
        Path(path).write_text(text, encoding="utf-8")
        self.outputs.append(path)

    def emit_frame(self, name: str, frame: Frame, tol: float) -> dict | None:
        """Certify ``frame``; write it and its certificate when ``--out`` is set.

        Returns the frame JSON when it should be embedded in the report.
        """
        cert = certify(frame, tol).to_json()
        self.certificate(name, cert, cert["verdict"] == "ETF")
        out = getattr(self.args, "out", None)
        if out:
            self.write(out, dumps(frame_to_json(frame)))
            self.write(str(cert_path(out)), dumps(cert))
            return None
        return frame_to_json(frame)

    def report(self, result: Any) -> dict[str, Any]:
        return {
            "command": self.argv,
            "inputs": self.inputs,
            "certificates": self.certificates,
            "outputs": self.outputs,
            "result": result,
            "version": __version__,
            "wall_time_s": round(time.perf_counter() - self.start, 6),
        }


# -- commands ----------------------------------------------------------------------

def cmd_field(run: Run, a) -> Any:
    F = finite_field(a.p, a.k)
    # alpha has order q-1 exactly when its powers hit every nonzero element once
    order_ok = bool(np.unique(F._exp).size == F.q - 1 and 0 not in F._exp)
    degrees = [a.trace_to] if a.trace_to is not None else [d for d in range(1, a.k) if a.k % d == 0]
    traces = {}
    for d in degrees:
        exps = [int(x) for x in np.flatnonzero(F.trace_of_powers(d) == 1)]
        traces[str(d)] = {"subfield": f"GF({a.p}^{d})", "count": len(exps), "exponents": exps}
    run.certificate("generator", {"order": F.q - 1, "primitive": order_ok}, order_ok)
    return {"p": a.p, "k": a.k, "q": F.q, "modulus": F.modulus_str(),
            "modulus_coeffs": list(F.modulus), "trace_one": traces}


def _spec_from_args(run: Run, a) -> RdsSpec:
    if getattr(a, "in_", None):
        return load_rds(run.read(a.in_))
    if a.group is None or a.set is None:
        raise UsageError("give --in <spec.json> or both --group and --set")
    group = parse_group(a.group)
    elems = parse_elements(a.set)
    forbidden = parse_elements(a.forbidden) if a.forbidden else []
    return RdsSpec(group, group.subgroup(forbidden), tuple(elems))


def _rds_result(run: Run, name: str, spec: RdsSpec) -> dict:
    cert = verify_rds(spec)
    run.certificate(name, cert.to_json(), cert.valid)
    if getattr(run.args, "out", None):
        run.write(run.args.out, dumps(spec.to_json()))
        run.write(str(cert_path(run.args.out)), dumps(cert.to_json()))
    return {"spec": spec.to_json(), "forbidden_elements": [list(h) for h in spec.forbidden.elements]}


def cmd_rds(run: Run, a) -> Any:
    if a.rds_cmd == "verify":
        return _rds_result(run, "rds", _spec_from_args(run, a))
    if a.rds_cmd == "singer":
        return _rds_result(run, "rds", singer_rds(a.Q, a.J))
    if a.rds_cmd == "quadratic":
        return _rds_result(run, "rds", quadratic_rds(a.Q))
    spec = _spec_from_args(run, a)
    K = spec.group.subgroup(parse_elements(a.by))
    return _rds_result(run, "rds", quotient_rds(spec, K))


def cmd_muetf(run: Run, a) -> Any:
    tol = resolve_tol(a.tol)
    if a.muetf_cmd == "build":
        spec = load_rds(run.read(a.rds))
        bundle = harmonic_muetf(spec, standard_basis=a.standard_basis)
        if a.take is not None:
            bundle = bundle.take(a.take)
    else:
        bundle = import_bundle(run.read(a.in_))
    cert = verify_muetf(bundle, tol)
    run.certificate("muetf", cert.to_json(), cert.valid)
    result = {"dim": bundle.dim, "per_etf": bundle.per_etf, "families": bundle.families}
    out = getattr(a, "out", None)
    if a.muetf_cmd == "build" and out:
        export_bundle(bundle, out)
        run.outputs.append(out)
        run.write(str(cert_path(out)), dumps(cert.to_json()))
    elif a.muetf_cmd == "build":
        result["bundle"] = bundle.to_json()
    return result


def cmd_etf(run: Run, a) -> Any:
    tol = resolve_tol(a.tol)
    c = a.etf_cmd
    result: dict[str, Any] = {}
    if c == "harmonic":
        group = parse_group(a.group)
        frame = harmonic_frame(group, parse_elements(a.set))
    elif c == "certify":
        frame = import_frame(run.read(a.in_))
        cert = certify(frame, tol)
        run.certificate("etf", cert.to_json(), cert.is_etf)
        return {"dim": frame.dim, "count": frame.count}
    elif c == "naimark":
        frame = naimark_complement(import_frame(run.read(a.in_)), tol)
    elif c == "tensor":
        etf = import_frame(run.read(a.etf))
        bundle = import_bundle(run.read(a.muetf))
        frame = tensor_etf(etf, bundle, shuffle=a.shuffle, tol=tol)
        checks = tensor_checks(EtfParams(*etf.shape), EtfParams(bundle.dim, bundle.per_etf))
        result["tensor_checks"] = checks
    else:  # main-result
        etf = import_frame(run.read(a.in_))
        res = main_result_params(EtfParams(*etf.shape), a.J)
        result["parameters"] = res.to_json()
        frame = main_result_construct(etf, a.J, tol)
    result["dim"], result["count"] = frame.shape
    embedded = run.emit_frame("etf", frame, tol)
    if embedded is not None:
        result["frame"] = embedded
    return result


def cmd_enumerate(run: Run, a) -> Any:
    records = pos_neg_enumerate(a.max_Q, parse_int_list(a.J))
    run.certificate("enumerate", {"records": len(records),
                                  "all_checks": all(r["gap_matches"] and r["size_window"] is not False
                                                    for r in records)}, True)
    return records


def cmd_gmw(run: Run, a) -> Any:
    res = gmw_check(a.Q, a.K, a.J)
    run.certificate("gmw", {"holds": res.holds, "unique": res.unique}, res.holds and res.unique)
    return res.to_json()


def cmd_fixture(run: Run, a) -> Any:
    text = fixture_text(a.name)
    if a.out:
        run.write(a.out, text)
        return {"name": a.name, "description": FIXTURES[a.name]}
    return {"name": a.name, "description": FIXTURES[a.name], "frame": json.loads(text)}


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--strict", action="store_true", help="exit 3 if a certificate fails")
    common.add_argument("--report", metavar="FILE", help="also write the run report here")
    common.add_argument("--tol", type=float, default=None,
                        help="numerical tolerance (default: $ETFFORGE_TOL or 1e-8)")

    parser = _Parser(prog="etfforge", description="Equiangular tight frames from RDSs and MUETFs.")
    parser.add_argument("--version", action="version", version=f"etfforge {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("field", parents=[common], help="finite field modulus and trace-one sets")
    p.add_argument("p", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--trace-to", type=int, default=None, metavar="K'")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("rds", help="relative difference sets")
    rs = p.add_subparsers(dest="rds_cmd", required=True, parser_class=_Parser)
    for name in ("verify", "quotient"):
        q = rs.add_parser(name, parents=[common])
        q.add_argument("--group", help='cyclic factor orders, e.g. "15" or "3x3"')
        q.add_argument("--forbidden", help="generators of the forbidden subgroup")
        q.add_argument("--set", help='elements, e.g. "1,2,4,8" or "0:0,1:1"')
        q.add_argument("--in", dest="in_", help="RDS spec JSON instead of --group/--set")
        q.add_argument("--out")
        if name == "quotient":
            q.add_argument("--by", required=True, help="generators of K inside the forbidden subgroup")
        q.set_defaults(func=cmd_rds)
    q = rs.add_parser("singer", parents=[common])
    q.add_argument("--Q", type=int, required=True)
    q.add_argument("--J", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_rds)
    q = rs.add_parser("quadratic", parents=[common])
    q.add_argument("--Q", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_rds)

    p = sub.add_parser("muetf", help="mutually unbiased ETFs")
    ms = p.add_subparsers(dest="muetf_cmd", required=True, parser_class=_Parser)
    q = ms.add_parser("build", parents=[common])
    q.add_argument("--rds", required=True, help="RDS spec JSON")
    q.add_argument("--take", type=int)
    q.add_argument("--standard-basis", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_muetf)
    q = ms.add_parser("verify", parents=[common])
    q.add_argument("--in", dest="in_", required=True)
    q.set_defaults(func=cmd_muetf)

    p = sub.add_parser("etf", help="build and certify ETFs")
    es = p.add_subparsers(dest="etf_cmd", required=True, parser_class=_Parser)
    q = es.add_parser("harmonic", parents=[common])
    q.add_argument("--group", required=True)
    q.add_argument("--set", required=True)
    q.add_argument("--out")
    q = es.add_parser("tensor", parents=[common])
    q.add_argument("--etf", required=True)
    q.add_argument("--muetf", required=True)
    q.add_argument("--shuffle", action="store_true")
    q.add_argument("--out")
    for name in ("naimark", "certify"):
        q = es.add_parser(name, parents=[common])
        q.add_argument("--in", dest="in_", required=True)
        if name == "naimark":
            q.add_argument("--out")
    q = es.add_parser("main-result", parents=[common])
    q.add_argument("--in", dest="in_", required=True)
    q.add_argument("--J", type=int, required=True)
    q.add_argument("--out")
    p.set_defaults(func=cmd_etf)

    p = sub.add_parser("enumerate", parents=[common], help="parameters from positive/negative ETFs")
    p.add_argument("--max-Q", type=int, required=True)
    p.add_argument("--J", required=True, help='comma-separated, e.g. "1,2"')
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gmw", parents=[common], help="Gordon-Mills-Welch sumset check")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    p.set_defaults(func=cmd_gmw)

    p = sub.add_parser("fixture", parents=[common], help="write a shipped fixture frame")
    p.add_argument("name", choices=sorted(FIXTURES))
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(argv, args)
    try:
        result = args.func(run, args)
    except UsageError as exc:
        print(f"etfforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"etfforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    report = run.report(result)
    if args.cmd == "enumerate":
        for rec in result:
            sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        sys.stdout.write(dumps(report))
    if args.report:
        Path(args.report).write_text(dumps(report), encoding="utf-8")
    if args.strict and run.failed:
        print("etfforge: certificate failed under --strict", file=sys.stderr)
        return EXIT_STRICT
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

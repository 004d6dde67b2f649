"""Command-line harness: quotient reports, families, batteries, rescaling, search.

Exit codes: 0 success, 1 parse/usage failure, 2 domain error, 3 internal
conditioning failure.  JSON is the primary output schema; CSV flattens one
record per row.  Identical configs produce byte-identical output when
``--no-meta`` strips the timestamp block.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import sys

from . import __version__
from .battery import run_battery
from .blaschke import BlaschkeProduct
from .errors import ConditioningFailureError, DomainError, SmalelabError
from .quotients import (
    monocritical_family,
    monocritical_family_max_quotient,
    rescale_family,
    smale_quotients,
    symmetric_family,
    symmetric_family_min_quotient,
)
from .search import maximize_min_quotient, minimize_max_quotient


class _ParseFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_render_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, complex):
        return _render_json({"re": obj.real, "im": obj.imag}, indent)
    return json.dumps(obj)


def _flatten(prefix: str, value, row: dict) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, row)
    elif isinstance(value, (list, tuple)):
        row[prefix] = json.dumps(value, default=str)
    elif isinstance(value, float):
        row[prefix] = _format_float(value)
    else:
        row[prefix] = value


def _render_csv(rows: list[dict]) -> str:
    flat_rows = []
    columns: list[str] = []
    for r in rows:
        flat: dict = {}
        _flatten("", r, flat)
        flat_rows.append(flat)
        for k in flat:
            if k not in columns:
                columns.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for flat in flat_rows:
        writer.writerow(flat)
    return buf.getvalue()


def _emit(payload: dict, rows: list[dict], args) -> None:
    if args.format == "csv":
        text = _render_csv(rows)
    else:
        text = _render_json(payload) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta() -> dict:
    return {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tool": "smalelab",
        "version": __version__,
    }


def _parse_zeros(text: str) -> list[complex]:
    zeros = []
    for pos, token in enumerate(text.split(",")):
        token = token.strip()
        try:
            zeros.append(complex(token))
        except ValueError:
            raise _ParseFailure(f"zero #{pos + 1} ({token!r}) is not a complex number")
    return zeros


def _load_product(path: str) -> BlaschkeProduct:
    try:
        with open(path) as fh:
            record = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _ParseFailure(f"cannot read product file {path}: {exc}")
    if isinstance(record, dict) and "product" in record:
        record = record["product"]
    try:
        return BlaschkeProduct.from_record(record)
    except (KeyError, TypeError) as exc:
        raise _ParseFailure(f"malformed product record in {path}: {exc}")


def _parse_degree_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise _ParseFailure(f"bad degree range {text!r}; use N, N,M or N..M")


def _cmd_quotients(args) -> int:
    if args.file:
        product = _load_product(args.file)
    elif args.zeros:
        product = BlaschkeProduct(args.rotation, _parse_zeros(args.zeros))
    else:
        raise _ParseFailure("one of --zeros or --file is required")
    report = smale_quotients(product, args.tol)
    rec = report.to_record()
    payload = {
        "config": _config(args, zeros=args.zeros, file=args.file),
        "product": product.to_record(),
        "report": rec,
    }
    if not args.no_meta:
        payload["meta"] = _meta()
    rows = [
        {
            "product_id": 0,
            "degree": product.degree,
            "index": i,
            "zeta_re": q["zeta"]["re"],
            "zeta_im": q["zeta"]["im"],
            "value": q["value"],
            "min_quotient": rec["min_quotient"],
            "max_quotient": rec["max_quotient"],
            "min_quotient_bound": rec["min_quotient_bound"],
            "max_quotient_floor": rec["max_quotient_floor"],
        }
        for i, q in enumerate(rec["quotients"])
    ]
    _emit(payload, rows, args)
    return 0


def _cmd_family(args) -> int:
    if args.kind == "symmetric":
        if args.alpha is None:
            raise _ParseFailure("family symmetric requires --alpha")
        product = symmetric_family(args.n, args.alpha)
        beta = args.alpha ** (args.n - 1)
        closed = symmetric_family_min_quotient(args.n, beta)
        report = smale_quotients(product, args.tol)
        numeric = report.min_quotient
        parameter = {"alpha": args.alpha, "beta": beta}
    else:
        if args.a is None:
            raise _ParseFailure("family monocritical requires --a")
        product = monocritical_family(args.n, args.a)
        closed = monocritical_family_max_quotient(args.n, args.a)
        report = smale_quotients(product, args.tol)
        numeric = report.max_quotient
        parameter = {"a": args.a}
    critical = [
        {"zeta": {"re": c.location.real, "im": c.location.imag},
         "multiplicity": c.multiplicity}
        for c in product.critical_points(args.tol).interior
    ]
    payload = {
        "config": _config(args, kind=args.kind, n=args.n, **parameter),
        "product": product.to_record(),
        "critical_points": critical,
        "closed_form": closed,
        "numeric": numeric,
        "difference": numeric - closed,
        "report": report.to_record(),
    }
    if not args.no_meta:
        payload["meta"] = _meta()
    rows = [{
        "kind": args.kind, "n": args.n, **parameter,
        "closed_form": closed, "numeric": numeric, "difference": numeric - closed,
    }]
    _emit(payload, rows, args)
    return 0


def _cmd_verify(args) -> int:
    degrees = _parse_degree_range(args.n)
    include = tuple(_load_product(p) for p in args.include_file)
    summary = run_battery(
        degrees,
        args.samples,
        args.seed,
        preimage_targets=args.preimage_targets,
        boundary_samples=args.boundary_samples,
        include=include,
        tol=args.tol,
        bound_variant=args.bound_variant,
    )
    payload = {"config": _config(args, n=args.n, samples=args.samples), **summary}
    if not args.no_meta:
        payload["meta"] = _meta()
    rows = [
        {
            "id": c["id"],
            "samples": c["samples"],
            "passes": c["passes"],
            "worst_margin": c["worst_margin"],
        }
        for c in summary["checks"]
    ]
    _emit(payload, rows, args)
    return 0 if summary["all_pass"] else 3


def _cmd_rescale(args) -> int:
    zeros = _parse_zeros(args.zeros)
    try:
        ms = [float(t) for t in args.m.split(",")]
    except ValueError:
        raise _ParseFailure(f"bad m list {args.m!r}")
    entries = []
    errors = []
    for m in ms:
        pair = rescale_family(zeros, m)
        bq = pair.blaschke_quotients(args.tol)
        residuals = pair.identity_residuals(args.tol)
        errs = pair.quotient_errors(args.tol)
        worst_err = max(errs)
        errors.append(worst_err)
        entries.append({
            "m": m,
            "product": pair.product.to_record(),
            "blaschke_quotients": bq,
            "scaled_quotients": pair.scaled_quotients(args.tol),
            "identity_residual": max(residuals),
            "quotient_error": worst_err,
        })
    ratios = [
        {"m_small": ms[i], "m_large": ms[i + 1],
         "error_ratio": errors[i] / errors[i + 1] if errors[i + 1] else math.inf,
         "m_ratio_squared": (ms[i + 1] / ms[i]) ** 2}
        for i in range(len(ms) - 1)
    ]
    pair0 = rescale_family(zeros, ms[0])
    payload = {
        "config": _config(args, zeros=args.zeros, m=args.m),
        "polynomial_quotients": pair0.polynomial_quotients(args.tol),
        "rescalings": entries,
        "decay_ratios": ratios,
    }
    if not args.no_meta:
        payload["meta"] = _meta()
    rows = [
        {"m": e["m"], "identity_residual": e["identity_residual"],
         "quotient_error": e["quotient_error"]}
        for e in entries
    ]
    _emit(payload, rows, args)
    return 0


def _cmd_search(args) -> int:
    runner = maximize_min_quotient if args.objective == "sup" else minimize_max_quotient
    result = runner(args.n, restarts=args.restarts, budget=args.budget, seed=args.seed)
    payload = {
        "config": _config(args, objective=args.objective, n=args.n,
                          restarts=args.restarts, budget=args.budget),
        **result.to_record(),
    }
    if not args.no_meta:
        payload["meta"] = {**_meta(), "wall_seconds": result.wall_seconds}
    if result.exceeds_unity:
        sys.stderr.write(
            f"NOTE: min-quotient {result.best_value!r} exceeds 1 at degree {args.n}\n"
        )
    rows = [{
        "objective": result.objective, "n": result.n,
        "best_value": result.best_value, "seed": result.seed,
        "evaluations": result.evaluations,
    }]
    _emit(payload, rows, args)
    return 0


def _config(args, **extra) -> dict:
    cfg = {"command": args.command, "seed": getattr(args, "seed", None),
           "tol": args.tol, "format": args.format}
    cfg.update(extra)
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    p.add_argument("--tol", type=float, default=1e-12,
                   help="root acceptance tolerance (relative backward error)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--no-meta", action="store_true",
                   help="omit timestamps for byte-identical output")


def _build_parser() -> _Parser:
    parser = _Parser(prog="smalelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quotients", help="quotient report for one product")
    p.add_argument("--zeros", default=None, help="comma-separated zeros, e.g. 0,0.5")
    p.add_argument("--rotation", type=float, default=0.0)
    p.add_argument("--file", default=None, help="product file (JSON)")
    _add_common(p)
    p.set_defaults(func=_cmd_quotients)

    p = sub.add_parser("family", help="extremal family member with closed-form cross-check")
    p.add_argument("kind", choices=("symmetric", "monocritical"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None, help="ring radius (symmetric)")
    p.add_argument("--a", type=float, default=None, help="critical modulus (monocritical)")
    _add_common(p)
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("verify", help="invariant battery over sampled products")
    p.add_argument("--n", default="2..8", help="degree range, e.g. 2..8 or 3,5")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--preimage-targets", type=int, default=16)
    p.add_argument("--boundary-samples", type=int, default=64)
    p.add_argument("--include-file", action="append", default=[],
                   help="extra product file to inject (repeatable)")
    p.add_argument("--bound-variant", choices=("fractional", "constant4", "both"),
                   default="both",
                   help="separation constant 4^((n-2)/(n-1)), plain 4, or both")
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("rescale", help="polynomial-to-disk rescaling convergence table")
    p.add_argument("--zeros", required=True, help="nonzero polynomial roots")
    p.add_argument("--m", required=True, help="comma-separated rescaling factors")
    _add_common(p)
    p.set_defaults(func=_cmd_rescale)

    p = sub.add_parser("search", help="extremal search for quotient levels")
    p.add_argument("objective", choices=("sup", "inf"),
                   help="sup of the min quotient or inf of the max quotient")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--budget", type=int, default=2000)
    _add_common(p)
    p.set_defaults(func=_cmd_search)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _ParseFailure as exc:
        sys.stderr.write(f"smalelab: parse error: {exc}\n")
        return 1
    except DomainError as exc:
        sys.stderr.write(f"smalelab: domain error: {exc}\n")
        return 2
    except ConditioningFailureError as exc:
        sys.stderr.write(f"smalelab: conditioning failure: {exc}\n")
        return 3
    except SmalelabError as exc:
        sys.stderr.write(f"smalelab: error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: deterministic JSON/CSV emission for all checks.

Every command prints one JSON record per line (or CSV rows for scans) with
floats normalized to 12 significant digits, so re-running a command with the
same configuration produces byte-identical output.  Errors become a single
machine-readable JSON record on stderr and a nonzero exit status.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import nullcontext
from dataclasses import asdict
from multiprocessing import Pool

from . import families
from .cfrac import cf_expand, exact_unit, fundamental_unit
from .classno import class_number_forms, l_value_exact, l_value_truncated
from .criterion import (
    CriterionInput,
    NormSplit,
    evaluate_criterion,
    nonprimitive_product_example,
    search_nonprimitive_example,
)
from .intarith import is_discriminant
from .quadorder import (
    QuadIrrational,
    classify,
    format_ideal_literal,
    parse_ideal_literal,
)

DEFAULT_EPS1 = 0.9
DEFAULT_BOUND_EXPONENT = 2.05
MAX_EULER_BOUND = 10**6

SCAN_CSV_FIELDS = ["k", "n", "squarefree", "h", "regulator", "L_trunc", "bound_ok"]


# ---------------------------------------------------------------------------
# serialization helpers


def _round_floats(value):
    """12-significant-digit normalization, applied recursively."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def _emit_json(record: dict, stream) -> None:
    print(json.dumps(_round_floats(record)), file=stream)


def _float_cell(value) -> str:
    return "" if value is None else f"{value:.12g}"


def _bool_cell(value) -> str:
    return "" if value is None else ("1" if value else "0")


def _out_stream(args):
    path = getattr(args, "out", None)
    if path:
        return open(path, "w", encoding="utf-8", newline="")
    return nullcontext(sys.stdout)


def _require_discriminant(d: int) -> int:
    if not is_discriminant(d):
        raise ValueError(f"{d} is not a real quadratic discriminant")
    return d


# ---------------------------------------------------------------------------
# argument parsing helpers


def _parse_scale(text: str) -> int:
    """Integer argument that also accepts scientific notation like 1e10."""
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"{text} is not an integer")
    return int(value)


def _parse_primes(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]


def _parse_norm_splits(text: str) -> tuple[NormSplit, ...]:
    """Parse "6=2*3, 5" into norm decompositions; a bare n means n = n * 1."""
    splits = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "=" in token:
            total_text, _, rest = token.partition("=")
            left, star, right = rest.partition("*")
            if not star:
                raise ValueError(
                    f"norm decomposition {token!r} must look like n=a*b"
                )
            splits.append(
                NormSplit(int(total_text), int(left.strip()), int(right.strip()))
            )
        else:
            n = int(token)
            splits.append(NormSplit(n, n, 1))
    if not splits:
        raise ValueError("at least one norm is required")
    return tuple(splits)


def _parse_params(text: str | None) -> dict[str, int]:
    if not text:
        return {}
    params = {}
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        key, eq, value = token.partition("=")
        if not eq:
            raise ValueError(f"parameter {token!r} must look like name=value")
        params[key.strip()] = int(value.strip())
    return params


# ---------------------------------------------------------------------------
# parallel scan plumbing


def _chunk_bounds(lo: int, hi: int, jobs: int) -> list[tuple[int, int]]:
    """Split the inclusive range [lo, hi] into contiguous inclusive spans."""
    if hi < lo:
        return []
    total = hi - lo + 1
    jobs = max(1, min(jobs, total))
    size, extra = divmod(total, jobs)
    spans, start = [], lo
    for i in range(jobs):
        end = start + size - 1 + (1 if i < extra else 0)
        spans.append((start, end))
        start = end + 1
    return spans


def _family_chunk_worker(task):
    kind, params, lo, hi = task
    return families.family_scan(kind, params, range(lo, hi + 1))


def _progression_chunk_worker(task):
    spec, lo, hi, strict, with_h, bound = task
    return families.scan_squarefree(
        spec,
        k_max=hi,
        k_min=lo,
        strict_range=strict,
        with_h=with_h,
        euler_bound_B=bound,
    )


def _run_chunked(worker, tasks, jobs: int) -> list[families.ScanRecord]:
    if not tasks:
        return []
    if jobs <= 1 or len(tasks) == 1:
        chunks = [worker(task) for task in tasks]
    else:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            chunks = pool.map(worker, tasks)
    return [rec for chunk in chunks for rec in chunk]


def _collect_family_records(kind, params, lo, hi, jobs):
    tasks = [(kind, params, a, b) for a, b in _chunk_bounds(lo, hi, jobs)]
    return _run_chunked(_family_chunk_worker, tasks, jobs)


# ---------------------------------------------------------------------------
# scan record emission


def _scan_header(m: int) -> list[str]:
    return ["k", "n"] + [f"d_{i + 1}" for i in range(m)] + SCAN_CSV_FIELDS[2:]


def _scan_row(rec: families.ScanRecord) -> list[str]:
    return (
        [str(rec.k), str(rec.n)]
        + [str(d) for d in rec.d_values]
        + [
            ";".join("1" if s else "0" for s in rec.squarefree),
            "" if rec.h is None else str(rec.h),
            _float_cell(rec.regulator),
            _float_cell(rec.L_truncated),
            _bool_cell(rec.bound_ok),
        ]
    )


def _emit_scan(records, m: int, args) -> None:
    with _out_stream(args) as stream:
        if args.format == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(_scan_header(m))
            for rec in records:
                writer.writerow(_scan_row(rec))
        else:
            for rec in records:
                _emit_json(asdict(rec), stream)


# ---------------------------------------------------------------------------
# subcommand implementations


def cmd_cf(args) -> int:
    d = _require_discriminant(args.d)
    a = args.a
    b = args.b if args.b is not None else d % 2
    rho = QuadIrrational(d, a, b)
    exp = cf_expand(rho, max_steps=args.max_steps)
    with _out_stream(args) as stream:
        _emit_json(
            {
                "d": d,
                "a": a,
                "b": b,
                "preperiod": list(exp.preperiod),
                "period": list(exp.period),
                "period_length": len(exp.period),
            },
            stream,
        )
    return 0


def cmd_unit(args) -> int:
    d = _require_discriminant(args.d)
    info = fundamental_unit(d)
    record = {
        "d": d,
        "l": info.period_length,
        "regulator": info.regulator,
        "norm_sign": info.norm_sign,
    }
    if args.exact:
        unit = exact_unit(d)
        record["x"] = unit.x
        record["y"] = unit.y
    with _out_stream(args) as stream:
        _emit_json(record, stream)
    return 0


def cmd_classno(args) -> int:
    d = _require_discriminant(args.d)
    h, h_narrow = class_number_forms(d)
    with _out_stream(args) as stream:
        _emit_json({"d": d, "h": h, "h_narrow": h_narrow}, stream)
    return 0


def cmd_lvalue(args) -> int:
    d = _require_discriminant(args.d)
    if args.method == "exact":
        record = {"d": d, "method": "exact", "value": l_value_exact(d)}
    else:
        record = {
            "d": d,
            "method": "euler",
            "bound": args.bound,
            "value": l_value_truncated(d, args.bound),
        }
    with _out_stream(args) as stream:
        _emit_json(record, stream)
    return 0


def cmd_family_build(args) -> int:
    spec = families.build_progression(args.m, args.primes, args.x, args.eps1)
    with _out_stream(args) as stream:
        _emit_json(asdict(spec), stream)
    return 0


def _load_spec(path: str) -> families.ProgressionSpec:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return families.ProgressionSpec(
        m=int(data["m"]),
        primes=tuple(data["primes"]),
        x=int(data["x"]),
        eps1=float(data["eps1"]),
        S=tuple(data["S"]),
        P_small=tuple(data["P_small"]),
        S_prime=tuple(data["S_prime"]),
        q=int(data["q"]),
        n0=int(data["n0"]),
    )


def cmd_family_scan(args) -> int:
    if bool(args.spec) == bool(args.kind):
        raise ValueError("family scan needs exactly one of --spec or --kind")
    if args.kmax < 0:
        raise ValueError("--kmax must be nonnegative")
    if args.spec:
        spec = _load_spec(args.spec)
        bound = args.euler_bound
        if args.with_h and bound is None:
            if args.bound_exponent <= 2:
                raise ValueError("--bound-exponent must be greater than 2")
            bound = int(
                min(math.log(spec.x) ** args.bound_exponent, MAX_EULER_BOUND)
            )
        tasks = [
            (spec, lo, hi, args.strict_range, args.with_h, bound)
            for lo, hi in _chunk_bounds(args.kmin, args.kmax, args.jobs)
        ]
        records = _run_chunked(_progression_chunk_worker, tasks, args.jobs)
        m = spec.m
    else:
        params = _parse_params(args.params)
        records = _collect_family_records(
            args.kind, params, args.kmin, args.kmax, args.jobs
        )
        m = 1
    _emit_scan(records, m, args)
    return 0


def cmd_verify(args) -> int:
    if args.family == "shanks":
        kind, params = "shanks", {}
        lo = args.kmin if args.kmin is not None else 2
        hi = args.kmax if args.kmax is not None else 14
    elif args.family == "yamamoto":
        if args.p is None:
            raise ValueError("verify yamamoto requires --p")
        kind = "yamamoto_minus" if args.sign == "minus" else "yamamoto_plus"
        params = {"p": args.p}
        lo = args.kmin if args.kmin is not None else 1
        hi = args.kmax if args.kmax is not None else 1000
    else:
        kind, params = "chowla", {}
        lo = args.kmin if args.kmin is not None else 1
        hi = args.kmax if args.kmax is not None else 1000
    records = _collect_family_records(kind, params, lo, hi, args.jobs)
    violations = 0
    with _out_stream(args) as stream:
        for rec in records:
            _emit_json(
                {
                    "family": args.family,
                    "k": rec.k,
                    "n": rec.n,
                    "d": rec.d_values[0],
                    "regulator": rec.regulator,
                    "bound": rec.bound,
                    "ok": bool(rec.bound_ok),
                },
                stream,
            )
            if not rec.bound_ok:
                violations += 1
        if violations:
            _emit_json(
                {"family": args.family, "violations": violations}, sys.stderr
            )
    return 1 if violations else 0


def cmd_constants(args) -> int:
    report = families.compute_constants(args.m, args.primes)
    record = {"m": args.m, "primes": list(args.primes), **asdict(report)}
    witness = families.check_star(args.m, args.primes)
    if witness is not None:
        record["star_modulus"] = witness.modulus
        record["star_residue"] = witness.residue
        record["star_root"] = witness.root
    with _out_stream(args) as stream:
        _emit_json(record, stream)
    return 0


def cmd_criterion(args) -> int:
    if args.mode == "hk-remark":
        if args.params_tuple:
            values = [int(tok) for tok in args.params_tuple.split(",")]
            if len(values) != 5:
                raise ValueError("--params needs five integers r,s,t,k,c")
            rec = nonprimitive_product_example(*values)
        elif args.search:
            rec = search_nonprimitive_example(
                r_max=args.r_max,
                s_max=args.s_max,
                t_max=args.t_max,
                k_max=args.k_max,
                c_max=args.c_max,
            )
        else:
            raise ValueError("criterion hk-remark needs --search or --params")
        record = {
            "params": list(rec.params),
            "d": rec.d,
            "factor_1": format_ideal_literal(rec.factor_1),
            "factor_2": format_ideal_literal(rec.factor_2),
            "companion": format_ideal_literal(rec.companion),
            "product": format_ideal_literal(rec.product),
            "product_content": rec.product_content,
            "product_norm": rec.product_norm,
            "norm_bound_ok": rec.norm_bound_ok,
            "subset_sums": rec.subset_sums,
        }
    else:
        if args.d is None or args.norms is None:
            raise ValueError("criterion needs --d and --norms")
        splits = _parse_norm_splits(args.norms)
        _, bound = evaluate_criterion(CriterionInput(args.d, splits))
        record = asdict(bound)
    with _out_stream(args) as stream:
        _emit_json(record, stream)
    return 0


def cmd_ideal(args) -> int:
    ideal = parse_ideal_literal(args.literal)
    flags = classify(ideal)
    with _out_stream(args) as stream:
        _emit_json(
            {
                "literal": format_ideal_literal(ideal),
                "d": ideal.d,
                "a": ideal.a,
                "b": ideal.b,
                "e": ideal.e,
                "norm": ideal.norm,
                "primitive": flags.primitive,
                "regular": flags.regular,
                "prime_to_conductor": flags.prime_to_conductor,
                "reduced": flags.reduced,
            },
            stream,
        )
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, jobs: bool = False):
    sub.add_argument("--out", help="write output to this path instead of stdout")
    if jobs:
        sub.add_argument(
            "--jobs", type=int, default=1, help="worker processes for scans"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrl",
        description=(
            "Real quadratic orders: continued fractions, units, class"
            " numbers, discriminant families, and regulator lower bounds."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cf = sub.add_parser("cf", help="continued-fraction expansion")
    p_cf.add_argument("--d", type=int, required=True)
    p_cf.add_argument("--a", type=int, default=1)
    p_cf.add_argument("--b", type=int, default=None)
    p_cf.add_argument("--max-steps", type=int, default=None)
    _add_common(p_cf)
    p_cf.set_defaults(func=cmd_cf)

    p_unit = sub.add_parser("unit", help="fundamental unit and regulator")
    p_unit.add_argument("--d", type=int, required=True)
    p_unit.add_argument(
        "--exact", action="store_true", help="include exact unit coordinates"
    )
    _add_common(p_unit)
    p_unit.set_defaults(func=cmd_unit)

    p_h = sub.add_parser("classno", help="class number from reduced forms")
    p_h.add_argument("--d", type=int, required=True)
    _add_common(p_h)
    p_h.set_defaults(func=cmd_classno)

    p_l = sub.add_parser("lvalue", help="Dirichlet L-value at 1")
    p_l.add_argument("--d", type=int, required=True)
    p_l.add_argument("--method", choices=["exact", "euler"], default="exact")
    p_l.add_argument("--bound", type=int, default=10**5)
    _add_common(p_l)
    p_l.set_defaults(func=cmd_lvalue)

    p_fam = sub.add_parser("family", help="discriminant family tools")
    fam_sub = p_fam.add_subparsers(dest="family_command", required=True)

    p_build = fam_sub.add_parser("build", help="build a progression spec")
    p_build.add_argument("--m", type=int, required=True)
    p_build.add_argument("--primes", type=_parse_primes, required=True)
    p_build.add_argument("--x", type=_parse_scale, required=True)
    p_build.add_argument("--eps1", type=float, default=DEFAULT_EPS1)
    _add_common(p_build)
    p_build.set_defaults(func=cmd_family_build)

    p_scan = fam_sub.add_parser("scan", help="scan a family for records")
    p_scan.add_argument("--spec", help="progression spec JSON from family build")
    p_scan.add_argument(
        "--kind",
        choices=["chowla", "shanks", "yamamoto_plus", "yamamoto_minus", "cubic"],
    )
    p_scan.add_argument("--params", help="named-family parameters, e.g. p=5,q=7")
    p_scan.add_argument("--kmin", type=int, default=1)
    p_scan.add_argument("--kmax", type=int, required=True)
    p_scan.add_argument("--strict-range", action="store_true")
    p_scan.add_argument(
        "--with-h", action="store_true", help="attach h, regulator, L, bound"
    )
    p_scan.add_argument("--euler-bound", type=int, default=None)
    p_scan.add_argument(
        "--bound-exponent", type=float, default=DEFAULT_BOUND_EXPONENT
    )
    p_scan.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p_scan, jobs=True)
    p_scan.set_defaults(func=cmd_family_scan)

    p_ver = sub.add_parser("verify", help="check family bounds; exit 1 on violation")
    p_ver.add_argument("family", choices=["shanks", "yamamoto", "chowla"])
    p_ver.add_argument("--kmin", type=int, default=None)
    p_ver.add_argument("--kmax", type=int, default=None)
    p_ver.add_argument("--p", type=int, default=None)
    p_ver.add_argument("--sign", choices=["plus", "minus"], default="plus")
    _add_common(p_ver, jobs=True)
    p_ver.set_defaults(func=cmd_verify)

    p_const = sub.add_parser("constants", help="progression constants")
    p_const.add_argument("--m", type=int, required=True)
    p_const.add_argument("--primes", type=_parse_primes, required=True)
    _add_common(p_const)
    p_const.set_defaults(func=cmd_constants)

    p_crit = sub.add_parser(
        "criterion", help="regulator lower bound from norm decompositions"
    )
    p_crit.add_argument(
        "mode", nargs="?", choices=["hk-remark"], default=None,
        help="optional: build the non-primitive product example",
    )
    p_crit.add_argument("--d", type=int, default=None)
    p_crit.add_argument("--norms", help='decompositions, e.g. "6=2*3,5"')
    p_crit.add_argument("--search", action="store_true")
    p_crit.add_argument(
        "--params", dest="params_tuple", help="explicit r,s,t,k,c parameters"
    )
    p_crit.add_argument("--r-max", type=int, default=5)
    p_crit.add_argument("--s-max", type=int, default=5)
    p_crit.add_argument("--t-max", type=int, default=4)
    p_crit.add_argument("--k-max", type=int, default=5)
    p_crit.add_argument("--c-max", type=int, default=50)
    _add_common(p_crit)
    p_crit.set_defaults(func=cmd_criterion)

    p_ideal = sub.add_parser("ideal", help="parse and classify an ideal literal")
    p_ideal.add_argument("--literal", required=True)
    _add_common(p_ideal)
    p_ideal.set_defaults(func=cmd_ideal)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single funnel: machine-readable error record
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line harness: censuses, inversion, simulation, rank bounds,
multivariate exploration.

Every run emits a JSON document {"schema_version": 1, "records": [...]}
(optionally a CSV rendering of the same records); exact rationals are
serialized as "num/den" strings so acceptance checks never see rounded
values.  Exit codes: 0 success, 2 validation, 3 budget, 4 not-in-range,
5 attempts-exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import secrets
import sys
import time
from fractions import Fraction

import numpy as np

from . import prony, qsim, zmap
from .errors import (
    AttemptsExhaustedError,
    BudgetExceededError,
    NotInGoodRangeError,
    ValidationError,
)
from .fields import Field
from .zmap import Budget, ProblemParams


def _budget_from_env() -> Budget:
    return Budget(
        cells=int(os.environ.get("QINTERP_CELL_CAP", zmap.DEFAULT_CELL_CAP)),
        pairs=int(os.environ.get("QINTERP_PAIR_CAP", zmap.DEFAULT_PAIR_CAP)),
    )


def _amp_cap_from_env() -> int:
    return int(os.environ.get("QINTERP_AMP_CAP", qsim.DEFAULT_AMP_CAP))


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = None
    m, f = q, 2
    while f * f <= m:
        if m % f == 0:
            p = f
            break
        f += 1
    if p is None:
        p = q
    r = 0
    while m % p == 0 and m > 1:
        m //= p
        r += 1
    if p**r != q:
        return None
    return p, r


def _expand_q(spec: str) -> list[tuple[int, int, int]]:
    """Expand a q sweep ("5..31" or "5,7,25") into (p, r, q) triples,
    skipping non-prime-powers with a note on stderr."""
    if ".." in spec:
        lo_s, hi_s = spec.split("..", 1)
        values = range(int(lo_s), int(hi_s) + 1)
    else:
        values = [int(v) for v in spec.split(",")]
    out = []
    for q in values:
        pr = _prime_power(q)
        if pr is None:
            print(f"note: skipping q={q} (not a prime power)", file=sys.stderr)
            continue
        out.append((pr[0], pr[1], q))
    if not out:
        raise ValidationError(f"q sweep {spec!r} contains no prime powers")
    return out


def _field_specs(args) -> list[tuple[int, int]]:
    if getattr(args, "q", None):
        return [(p, r) for p, r, _ in _expand_q(args.q)]
    if args.p is None:
        raise ValidationError("provide -p (with optional -r) or a -q sweep")
    return [(args.p, args.r)]


def _fraction_fields(name: str, fr: Fraction) -> dict:
    return {f"{name}_exact": f"{fr.numerator}/{fr.denominator}", name: float(fr)}


def _parse_vector(text: str, expected_len: int, q: int, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValidationError(f"{what} must be comma-separated integers") from None
    if len(vals) != expected_len:
        raise ValidationError(f"{what} must have length {expected_len}, got {len(vals)}")
    if any(not (0 <= v < q) for v in vals):
        raise ValidationError(f"{what} entries must be element indices in [0, {q})")
    return vals


def _record(command: str, config: dict, metrics: dict, seed, started: float) -> dict:
    return {
        "command": command,
        "config": config,
        "metrics": metrics,
        "seed": seed,
        "duration_seconds": time.perf_counter() - started,
    }


# ---------------------------------------------------------------------------
# Subcommands.  Each returns a list of records.


def _cmd_census(args, budget: Budget, amp_cap: int, seed: int) -> list[dict]:
    records = []
    for p, r in _field_specs(args):
        started = time.perf_counter()
        field = Field(p, r)
        params = ProblemParams(field, d=args.d, k=args.k, n=1)
        census = zmap.enumerate_census(params, budget, workers=args.workers)
        metrics = {
            "range_size": census.range_size,
            "good_range_size": census.good_range_size,
            "histogram": sorted([s, m] for s, m in census.histogram.items()),
            "good_histogram": sorted([s, m] for s, m in census.good_histogram.items()),
        }
        for scope in ("all", "good"):
            metrics.update(_fraction_fields(f"success_{scope}",
                                            census.success_probability(scope)))
            mu, var = census.moment_stats(scope)
            metrics.update(_fraction_fields(f"mean_{scope}", mu))
            metrics.update(_fraction_fields(f"variance_{scope}", var))
        config = {"p": p, "r": r, "q": field.q, "d": args.d, "k": args.k,
                  "workers": args.workers}
        records.append(_record("census", config, metrics, seed, started))
    return records


def _cmd_invert(args, budget: Budget, amp_cap: int, seed: int) -> list[dict]:
    started = time.perf_counter()
    field = Field(args.p, args.r)
    d = args.d
    k = (d + 1) // 2 if d % 2 else d // 2 + 1
    params = ProblemParams(field, d=d, k=k, n=1)
    config = {"p": args.p, "r": args.r, "q": field.q, "d": d, "k": k}

    if args.verify_all:
        if d % 2 == 0:
            raise ValidationError("--verify-all needs odd d (deterministic inversion)")
        reps = zmap.fiber_representatives(params, "good", budget)
        checked = 0
        for pair_id in reps:
            pair = zmap.pair_from_id(params, int(pair_id))
            z = zmap.z_eval(params, pair.x, pair.y)
            got = prony.invert_z(z, params)
            order = sorted(range(k), key=lambda i: pair.x[i])
            expect_x = tuple(pair.x[i] for i in order)
            expect_y = tuple(pair.y[i] for i in order)
            if (got.x, got.y) != (expect_x, expect_y):
                raise AssertionError(f"round trip failed at z={z}")
            checked += 1
        metrics = {"fibers_verified": checked, "message": "all fibers verified"}
        return [_record("invert", {**config, "verify_all": True}, metrics, seed, started)]

    z = _parse_vector(args.z, d + 1, field.q, "z")
    if d % 2:
        pair = prony.invert_z(z, params)
    else:
        rng = np.random.default_rng(seed)
        pair = prony.invert_z_extended(z, params, rng, attempt_cap=args.attempt_cap)
    metrics = {
        "x": ",".join(map(str, pair.x)),
        "y": ",".join(map(str, pair.y)),
        "attempts": pair.attempts,
    }
    if pair.extension is not None:
        metrics["extension"] = pair.extension
    return [_record("invert", {**config, "z": args.z}, metrics, seed, started)]


def _cmd_simulate(args, budget: Budget, amp_cap: int, seed: int) -> list[dict]:
    started = time.perf_counter()
    field = Field(args.p, args.r)
    params = ProblemParams(field, d=args.d, k=args.k, n=1)
    rng = np.random.default_rng(seed)
    census = zmap.cached_census(params, budget)
    config = {"p": args.p, "r": args.r, "q": field.q, "d": args.d, "k": args.k,
              "variant": args.variant, "all_c": args.all_c}

    def run_one(c):
        if args.variant == "optimal":
            good = qsim.run_interpolation(params, c, "good", budget, amp_cap)
            all_ = qsim.run_interpolation(params, c, "all", budget, amp_cap)
            return {"success_good": good.success_probability,
                    "success_all": all_.success_probability}
        if args.variant == "pgm":
            return {"success": qsim.run_pgm(params, c, budget, amp_cap).success_probability}
        return {"success": qsim.run_superposed_rep(params, c, budget, amp_cap)
                .success_probability}

    if args.all_c:
        cs = [tuple(int(v) for v in np.unravel_index(i, (field.q,) * (args.d + 1)))
              for i in range(params.cell_count)]
    elif args.c is not None:
        cs = [_parse_vector(args.c, args.d + 1, field.q, "c")]
    else:
        cs = [tuple(field.random_index(rng) for _ in range(args.d + 1))]

    per_c = [run_one(c) for c in cs]
    metrics: dict = {"c_count": len(cs)}
    for key in per_c[0]:
        vals = [m[key] for m in per_c]
        metrics[key] = vals[0]
        if len(vals) > 1:
            metrics[f"{key}_spread"] = max(vals) - min(vals)
    if not args.all_c:
        metrics["c"] = ",".join(map(str, cs[0]))
    if args.variant == "optimal":
        metrics.update(_fraction_fields("expected_good", census.success_probability("good")))
        metrics.update(_fraction_fields("expected_all", census.success_probability("all")))
    elif args.variant == "pgm":
        metrics["expected"] = qsim.pgm_success_formula(params, budget)
        metrics.update(_fraction_fields("optimum", census.success_probability("all")))
    else:
        metrics.update(_fraction_fields("expected", census.success_probability("good")))
    return [_record("simulate", config, metrics, seed, started)]


def _cmd_rank(args, budget: Budget, amp_cap: int, seed: int) -> list[dict]:
    started = time.perf_counter()
    field = Field(args.p, args.r)
    params = ProblemParams(field, d=args.d, k=max(args.k, 1), n=1)
    rank = qsim.span_rank(params, args.k, budget)
    if args.k >= 1:
        size = zmap.cached_census(ProblemParams(field, d=args.d, k=args.k), budget).range_size
    else:
        size = 1
    config = {"p": args.p, "r": args.r, "q": field.q, "d": args.d, "k": args.k}
    metrics = {"rank": rank, "range_size": size, "bound_holds": rank <= size}
    return [_record("rank", config, metrics, seed, started)]


def _cmd_multivariate(args, budget: Budget, amp_cap: int, seed: int) -> list[dict]:
    records = []
    rng = np.random.default_rng(seed)
    for p, r in _field_specs(args):
        started = time.perf_counter()
        field = Field(p, r)
        params = ProblemParams(field, d=args.d, k=args.k, n=args.n)
        result = zmap.multivariate_census(params, mode=args.mode,
                                          samples=args.samples, rng=rng,
                                          budget=budget)
        metrics = result.to_json_dict()
        metrics.pop("params")
        duration = metrics.pop("duration_seconds")
        config = {"p": p, "r": r, "q": field.q, "d": args.d, "k": args.k,
                  "n": args.n, "J": params.num_coeffs, "mode": args.mode,
                  "samples": args.samples if args.mode == "sample" else None}
        rec = _record("multivariate", config, metrics, seed, started)
        rec["duration_seconds"] = duration
        records.append(rec)
    return records


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qinterp",
        description="Power-sum range censuses, inversion, and statevector "
                    "simulation over GF(q).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", default="-", metavar="PATH",
                        help="write the JSON document here ('-' = stdout)")
    common.add_argument("--csv", default=None, metavar="PATH",
                        help="also write a CSV rendering of the records")
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: fresh entropy, echoed in output)")
    sub = parser.add_subparsers(dest="command", required=True)

    def field_args(sp, with_sweep=False):
        sp.add_argument("-p", type=int, default=None, help="field characteristic")
        sp.add_argument("-r", type=int, default=1, help="extension degree")
        if with_sweep:
            sp.add_argument("-q", default=None,
                            help="sweep over prime powers, e.g. 5..31 or 5,7,25")

    sp = sub.add_parser("census", parents=[common], help="exact range/fiber census")
    field_args(sp, with_sweep=True)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(handler=_cmd_census)

    sp = sub.add_parser("invert", parents=[common], help="recover (x, y) from power sums")
    field_args(sp)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("-z", default=None,
                    help="comma-separated element indices z_0,...,z_d")
    sp.add_argument("--attempt-cap", type=int, default=None)
    sp.add_argument("--verify-all", action="store_true",
                    help="round-trip every good pair instead of inverting one z")
    sp.set_defaults(handler=_cmd_invert)

    sp = sub.add_parser("simulate", parents=[common], help="statevector simulation")
    sp.add_argument("variant", choices=["optimal", "pgm", "superposed"])
    field_args(sp)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--c", default=None, help="coefficient vector c_0,...,c_d")
    sp.add_argument("--all-c", action="store_true",
                    help="sweep every c and report the success spread")
    sp.set_defaults(handler=_cmd_simulate)

    sp = sub.add_parser("rank", parents=[common], help="rank of the final-state span vs range size")
    field_args(sp)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.set_defaults(handler=_cmd_rank)

    sp = sub.add_parser("multivariate", parents=[common], help="multivariate range exploration")
    field_args(sp, with_sweep=True)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--mode", choices=["exact", "sample"], default="exact")
    sp.add_argument("--samples", type=int, default=2000)
    sp.set_defaults(handler=_cmd_multivariate)
    return parser


def _flatten(value, prefix: str, out: dict) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(sub, f"{prefix}.{key}" if prefix else str(key), out)
    elif isinstance(value, (list, tuple)):
        out[prefix] = json.dumps(value)
    else:
        out[prefix] = value


def _emit(records: list[dict], json_path: str, csv_path: str | None) -> None:
    doc = {"schema_version": 1, "records": records}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if json_path == "-":
        sys.stdout.write(text)
    else:
        with open(json_path, "w") as fh:
            fh.write(text)
    if csv_path is None:
        return
    flat_rows = []
    for rec in records:
        row: dict = {}
        _flatten(rec, "", row)
        flat_rows.append(row)
    columns = sorted({key for row in flat_rows for key in row})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns)
    writer.writeheader()
    for row in flat_rows:
        writer.writerow(row)
    with open(csv_path, "w") as fh:
        fh.write(buf.getvalue())


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    budget = _budget_from_env()
    amp_cap = _amp_cap_from_env()
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    try:
        records = args.handler(args, budget, amp_cap, seed)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AttemptsExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except NotInGoodRangeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    _emit(records, args.json, args.csv)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 invariant or consistency
violation, 3 I/O error. ``DELAYED_CSIT_THREADS`` sets the worker count
of ``sweep`` (default 1).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .config import ConfigError, MisoConfig, classify, derived, is_boundary, normalize
from .geometry import GeometryError, fraction_to_str
from .regions import ConsistencyError, miso_bounds, miso_upper_via_cooperation, named_corners, region_bundle
from .render import region_svg
from .schemes import SchemeError, corner_scheme, count_constraints, generic_spec, rank_condition, rank_terms
from .simulator import (
    SimulationError,
    monte_carlo,
    monte_carlo_miso,
    trials_to_csv,
)
from . import sweeps

DEFAULT_SEED = 20240601
THREADS_ENV = "DELAYED_CSIT_THREADS"

EXIT_OK, EXIT_VALIDATION, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _counts(p):
    for name in ("m1", "m2", "n1", "n2"):
        p.add_argument(name, type=_positive)


def _run_opts(p, trials=100):
    p.add_argument("--trials", type=_positive, default=trials)
    p.add_argument("--seed", type=_nonneg, default=DEFAULT_SEED)


def _fmt(p, choices, default):
    p.add_argument("--format", choices=choices, default=default)
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="delayed-csit", description="DoF regions and retrospective interference alignment.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="class and derived quantities of a configuration")
    _counts(p)
    _fmt(p, ("text", "json"), "text")

    p = sub.add_parser("region", help="all DoF regions, corners and the tightness verdict")
    _counts(p)
    _fmt(p, ("json", "text", "svg"), "json")

    p = sub.add_parser("verify-corner", help="replay the scheme of a named corner")
    _counts(p)
    p.add_argument("corner")
    _run_opts(p)
    _fmt(p, ("json", "csv", "text"), "json")

    p = sub.add_parser("verify-rank", help="rank terms and replay of a generic (W, W1, W2) scheme")
    _counts(p)
    p.add_argument("--W", dest="w", type=_positive, required=True)
    p.add_argument("--W1", dest="w1", type=_nonneg, required=True)
    p.add_argument("--W2", dest="w2", type=_nonneg, required=True)
    _run_opts(p)
    _fmt(p, ("json", "csv", "text"), "json")

    p = sub.add_parser("miso", help="K-user MISO scheme and sum-DoF bounds")
    p.add_argument("k", type=_positive)
    p.add_argument("m", type=_positive)
    _run_opts(p)
    _fmt(p, ("json", "csv", "text"), "json")

    p = sub.add_parser("sweep", help="all invariant checks over configs up to a bound")
    p.add_argument("max_antennas", type=_positive)
    p.add_argument("trials", type=_positive)
    p.add_argument("--seed", type=_nonneg, default=DEFAULT_SEED)
    p.add_argument("--max-w", type=_positive, default=10, help="largest W in the rank-formula sweep")
    p.add_argument(
        "--checks",
        default="classify,regions,corners,rank",
        help="comma-separated subset of classify,regions,corners,rank",
    )
    _fmt(p, ("json", "text"), "json")
    return parser


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cfg(args):
    return normalize(args.m1, args.m2, args.n1, args.n2)


def cmd_classify(args) -> int:
    cfg = _cfg(args)
    d = derived(cfg)
    data = {
        "input": [args.m1, args.m2, args.n1, args.n2],
        "normalized": list(cfg.counts),
        "swapped": cfg.swapped,
        "class": str(classify(cfg)),
        "boundary_completion": is_boundary(cfg),
        "derived": d.to_json(),
    }
    if args.format == "json":
        _emit(_dumps(data), args.output)
    else:
        dj = d.to_json()
        lines = [
            str(classify(cfg)),
            f"normalized: M1={cfg.m1} M2={cfg.m2} N1={cfg.n1} N2={cfg.n2} (swapped={str(cfg.swapped).lower()})",
            f"M1'={dj['m1_prime']} M2'={dj['m2_prime']} delta={dj['delta']} delta'={dj['delta_prime']} lambda={dj['lambda']}",
        ]
        if is_boundary(cfg):
            lines.append("boundary configuration: assigned by the completion rule")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_region(args) -> int:
    cfg = _cfg(args)
    b = region_bundle(cfg)
    b.check_inclusions()
    if args.format == "svg":
        _emit(region_svg(b), args.output)
    elif args.format == "json":
        data = b.to_json()
        if cfg.swapped:
            data["caller_order_achievable_vertices"] = [[v[1], v[0]] for v in data["regions"]["achievable"]["vertices"]]
        _emit(_dumps(data), args.output)
    else:
        lines = [f"class {b.cls}" + (" (boundary completion)" if is_boundary(cfg) else "")]
        for name in ("achievable", "outer", "perfect_csit", "bc_delayed", "no_csit"):
            poly = getattr(b, name)
            lines.append(f"{name}: " + " ".join(str(v) for v in poly.vertices))
        lines.append("corners: " + ", ".join(f"{k}={p}" for k, p in b.corner_points))
        lines.append(f"tight: {str(b.tight).lower()}" + (f" (case {b.tight_case})" if b.tight_case else ""))
        lines.append(f"sum-DoF: {fraction_to_str(b.achievable.max_linear((1, 1)))}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _mc_output(args, mc, extra: dict) -> None:
    if args.format == "csv":
        _emit(trials_to_csv(mc.reports), args.output)
        return
    data = mc.to_json()
    data.update(extra)
    if args.format == "json":
        _emit(_dumps(data), args.output)
    else:
        lines = [f"{k}: {json.dumps(data[k], sort_keys=True)}" for k in sorted(data)]
        _emit("\n".join(lines) + "\n", args.output)


def cmd_verify_corner(args) -> int:
    cfg = _cfg(args)
    spec = corner_scheme(cfg, args.corner)
    target = named_corners(cfg)[spec.corner]
    mc = monte_carlo(cfg, spec, args.trials, args.seed)
    ok = mc.decode_rate == 1 and mc.dof == tuple(target)
    extra = {
        "scheme": spec.to_json(),
        "corner_point": target.to_json(),
        "rank_condition": list(rank_condition(cfg, spec)) if spec.is_generic else None,
        "verified": ok,
    }
    _mc_output(args, mc, extra)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_verify_rank(args) -> int:
    cfg = _cfg(args)
    spec = generic_spec(cfg, args.w, args.w1, args.w2)
    terms = [rank_terms(cfg, spec, r) for r in (1, 2)]
    cond = rank_condition(cfg, spec)
    mc = monte_carlo(cfg, spec, args.trials, args.seed)
    lhs1, rhs1, lhs2, rhs2 = count_constraints(spec, cfg)
    # a receiver decodes in every trial or in none, as the rank condition says
    consistent = all(
        mc.receiver_decode_rates[k] == (1 if cond[k] else 0) for k in range(2)
    ) and mc.rank_agreement_rate == 1
    extra = {
        "counting": {"lhs1": lhs1, "rhs1": rhs1, "lhs2": lhs2, "rhs2": rhs2, "holds": lhs1 <= rhs1 and lhs2 <= rhs2},
        "rank_terms": [
            {"r1": t.r1, "r2": t.r2, "r3": t.r3, "i_max": t.i_max, "i_min": t.i_min,
             "unknowns": t.unknowns, "predicted_rank": t.predicted_rank}
            for t in terms
        ],
        "rank_condition": list(cond),
        "formula_matches_replay": consistent,
    }
    _mc_output(args, mc, extra)
    return EXIT_OK if consistent else EXIT_VIOLATION


def cmd_miso(args) -> int:
    mc_cfg = MisoConfig(args.k, args.m)
    lo, hi = miso_bounds(mc_cfg)
    hi_coop = miso_upper_via_cooperation(mc_cfg)
    if hi != hi_coop:
        raise ConsistencyError(f"upper bound {hi} differs from the merged-channel value {hi_coop}")
    mc = monte_carlo_miso(mc_cfg, args.trials, args.seed)
    ok = mc.decode_rate == 1 and mc.dof is not None and sum(mc.dof) == lo
    extra = {
        "k": args.k,
        "m": args.m,
        "achievable_sum_dof": fraction_to_str(lo),
        "upper_sum_dof": fraction_to_str(hi),
        "verified": ok,
    }
    _mc_output(args, mc, extra)
    return EXIT_OK if ok else EXIT_VIOLATION


def _corner_chunk(payload):
    counts, trials, seed = payload
    cfgs = [normalize(*c) for c in counts]
    return sweeps.corner_sweep(trials=trials, base_seed=seed, configs=cfgs)


def _rank_chunk(payload):
    counts, trials, seed, max_w = payload
    cfgs = [normalize(*c) for c in counts]
    return sweeps.rank_oracle(max_w=max_w, trials=trials, base_seed=seed, configs=cfgs)[0]


def _parallel(fn, payloads, threads):
    if threads <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, payloads))


def _merge(name, parts):
    out = sweeps.SweepResult(name)
    for p in parts:
        out.checked += p.checked
        out.violations += p.violations
        out.notes += p.notes
    return out


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive, got {n}")
    return n


def cmd_sweep(args) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = set(checks) - {"classify", "regions", "corners", "rank"}
    if unknown:
        raise ConfigError(f"unknown checks: {sorted(unknown)}")
    threads = _threads()
    counts = [c.counts for c in sweeps.normalized_configs(args.max_antennas)]
    chunks = [counts[i::threads] for i in range(threads)] if threads > 1 else [counts]
    results = []
    if "classify" in checks:
        results.append(sweeps.classification_sweep(args.max_antennas))
    if "regions" in checks:
        results.append(sweeps.region_sweep(args.max_antennas))
    if "corners" in checks:
        results.append(_merge("corners", _parallel(_corner_chunk, [(c, args.trials, args.seed) for c in chunks], threads)))
    if "rank" in checks:
        parts = _parallel(_rank_chunk, [(c, args.trials, args.seed, args.max_w) for c in chunks], threads)
        results.append(_merge("rank-oracle", parts))
    total = sum(len(r.violations) for r in results)
    if args.format == "json":
        _emit(_dumps({"max_antennas": args.max_antennas, "trials": args.trials, "seed": args.seed,
                      "violations": total, "checks": [r.to_json() for r in results]}), args.output)
    else:
        lines = [f"{r.name}: checked {r.checked}, violations {len(r.violations)}" for r in results]
        for r in results:
            lines += [f"  {v.check} {v.subject}: {v.detail}" for v in r.violations]
        lines.append(f"total violations: {total}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if total == 0 else EXIT_VIOLATION


COMMANDS = {
    "classify": cmd_classify,
    "region": cmd_region,
    "verify-corner": cmd_verify_corner,
    "verify-rank": cmd_verify_rank,
    "miso": cmd_miso,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SchemeError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConsistencyError, SimulationError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

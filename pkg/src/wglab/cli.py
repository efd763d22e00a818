"""Command-line front end.

Thirteen subcommands map one-to-one onto the package operations, from the
interval sieve up to the full exceptional-set report.  A run is configured
by a flat key = value file (--config), overridden by flags; the cache
directory can also come from the WGLAB_CACHE_DIR environment variable.
Flag precedence: explicit flag > environment > config file > default.

Exit status: 0 on success, 1 on domain errors (printed as
"error[<code>]: <message>" on stderr), 2 on usage errors.

All floats are printed with 12 significant digits so golden outputs are
stable across platforms.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arcs import ArcDecomposition, ArcParams
from .arith import ProblemContext, admissible, modulus_R, sieve_interval
from .config import RunConfig, canonical_json, format_float, parse_config
from .errors import ParameterDomain, UnsupportedKind, WglabError
from .experiment import ExceptionalReport, exceptional_scan, minor_arc_moment
from .expsums import build_sequence, classify, dichotomy_report, sup_scan
from .representations import moment, rho_mitm
from .singular_integral import j_integral
from .singular_series import SeriesTruncation, gauss_sum, truncated_sigma

_ENV_CACHE = "WGLAB_CACHE_DIR"

PLOT_KINDS = ("arc_profile", "ratio_histogram", "partial_sums")


# ---------------------------------------------------------------- plumbing


def _add_common(sub: argparse.ArgumentParser) -> None:
    g = sub.add_argument_group("run configuration")
    g.add_argument("--config", help="flat key = value config file")
    g.add_argument("--k", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--theta", type=float)
    g.add_argument("--x", type=float)
    g.add_argument("--y", type=float, help="window half-width; implies theta = log y/log x")
    g.add_argument("--N", type=float, dest="N")
    g.add_argument("--A", type=float, dest="A")
    g.add_argument("--q0", type=int)
    g.add_argument("--grid-size", type=int)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--cache-dir")
    g.add_argument("--output", choices=("json", "csv"))
    g.add_argument("--threads", type=int)
    g.add_argument("--out", help="write results here instead of stdout")


def _merge_config(args: argparse.Namespace) -> tuple[RunConfig, Optional[float]]:
    """Layer flags over environment over config file over defaults."""
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = RunConfig()
    values = dataclasses.asdict(cfg)
    env_cache = os.environ.get(_ENV_CACHE)
    if env_cache:
        values["cache_dir"] = env_cache
    flag_map = {
        "k": args.k, "s": args.s, "theta": args.theta, "N": args.N, "x": args.x,
        "A": args.A, "Q0": args.q0, "grid_size": args.grid_size,
        "batch_size": args.batch_size, "cache_dir": args.cache_dir,
        "output": args.output, "threads": args.threads,
    }
    if args.N is not None and args.x is not None:
        raise ParameterDomain("--N and --x are mutually exclusive")
    if args.N is not None:
        values["x"] = None
    if args.x is not None:
        values["N"] = None
    for key, val in flag_map.items():
        if val is not None:
            values[key] = val
    y = getattr(args, "y", None)
    if y is not None and values["x"] is None:
        raise ParameterDomain("--y needs --x")
    return RunConfig(**values), y


def _context(cfg: RunConfig, y: Optional[float]) -> ProblemContext:
    if y is not None:
        return ProblemContext.from_parts(cfg.k, cfg.s, float(cfg.x), float(y))
    return cfg.context()


def _ctx_dict(ctx: ProblemContext) -> dict:
    return {"k": ctx.k, "s": ctx.s, "theta": ctx.theta, "N": ctx.N, "x": ctx.x, "y": ctx.y}


def _params(cfg: RunConfig, args: argparse.Namespace, ctx: ProblemContext) -> ArcParams:
    P = getattr(args, "P", None)
    Q = getattr(args, "Q", None)
    if (P is None) != (Q is None):
        raise ParameterDomain("--P and --Q must be given together")
    if P is not None:
        return ArcParams.explicit(P=P, Q=Q, ctx=ctx)
    return ArcParams.from_context(ctx, A=cfg.A)


def _csv_lines(header: list[str], rows: list[list]) -> str:
    def cell(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return format_float(v)
        return str(v)

    out = [",".join(header)]
    out.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


def _flatten(payload: dict, prefix: str = "") -> list[tuple[str, object]]:
    items: list[tuple[str, object]] = []
    for key in sorted(payload, key=str):
        val = payload[key]
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            items.extend(_flatten(val, prefix=f"{name}."))
        elif isinstance(val, (list, tuple)):
            for i, v in enumerate(val):
                items.append((f"{name}[{i}]", v))
        else:
            items.append((name, val))
    return items


def _emit(cfg: RunConfig, payload: dict, table: Optional[tuple[list[str], list[list]]]) -> str:
    """Render a command result: JSON payload or the CSV view of it."""
    if cfg.output == "csv":
        if table is not None:
            return _csv_lines(*table)
        flat = _flatten(payload)
        return _csv_lines([k for k, _ in flat], [[v for _, v in flat]])
    return canonical_json(payload)


# ------------------------------------------------------------- subcommands


def _cmd_sieve(cfg, args, y):
    primes = sieve_interval(args.lo, args.hi)
    return " ".join(str(p) for p in primes) + "\n"


def _cmd_admissible(cfg, args, y):
    ok = admissible(args.n, cfg.k, cfg.s)
    payload = {
        "n": args.n, "k": cfg.k, "s": cfg.s,
        "modulus": modulus_R(cfg.k), "admissible": ok,
    }
    return _emit(cfg, payload, None)


def _cmd_gauss_sum(cfg, args, y):
    g = gauss_sum(args.q, args.a, cfg.k)
    payload = {
        "q": g.q, "a": g.a, "k": g.k,
        "re": g.value.real, "im": g.value.imag, "abs": abs(g.value),
    }
    return _emit(cfg, payload, None)


def _cmd_sigma(cfg, args, y):
    # the truncated series depends on (n, k, s, q0) only; the context's
    # window scale is irrelevant here
    ctx = _context(cfg, y)
    tr = truncated_sigma(args.n, ctx, cfg.Q0)
    payload = {
        "n": tr.n, "k": tr.k, "s": tr.s, "q0": tr.q0,
        "value": tr.value, "terms_kept": len(tr.partials),
    }
    return _emit(cfg, payload, None)


def _cmd_jay(cfg, args, y):
    ctx = _context(cfg, y)
    val = j_integral(args.n, ctx)
    scale = ctx.y ** (ctx.s - 1) * ctx.x ** (1 - ctx.k)
    payload = {
        "n": args.n, "context": _ctx_dict(ctx),
        "value": val, "scale": scale, "normalized": val / scale,
    }
    return _emit(cfg, payload, None)


def _cmd_rho(cfg, args, y):
    ctx = _context(cfg, y)
    rec = rho_mitm([args.n], ctx, batch_size=cfg.batch_size, threads=cfg.threads)[0]
    payload = {"n": rec.n, "rho": rec.value, "tuple_count": rec.tuple_count}
    return _emit(cfg, payload, None)


def _cmd_moment(cfg, args, y):
    ctx = _context(cfg, y)
    mv = moment(args.t, ctx)
    payload = {"t": mv.t, "value": mv.value}
    return _emit(cfg, payload, None)


def _cmd_arcs(cfg, args, y):
    ctx = _context(cfg, y)
    params = _params(cfg, args, ctx)
    decomp = ArcDecomposition.build(params)
    arcs = [
        {"q": m.q, "a": m.a, "center": m.center, "half_width": m.half_width}
        for m in decomp.intervals
    ]
    payload = {
        "P": params.P, "Q": params.Q, "A": params.A,
        "arc_count": len(arcs), "measure": decomp.measure(), "arcs": arcs,
    }
    table = (
        ["q", "a", "center", "half_width"],
        [[m.q, m.a, m.center, m.half_width] for m in decomp.intervals],
    )
    return _emit(cfg, payload, table)


def _cmd_scan_sup(cfg, args, y):
    ctx = _context(cfg, y)
    params = _params(cfg, args, ctx)
    decomp = ArcDecomposition.build(params)
    seq = build_sequence(ctx, "prime_log")
    rep = sup_scan(seq, ctx.k, decomp, args.region, cfg.grid_size)
    w = rep.nearest_rational
    payload = {
        "region": rep.region, "grid_size": rep.grid_size,
        "points_in_region": rep.points_in_region, "sup_abs": rep.sup_abs,
        "argmax_alpha": rep.argmax_alpha,
        "witness": {"a": w.a, "q": w.q, "beta": w.beta},
    }
    return _emit(cfg, payload, None)


def _cmd_dichotomy(cfg, args, y):
    ctx = _context(cfg, y)
    rep = dichotomy_report(ctx, args.rho, args.alpha)
    approx = (
        {"a": rep.approx.a, "q": rep.approx.q, "beta": rep.approx.beta}
        if rep.approx is not None
        else None
    )
    payload = {
        "alpha": rep.alpha, "rho": rep.rho, "observed": rep.observed,
        "bound_k1": rep.bound_k1, "bound_k3": rep.bound_k3,
        "q_bound": rep.q_bound, "approx": approx,
    }
    return _emit(cfg, payload, None)


def _report_summary(rep: ExceptionalReport) -> dict:
    ratios = (
        {"min": rep.ratios.min, "median": rep.ratios.median, "max": rep.ratios.max}
        if rep.ratios is not None
        else None
    )
    return {
        "window": list(rep.window),
        "q0": rep.q0,
        "scanned": rep.scanned,
        "exceptional": rep.exceptional,
        "exceptional_one_sided": rep.exceptional_one_sided,
        "exceptional_fraction": rep.exceptional_fraction(),
        "threshold": rep.threshold,
        "ratios": ratios,
    }


def _per_n_table(rep: ExceptionalReport) -> tuple[list[str], list[list]]:
    header = ["n", "rho", "tuple_count", "sigma", "jay", "ratio", "flagged"]
    rows: list[list] = []
    if rep.per_n is not None:
        d = rep.per_n
        for i in range(len(d.n)):
            rows.append([
                int(d.n[i]), float(d.rho[i]), int(d.tuple_count[i]),
                float(d.sigma[i]), float(d.jay[i]), float(d.ratio[i]),
                bool(d.flagged[i]),
            ])
    return header, rows


def _cmd_exceptional(cfg, args, y):
    ctx = _context(cfg, y)
    rep = exceptional_scan(
        ctx, cfg.Q0, batch_size=cfg.batch_size, threads=cfg.threads,
        cache_dir=cfg.cache_dir,
    )
    payload = {"context": _ctx_dict(ctx), "summary": _report_summary(rep)}
    return _emit(cfg, payload, _per_n_table(rep))


def _cmd_minor_moment(cfg, args, y):
    ctx = _context(cfg, y)
    params = _params(cfg, args, ctx)
    val = minor_arc_moment(ctx, params, args.t, cfg.grid_size, region=args.region)
    scale = ctx.y ** (args.t - 1) * ctx.x ** (1 - ctx.k)
    payload = {
        "t": args.t, "region": args.region, "grid_size": cfg.grid_size,
        "P": params.P, "Q": params.Q,
        "value": val, "scale": scale, "ratio_to_scale": val / scale,
    }
    return _emit(cfg, payload, None)


def _cmd_report(cfg, args, y):
    ctx = _context(cfg, y)
    rep = exceptional_scan(
        ctx, cfg.Q0, batch_size=cfg.batch_size, threads=cfg.threads,
        cache_dir=cfg.cache_dir,
    )
    parameters = {
        name: getattr(cfg, name)
        for name in ("k", "s", "theta", "N", "x", "A", "Q0", "grid_size",
                     "batch_size", "output", "threads")
    }
    stream_name = None
    if args.out:
        base = args.out[:-5] if args.out.endswith(".json") else args.out
        stream_path = base + ".per-n.csv"
        with open(stream_path, "w", encoding="utf-8") as fh:
            fh.write(_csv_lines(*_per_n_table(rep)))
        stream_name = os.path.basename(stream_path)
    payload = {
        "schema_version": 1,
        "context": _ctx_dict(ctx),
        "parameters": parameters,
        "summary": _report_summary(rep),
        "per_n_stream": stream_name,
    }
    if args.plot:
        if not args.plot_out:
            raise ParameterDomain("--plot needs --plot-out")
        source = _plot_source(rep, ctx, cfg, args)
        emit_plot_data(source, args.plot, args.plot_out)
    return canonical_json(payload)


def _plot_source(rep: ExceptionalReport, ctx, cfg, args):
    if args.plot == "ratio_histogram":
        return rep
    if args.plot == "partial_sums":
        if args.plot_n is not None:
            n = args.plot_n
        elif rep.per_n is not None and rep.scanned:
            n = int(rep.per_n.n[0])
        else:
            raise ParameterDomain("no scanned n to plot; give --plot-n")
        return truncated_sigma(n, ctx, cfg.Q0)
    if args.plot == "arc_profile":
        params = ArcParams.from_context(ctx, A=cfg.A)
        return arc_profile(ctx, params, cfg.grid_size)
    raise UnsupportedKind(f"unknown plot kind {args.plot!r}")


# -------------------------------------------------------------- plot data


@dataclass(eq=False)
class ArcProfile:
    """|f| sampled on the circle grid, each point labeled major/minor."""

    alphas: np.ndarray
    magnitudes: np.ndarray
    labels: tuple[str, ...]


def arc_profile(ctx: ProblemContext, params: ArcParams, grid_size: int) -> ArcProfile:
    if grid_size < 2:
        raise ParameterDomain(f"need grid_size >= 2, got {grid_size}")
    seq = build_sequence(ctx, "prime_log")
    pw = seq.powers(ctx.k)
    w = seq.weights
    alphas = np.arange(grid_size, dtype=np.float64) / grid_size
    mags = np.empty(grid_size)
    labels = []
    for j in range(grid_size):
        alpha = alphas[j]
        mags[j] = abs(np.dot(w, pw.phases(float(alpha))))
        labels.append(classify(float(alpha), params)[0])
    return ArcProfile(alphas=alphas, magnitudes=mags, labels=tuple(labels))


def emit_plot_data(report, kind: str, path: str) -> None:
    """Write one plot-ready CSV: |f| profile, ratio histogram, or the
    singular-series partial-sum trajectory, depending on kind."""
    if kind not in PLOT_KINDS:
        raise UnsupportedKind(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    if kind == "arc_profile":
        if not isinstance(report, ArcProfile):
            raise UnsupportedKind("arc_profile needs an ArcProfile source")
        header = ["alpha", "abs_f", "label"]
        rows = [
            [float(report.alphas[i]), float(report.magnitudes[i]), report.labels[i]]
            for i in range(len(report.alphas))
        ]
    elif kind == "ratio_histogram":
        if not isinstance(report, ExceptionalReport):
            raise UnsupportedKind("ratio_histogram needs an ExceptionalReport source")
        header = ["bin_lo", "bin_hi", "count"]
        rows = []
        if report.per_n is not None and report.scanned:
            finite = report.per_n.ratio[np.isfinite(report.per_n.ratio)]
            if finite.size:
                counts, edges = np.histogram(finite, bins=20)
                rows = [
                    [float(edges[i]), float(edges[i + 1]), int(counts[i])]
                    for i in range(len(counts))
                ]
    else:  # partial_sums
        if not isinstance(report, SeriesTruncation):
            raise UnsupportedKind("partial_sums needs a SeriesTruncation source")
        header = ["q", "a_q", "partial_sum"]
        rows = [
            [q, a, acc]
            for (q, a), (_, acc) in zip(report.partials, report.trajectory())
        ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_csv_lines(header, rows))


# ---------------------------------------------------------------- parser


_HANDLERS = {
    "sieve": _cmd_sieve,
    "admissible": _cmd_admissible,
    "gauss-sum": _cmd_gauss_sum,
    "sigma": _cmd_sigma,
    "jay": _cmd_jay,
    "rho": _cmd_rho,
    "moment": _cmd_moment,
    "arcs": _cmd_arcs,
    "scan-sup": _cmd_scan_sup,
    "dichotomy": _cmd_dichotomy,
    "exceptional": _cmd_exceptional,
    "minor-moment": _cmd_minor_moment,
    "report": _cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wglab",
        description="circle-method laboratory for prime powers from a short window",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="primes in (lo, hi]")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("admissible", help="congruence admissibility of n")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("gauss-sum", help="complete exponential sum S(q, a)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("sigma", help="truncated singular series at n")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("jay", help="singular integral at n")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("rho", help="exact weighted representation count of n")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("moment", help="even moment of |f| over the circle")
    p.add_argument("--t", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("arcs", help="enumerate the major-arc family")
    p.add_argument("--P", type=float)
    p.add_argument("--Q", type=float)
    _add_common(p)

    p = sub.add_parser("scan-sup", help="grid supremum of |f| over a region")
    p.add_argument("--region", choices=("major", "minor", "full"), default="minor")
    p.add_argument("--P", type=float)
    p.add_argument("--Q", type=float)
    _add_common(p)

    p = sub.add_parser("dichotomy", help="short unit sum vs regime bounds at alpha")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("exceptional", help="scan a window for main-term failures")
    _add_common(p)

    p = sub.add_parser("minor-moment", help="Riemann estimate of a minor-arc moment")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--region", choices=("minor", "full"), default="minor")
    p.add_argument("--P", type=float)
    p.add_argument("--Q", type=float)
    _add_common(p)

    p = sub.add_parser("report", help="full experiment report (JSON + per-n CSV)")
    p.add_argument("--plot", choices=PLOT_KINDS)
    p.add_argument("--plot-out")
    p.add_argument("--plot-n", type=int)
    _add_common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg, y = _merge_config(args)
        text = _HANDLERS[args.command](cfg, args, y)
    except WglabError as exc:
        print(f"error[{exc.code}]: {exc.message}", file=sys.stderr)
        return 1
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

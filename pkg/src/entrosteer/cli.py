"""Command-line front end.

Exit codes: 0 success, 2 parse failure, 3 validation failure,
4 a mathematically guaranteed identity or inequality breached, 5 usage.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .connection import conditional_mi_probe, gap_suite, jensen_step, verify_connection
from .core import BinningSpec, validate
from .corpus import LAYOUT, mixture_density
from .discretize import bin_density
from .entropy import (
    canonical_base,
    conditional_entropy_differential,
    conditional_entropy_discrete,
    differential_entropy,
    discrete_entropy,
    mutual_information_differential,
    mutual_information_discrete,
)
from .errors import (
    ArityError,
    CommensurabilityError,
    EntroSteerError,
    OutOfDomainError,
    TailMassError,
    ValidationError,
    ZeroProbabilityWindowError,
)
from .gaussian_model import FOURIER_CONVENTION, BiphotonParams, analytic_entropies, model_axes, momentum_joint, position_joint
from .io import MissingWidthError, ParseError, dump_json, read_density_json, read_histogram_csv, write_density_json, write_histogram_csv
from .steering import bin_model, discrete_steering_test, nested_scan, steering_bin_scan

log = logging.getLogger("entrosteer")

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_BREACH, EXIT_USAGE = 0, 2, 3, 4, 5
GAP_FLOOR = -1e-10


class UsageError(EntroSteerError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _width_arg(text):
    """Width flag for CSV input: one value applies to every axis."""
    if not text:
        return None
    vals = _floats(text)
    return vals[0] if len(vals) == 1 else vals


def parse_model(text: str, dims: int = 1) -> BiphotonParams:
    """``"1,0.05"`` or ``"sigma_plus=1,sigma_minus=0.05"``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    values = {}
    try:
        if all("=" in p for p in parts):
            for p in parts:
                k, v = p.split("=", 1)
                key = k.strip().lower().replace("σ", "sigma").replace("₊", "_plus").replace("₋", "_minus")
                key = {"s+": "sigma_plus", "sp": "sigma_plus", "s-": "sigma_minus", "sm": "sigma_minus"}.get(key, key)
                values[key] = float(v)
            sp, sm = values["sigma_plus"], values["sigma_minus"]
        elif len(parts) == 2:
            sp, sm = float(parts[0]), float(parts[1])
        else:
            raise ValueError
    except (KeyError, ValueError):
        raise UsageError(f"--model expects 'sigma_plus,sigma_minus', got {text!r}") from None
    return BiphotonParams(sp, sm, dims)


def _width_pairs(text):
    pairs = []
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        if ":" not in chunk:
            raise UsageError(f"scan widths must look like 'dx:dk,dx:dk', got {chunk!r}")
        dx, dk = chunk.split(":", 1)
        pairs.append((float(dx), float(dk)))
    return pairs


def _emit(args, report: dict, lines):
    if args.json:
        sys.stdout.write(dump_json(report))
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def _fmt(v):
    return "n/a" if v is None else f"{v: .10f}"


# entropy ---------------------------------------------------------------


def _entropy_rows_hist(h, base):
    rows = {}
    n = h.ndim
    for i in range(n):
        rows[f"H({h.names[i]})"] = discrete_entropy(h, base, axes=(i,)).value
    if n >= 2:
        rows[f"H({','.join(h.names)})"] = discrete_entropy(h, base).value
        for i in range(n):
            rest = tuple(j for j in range(n) if j != i)
            others = ",".join(h.names[j] for j in rest)
            rows[f"H({h.names[i]}|{others})"] = conditional_entropy_discrete(h, rest, base, (i,)).value
            rows[f"H({h.names[i]}:{others})"] = mutual_information_discrete(h, base, (i,), rest).value
    return rows


def _entropy_rows_density(d, base):
    rows = {}
    n = d.ndim
    for i in range(n):
        rows[f"h({d.names[i]})"] = differential_entropy(d, base, axes=(i,)).value
    if n >= 2:
        rows[f"h({','.join(d.names)})"] = differential_entropy(d, base).value
        for i in range(n):
            rest = tuple(j for j in range(n) if j != i)
            others = ",".join(d.names[j] for j in rest)
            rows[f"h({d.names[i]}|{others})"] = conditional_entropy_differential(d, rest, base, (i,)).value
            rows[f"h({d.names[i]}:{others})"] = mutual_information_differential(d, base, (i,), rest).value
    return rows


def cmd_entropy(args) -> int:
    base = canonical_base(args.base)
    path = Path(args.input)
    if path.suffix.lower() == ".json":
        density, meta = read_density_json(path, args.normalize)
        diag = validate(density)
        if not diag.ok:
            raise ValidationError(f"density mass {diag.mass!r} is not normalised; pass --normalize")
        rows = _entropy_rows_density(density, base)
        report = {"kind": "density", "names": list(density.names), "diagnostics": diag.to_dict()}
        if args.widths:
            spec = _spec_for(density, _floats(args.widths), args.center)
            hist = bin_density(density, spec)
            rows.update(_entropy_rows_hist(hist, base))
            report["widths"] = list(spec.widths)
    else:
        hist, meta = read_histogram_csv(path, widths=_width_arg(args.dx), normalize=args.normalize)
        rows = _entropy_rows_hist(hist, base)
        report = {"kind": "histogram", "names": list(hist.names), "widths": list(hist.widths)}
    report.update({"base": base, "quantities": rows, "meta": meta})
    lines = [f"# entropies in base {base} ({report['kind']} {meta['source']})"]
    if meta.get("normalized"):
        lines.append("# input renormalised to unit mass")
    lines += [f"{k:<24}{_fmt(v)}" for k, v in rows.items()]
    _emit(args, report, lines)
    return EXIT_OK


# verify-connection -------------------------------------------------------


def _spec_for(density, widths, center=None):
    widths = widths[0] if len(widths) == 1 else widths
    if center is None:
        return BinningSpec.tiling(density.axes, widths)
    return BinningSpec.centered(density.axes, widths, center)


def cmd_verify_connection(args) -> int:
    base = canonical_base(args.base)
    if not args.widths:
        raise UsageError("--widths is required")
    widths = _floats(args.widths)
    if bool(args.input) == bool(args.model):
        raise UsageError("give exactly one of INPUT or --model")
    if args.model:
        params = parse_model(args.model)
        if len(widths) != 1:
            raise UsageError("--model takes a single window width")
        ax = model_axes(params, widths[0], args.space, args.refine)
        build = position_joint if args.space == "x" else momentum_joint
        density = build(params, ax)
        source = {"model": {"sigma_plus": params.sigma_plus, "sigma_minus": params.sigma_minus, "space": args.space}}
        spec = BinningSpec.tiling(density.axes, widths[0])
    else:
        density, meta = read_density_json(args.input, args.normalize)
        diag = validate(density)
        if not diag.ok:
            raise ValidationError(f"density mass {diag.mass!r} is not normalised; pass --normalize")
        source = meta
        spec = _spec_for(density, widths, args.center)
    conn = verify_connection(density, spec, base)
    gaps = gap_suite(density, spec, base)
    report = {
        "base": base,
        "source": source,
        "widths": list(spec.widths),
        "connection": conn.to_dict(),
        "gaps": [g.to_dict() for g in gaps],
    }
    breach = not conn.passed or any(g.applicable and g.gap < GAP_FLOOR for g in gaps)
    if density.ndim == 2:
        _, jg = jensen_step(density, spec, base)
        report["jensen_min_gap"] = float(jg.min()) if len(jg) else None
        breach = breach or (len(jg) > 0 and jg.min() < GAP_FLOOR)
    report["passed"] = not breach
    lines = [
        f"# fundamental connection, base {base}, widths {list(spec.widths)}",
        f"h                 {_fmt(conn.lhs.value)}",
        f"sum P h_window    {_fmt(conn.mixture_term.value)}",
        f"H                 {_fmt(conn.discrete_entropy.value)}",
        f"residual          {conn.residual: .3e}",
        "# inequality gaps (>= 0 holds)",
    ]
    for g in gaps:
        state = "n/a" if not g.applicable else ("ok" if g.satisfied else "BREACH")
        lines.append(f"{g.id:<10}{_fmt(g.gap)}  {state}  {g.label if g.applicable else ''}")
    if "jensen_min_gap" in report:
        lines.append(f"jensen min gap    {_fmt(report['jensen_min_gap'])}")
    lines.append("PASS" if not breach else "FAIL: tolerance breach")
    _emit(args, report, lines)
    return EXIT_BREACH if breach else EXIT_OK


# steering ----------------------------------------------------------------


def _steering_lines(r, title):
    lines = [f"# {title}", f"mode {r.mode}, steered party {r.steered}, base {r.base}"]
    if r.axes:
        for i, a in enumerate(r.axes):
            lines.append(
                f"axis {i + 1}: H(X_B|X_A)={a.H_x:.6f} H(K_B|K_A)={a.H_k:.6f} dx={a.dx:g} dk={a.dk:g} rhs={a.rhs:.6f}"
            )
    lines += [
        f"LHS     {_fmt(r.lhs)}",
        f"RHS     {_fmt(r.rhs)}",
        f"margin  {_fmt(r.margin)}",
        f"verdict {'VIOLATED (steering witnessed)' if r.violated else 'not violated'}",
    ]
    if r.vacuous:
        lines.append("warning: pi*e/(dx*dk) <= 1, RHS <= 0 and the witness is vacuous")
    return lines


def _scan_output(args, params, scan, base):
    report = scan.to_dict()
    report["params"] = {"sigma_plus": params.sigma_plus, "sigma_minus": params.sigma_minus, "dims": params.dims}
    report["convention"] = FOURIER_CONVENTION
    lines = [f"# steering scan, base {base}, continuous LHS {scan.continuous_lhs:.10f}", "dx\tdk\tmargin\tverdict\tvacuous"]
    for row in scan.table():
        lines.append(f"{row['dx']:g}\t{row['dk']:g}\t{row['margin']:.10f}\t{int(row['violated'])}\t{int(row['vacuous'])}")
    if scan.flip_widths:
        lines.append(f"# verdict flips at dx={scan.flip_widths[0]:g}, dk={scan.flip_widths[1]:g}")
    _emit(args, report, lines)
    return EXIT_OK


def _refine_arg(text):
    vals = [int(v) for v in _floats(text)]
    return vals[0] if len(vals) == 1 else tuple(vals[:2])


def cmd_steering(args) -> int:
    base = canonical_base(args.base)
    steered = "A" if args.swap_roles else "B"
    if args.model:
        if args.x_hist or args.k_hist:
            raise UsageError("--model cannot be combined with --x-hist/--k-hist")
        params = parse_model(args.model, args.dims)
        refine = _refine_arg(args.refine)
        if args.scan or args.halvings:
            if args.halvings:
                w = _floats(args.widths or "")
                if len(w) != 2:
                    raise UsageError("--halvings needs --widths dx,dk")
                scan = nested_scan(params, w[0], w[1], args.halvings, base, refine)
            else:
                pairs = _width_pairs(args.widths or "")
                if not pairs:
                    raise UsageError("--scan needs --widths dx:dk,dx:dk,...")
                scan = steering_bin_scan(params, pairs, base, refine, steered=steered)
            return _scan_output(args, params, scan, base)
        w = _floats(args.widths or "")
        if len(w) != 2:
            raise UsageError("--model needs --widths dx,dk")
        mb = bin_model(params, w[0], w[1], refine)
        hx, hk = bin_density(mb.x_density, mb.x_spec), bin_density(mb.k_density, mb.k_spec)
        r = discrete_steering_test([hx] * params.dims, [hk] * params.dims, base, steered, FOURIER_CONVENTION)
        report = r.to_dict()
        report["params"] = {"sigma_plus": params.sigma_plus, "sigma_minus": params.sigma_minus, "dims": params.dims}
        report["continuous_lhs"] = analytic_entropies(params, base).steering_lhs.value
    else:
        if not (args.x_hist and args.k_hist):
            raise UsageError("give --model or both --x-hist and --k-hist")
        if args.scan or args.halvings:
            raise UsageError("--scan needs --model")
        hx, mx = read_histogram_csv(args.x_hist, _width_arg(args.dx), normalize=args.normalize)
        hk, mk = read_histogram_csv(args.k_hist, _width_arg(args.dk), normalize=args.normalize)
        if mx["widths_inferred"] or mk["widths_inferred"]:
            raise MissingWidthError("steering needs explicit widths: pass --dx/--dk or a sidecar JSON")
        r = discrete_steering_test(hx, hk, base, steered)
        report = r.to_dict()
        report["sources"] = [mx, mk]
    _emit(args, report, _steering_lines(r, "discrete EPR-steering witness"))
    return EXIT_OK


def cmd_scan(args) -> int:
    args.scan = True
    if not args.model:
        raise UsageError("scan needs --model")
    return cmd_steering(args)


# probe-cmi ---------------------------------------------------------------


def cmd_probe_cmi(args) -> int:
    base = canonical_base(args.base)
    if args.input:
        density, meta = read_density_json(args.input, args.normalize)
        source = meta
    else:
        density, k = mixture_density(np.random.default_rng([args.seed, 0]), 3)
        source = {"generated": "gaussian mixture", "seed": args.seed, "components": k}
    if density.ndim != 3:
        raise ArityError(f"probe-cmi needs a 3-axis density, got {density.ndim}")
    widths = _floats(args.widths) if args.widths else [LAYOUT[3][1][1]]
    spec = _spec_for(density, widths, args.center)
    probe = conditional_mi_probe(density, spec, base)
    report = probe.to_dict()
    report.update({"base": base, "source": source, "widths": list(spec.widths)})
    lines = [
        "# exploratory: h(x:y|z) vs H(X:Y|Z), no inequality asserted",
        f"h(x:y|z)    {_fmt(probe.continuous.value)}",
        f"H(X:Y|Z)    {_fmt(probe.discrete.value)}",
        f"difference  {_fmt(probe.difference)}",
    ]
    _emit(args, report, lines)
    return EXIT_OK


# generate ----------------------------------------------------------------


def cmd_generate(args) -> int:
    if not args.model or not args.widths:
        raise UsageError("generate needs --model and --widths")
    params = parse_model(args.model, args.dims)
    w = _floats(args.widths)
    if len(w) != 1:
        raise UsageError("generate takes one window width")
    ax = model_axes(params, w[0], args.space, _refine_arg(args.refine))
    build = position_joint if args.space == "x" else momentum_joint
    density = build(params, ax)
    out = Path(args.out)
    if args.histogram:
        hist = bin_density(density, BinningSpec.tiling(density.axes, w[0]))
        write_histogram_csv(hist, out, canonical_base(args.base))
    else:
        write_density_json(density, out)
    report = {
        "wrote": str(out),
        "kind": "histogram" if args.histogram else "density",
        "axes": len(density.axes),
        "nodes": int(density.values.size),
        "convention": FOURIER_CONVENTION,
    }
    _emit(args, report, [f"wrote {report['kind']} to {out}"])
    return EXIT_OK


# wiring ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", default="2", choices=["2", "e", "10"], help="logarithm base (default 2)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--normalize", action="store_true", help="rescale inputs to unit mass")
    common.add_argument("--seed", type=int, default=0, help="seed for generated inputs")

    p = _Parser(prog="entrosteer", description="Discrete/continuous entropy connection and EPR-steering witnesses.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("entropy", parents=[common], help="entropies of a histogram CSV or density JSON")
    e.add_argument("input")
    e.add_argument("--dx", help="window widths for the CSV axes")
    e.add_argument("--widths", help="bin a density JSON with these widths as well")
    e.add_argument("--center", type=float, help="centre one window on this coordinate")
    e.set_defaults(func=cmd_entropy)

    v = sub.add_parser("verify-connection", parents=[common], help="connection identity and inequality gaps")
    v.add_argument("input", nargs="?")
    v.add_argument("--model", help="sigma_plus,sigma_minus of the double-Gaussian")
    v.add_argument("--space", choices=["x", "k"], default="x")
    v.add_argument("--widths", help="window width(s)")
    v.add_argument("--center", type=float)
    v.add_argument("--refine", type=int, default=4, help="grid steps per window for --model")
    v.set_defaults(func=cmd_verify_connection)

    for name, func, helptext in (
        ("steering", cmd_steering, "discrete steering witness"),
        ("scan", cmd_scan, "witness over a list of width pairs"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--x-hist")
        s.add_argument("--k-hist")
        s.add_argument("--dx")
        s.add_argument("--dk")
        s.add_argument("--model")
        s.add_argument("--dims", type=int, default=1)
        s.add_argument("--widths", help="dx,dk (or dx:dk,dx:dk,... with --scan)")
        s.add_argument("--scan", action="store_true")
        s.add_argument("--halvings", type=int, default=0, help="nested halvings of --widths dx,dk")
        s.add_argument("--refine", default="4", help="grid steps per window, one value or x,k")
        s.add_argument("--swap-roles", action="store_true", help="condition A on B instead")
        s.set_defaults(func=func)

    c = sub.add_parser("probe-cmi", parents=[common], help="exploratory conditional-MI comparison")
    c.add_argument("input", nargs="?")
    c.add_argument("--widths")
    c.add_argument("--center", type=float)
    c.set_defaults(func=cmd_probe_cmi)

    g = sub.add_parser("generate", parents=[common], help="write model densities or histograms")
    g.add_argument("--model")
    g.add_argument("--space", choices=["x", "k"], default="x")
    g.add_argument("--dims", type=int, default=1)
    g.add_argument("--widths")
    g.add_argument("--refine", default="4")
    g.add_argument("--histogram", action="store_true", help="write a binned CSV + sidecar instead")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("ENTROSTEER_LOG", "WARNING").upper(), format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        code, exc_ = EXIT_PARSE, exc
    except (UsageError, MissingWidthError, ValueError) as exc:
        code, exc_ = EXIT_USAGE, exc
    except (
        ValidationError,
        ArityError,
        CommensurabilityError,
        OutOfDomainError,
        TailMassError,
        ZeroProbabilityWindowError,
    ) as exc:
        code, exc_ = EXIT_VALIDATION, exc
    log.debug("failed", exc_info=True)
    sys.stderr.write(f"entrosteer: error: {exc_}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
